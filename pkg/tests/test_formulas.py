"""Formulas and rules: interning, parsing, evaluation, validity, catalogs."""

import itertools
import random

import pytest

from demorgan import formulas as fm
from demorgan import lattice as lat
from demorgan import matrices as mx

x, y, z = fm.var(0), fm.var(1), fm.var(2)


class TestInterning:
    def test_structural_identity(self):
        assert fm.conj(x, fm.neg(y)) is fm.conj(x, fm.neg(y))
        assert fm.conj(x, y) is not fm.conj(y, x)

    def test_nvars(self):
        assert fm.conj(x, fm.neg(z)).nvars == 3


class TestParsePrint:
    @pytest.mark.parametrize("text", [
        "x", "~x", "x & y", "x | y & z", "(x | y) & z",
        "~(x & y) | ~~z", "x1 & ~x1 | x2",
    ])
    def test_round_trip(self, text):
        f = fm.parse_formula(text)
        assert fm.parse_formula(fm.print_formula(f)) is f

    def test_precedence(self):
        f = fm.parse_formula("x & ~x | y")
        assert f.kind == "or" and f.left.kind == "and"

    def test_x1_aliases_x(self):
        assert fm.parse_formula("x1") is fm.parse_formula("x")

    def test_rule_round_trip(self):
        for text in ("x, ~x | y |- y", "|- x | ~x",
                     "x ~= ~x, x & y |- x & y & z",
                     "x | y, ~x | y |- (x & ~x) | y"):
            r = fm.parse_rule(text)
            assert fm.parse_rule(fm.print_rule(r)) == r

    def test_parse_errors(self):
        with pytest.raises(fm.ParseError):
            fm.parse_formula("x &")
        with pytest.raises(fm.ParseError):
            fm.parse_formula("q7 & x")
        with pytest.raises(fm.ParseError):
            fm.parse_rule("x, y")

    def test_premises_deduplicated_and_sorted(self):
        r = fm.parse_rule("y, x, x |- z")
        assert r.premises == (x, y)


class TestEval:
    def test_spec_examples(self):
        dm1 = lat.build_dm1()
        F, N, B, T = range(4)
        assert fm.eval_formula(fm.parse_formula("x & ~x"), [B], dm1) == B
        assert fm.eval_formula(fm.parse_formula("x | ~x"), [N], dm1) == N
        assert fm.eval_formula(x, [T], dm1) == T

    def test_missing_variable(self):
        dm1 = lat.build_dm1()
        with pytest.raises(ValueError):
            fm.eval_formula(fm.conj(x, y), [0], dm1)

    def test_alpha(self):
        dm1 = lat.build_dm1()
        a = fm.alpha([x, y])
        assert fm.eval_formula(a, [1, 2], dm1) == 0  # n & b = f
        assert fm.print_formula(fm.alpha([x])) == "x | ~x"

    def test_alpha_empty_rejected(self):
        with pytest.raises(ValueError):
            fm.alpha([])


class TestRuleValidity:
    def test_explosion_fails_in_bam2(self):
        ok, cv = fm.rule_valid(fm.parse_rule("x, ~x |- y"), mx.catalog("BAm2"))
        assert not ok and set(cv) == {"x", "y"}

    def test_identity_everywhere(self):
        for name in ("BAm2", "DMm1", "Q9", "Pm1@Km1"):
            assert fm.rule_valid(fm.parse_rule("x |- x"),
                                 mx.catalog(name))[0]

    def test_equational_rule_in_km2(self):
        r = fm.parse_rule("x ~= ~x, y ~= ~y, z ~= ~z, x & y, x & z |- x & y & z")
        assert fm.rule_valid(r, mx.catalog("Km2"))[0]
        # and the equation-free version fails there
        r2 = fm.parse_rule("x & y, x & z |- x & y & z")
        assert not fm.rule_valid(r2, mx.catalog("Km2"))[0]

    def test_grid_matches_scalar_oracle(self):
        # the vectorized checker agrees with direct scalar evaluation
        rng = random.Random(3)
        M = mx.catalog("Pm1@Km1")
        L = M.lattice

        def rand_formula(depth=0):
            k = rng.randrange(6 if depth < 2 else 1)
            if k == 0:
                return fm.var(rng.randrange(2))
            if k == 1:
                return fm.neg(rand_formula(depth + 1))
            l, r = rand_formula(depth + 1), rand_formula(depth + 1)
            return fm.conj(l, r) if k % 2 == 0 else fm.disj(l, r)

        for _ in range(60):
            prem = [rand_formula() for _ in range(rng.randrange(3))]
            concl = rand_formula()
            r = fm.rule(prem, concl)
            got = fm.rule_valid(r, M)[0]
            want = True
            for vals in itertools.product(range(L.size), repeat=2):
                if all(M.is_designated(fm.eval_formula(p, vals, L))
                       for p in prem) and \
                        not M.is_designated(fm.eval_formula(concl, vals, L)):
                    want = False
                    break
            assert got == want

    def test_validity_is_isomorphism_invariant(self):
        m9 = mx.catalog("M9")
        shuffled = mx.canonicalize(m9)
        for name in ("lem", "disjunctive_syllogism", "k_axiom"):
            r = fm.catalog_rules(name)
            assert fm.rule_valid(r, m9)[0] == fm.rule_valid(r, shuffled)[0]

    def test_variable_cap(self):
        many = fm.rule([fm.var(i) for i in range(8)], fm.var(0))
        with pytest.raises(fm.VariableCapExceeded):
            fm.rule_valid(many, mx.catalog("DMm1"))

    def test_six_variable_rule_runs(self):
        r = fm.rule([fm.var(i) for i in range(6)], fm.var(0))
        assert fm.rule_valid(r, mx.catalog("DMm1"))[0]

    def test_counter_valuation_is_genuine(self):
        r = fm.parse_rule("x, y |- x & y")
        M = mx.catalog("DMm2")
        ok, cv = fm.rule_valid(r, M)
        assert not ok
        vals = fm.valuation_from_labels(M.lattice, cv)
        L = M.lattice
        assert all(M.is_designated(fm.eval_formula(p, vals, L))
                   for p in r.premises)
        assert not M.is_designated(fm.eval_formula(r.conclusion, vals, L))


class TestTransforms:
    def test_disjunctive_variant_spec_example(self):
        r = fm.parse_rule("x, ~x |- x & ~x")
        v = fm.disjunctive_variant(r)
        assert fm.print_rule(v) == "x | y, ~x | y |- x & ~x | y"

    def test_variant_of_premise_free(self):
        v = fm.disjunctive_variant(fm.parse_rule("|- x | ~x"))
        assert fm.print_rule(v) == "|- (x | ~x) | y"

    def test_variant_rejects_equational(self):
        r = fm.parse_rule("x ~= ~x, x |- x")
        with pytest.raises(ValueError):
            fm.disjunctive_variant(r)

    def test_variant_golden_for_adjunction(self):
        v = fm.disjunctive_variant(fm.n_adjunction(2))
        assert fm.print_rule(v) == ("x & y | u, x & z | u, y & z | u "
                                    "|- x & (y & z) | u")


class TestRuleCatalog:
    def test_adjunction_shape(self):
        r = fm.n_adjunction(2)
        assert len(r.premises) == 3 and r.nvars == 3

    def test_separating_table_complete(self):
        assert len(fm.SEPARATING_RULES) == 19
        assert fm.print_rule(fm.SEPARATING_RULES["Q7"]) == \
            "x, y |- ~x | (~y | x & y)"
        assert fm.print_rule(fm.SEPARATING_RULES["DMm1"]) == \
            "x & ~x |- y | ~y"

    def test_named_lookups(self):
        assert fm.catalog_rules("separating(Q4)") is fm.SEPARATING_RULES["Q4"]
        assert len(fm.catalog_rules("lp_axioms")) == 2
        assert len(fm.catalog_rules("cl_axioms")) == 3
        assert fm.catalog_rules("ecq(2)").nvars == 3
        assert fm.catalog_rules("kminus(1)").nvars == 3
        delta = fm.catalog_rules("protoimpl_delta")
        assert fm.print_formula(delta) == "(~x | y) & ((~x | x) & (~y | y))"

    def test_unknown_rule_name(self):
        with pytest.raises(KeyError):
            fm.catalog_rules("nonsense(3)")

    def test_ko_axiom_holds_in_kalman_products(self):
        r = fm.catalog_rules("ko_axiom")
        assert fm.rule_valid(r, mx.catalog("Pm1@Km1"))[0]
        assert fm.rule_valid(r, mx.catalog("Pm2"))[0]
        assert not fm.rule_valid(r, mx.catalog("DMm1"))[0]


class TestDualProductFailureHeuristic:
    def test_failures_combine_in_dual_products(self):
        # if a rule fails in M and another fails in N with the same
        # conclusion, their premise union fails in the dual product
        rng = random.Random(17)
        pairs = [("Pm1", "Km1"), ("BAm1", "DMm1"), ("Km1", "Km1")]

        def rand_formula(depth=0):
            k = rng.randrange(6 if depth < 2 else 1)
            if k == 0:
                return fm.var(rng.randrange(2))
            if k == 1:
                return fm.neg(rand_formula(depth + 1))
            l, r = rand_formula(depth + 1), rand_formula(depth + 1)
            return fm.conj(l, r) if k % 2 == 0 else fm.disj(l, r)

        checked = 0
        for _ in range(400):
            a, b = pairs[rng.randrange(len(pairs))]
            M, N = mx.catalog(a), mx.catalog(b)
            concl = rand_formula()
            prem1 = [rand_formula() for _ in range(rng.randrange(1, 3))]
            prem2 = [rand_formula() for _ in range(rng.randrange(1, 3))]
            r1 = fm.rule(prem1, concl)
            r2 = fm.rule(prem2, concl)
            if fm.rule_valid(r1, M)[0] or fm.rule_valid(r2, N)[0]:
                continue
            combined = fm.rule(prem1 + prem2, concl)
            assert not fm.rule_valid(combined, mx.dual_product([M, N]))[0]
            checked += 1
        assert checked >= 20
