"""Lattice core: builders, validation, duality, free algebra, congruences."""

import itertools
import random

import pytest

from demorgan import lattice as lat


def labels_of(L, elems):
    return sorted(L.labels[e] for e in elems)


class TestValidation:
    def test_dm1_valid(self):
        assert lat.validate_lattice(lat.build_dm1()) == []

    def test_one_element_valid(self):
        L = lat.FiniteLattice([[0]], [[0]], [0])
        assert lat.validate_lattice(L) == []

    def test_broken_negation_reported(self):
        dm1 = lat.build_dm1()
        neg = list(dm1.neg)
        neg[3] = 3  # make negation fix the top
        L = lat.FiniteLattice(dm1.meet, dm1.join, neg)
        report = lat.validate_lattice(L)
        assert report
        assert any("involution" in v or "~(" in v for v in report)

    def test_malformed_tables_distinct_error(self):
        with pytest.raises(lat.MalformedTable):
            lat.FiniteLattice([[0, 1]], [[0]], [0])
        with pytest.raises(lat.MalformedTable):
            lat.FiniteLattice([[5]], [[0]], [0])


class TestBuilders:
    def test_dm1_tables(self):
        L = lat.build_dm1()
        f, n, b, t = range(4)
        assert L.meet[n][b] == f
        assert L.join[n][b] == t
        assert L.neg[L.neg[n]] == n
        assert L.labels == ("f", "n", "b", "t")

    def test_boolean_chain(self):
        L = lat.build_boolean(1)
        assert L.size == 2
        assert L.neg[1] == 0 and L.labels[1] == "t"

    def test_boolean_two_atoms_complement(self):
        L = lat.build_boolean(2)
        assert L.size == 4
        a, b = 1, 2
        assert L.neg[a] == b and L.neg[b] == a

    def test_boolean_rejects_zero_atoms(self):
        with pytest.raises(ValueError):
            lat.build_boolean(0)

    def test_boolean_size_cap(self, monkeypatch):
        monkeypatch.setenv("WORKBENCH_SIZE_CAP", "8")
        with pytest.raises(lat.SizeCapExceeded):
            lat.build_boolean(4)

    def test_product_square(self):
        dm1 = lat.build_dm1()
        P = lat.product([dm1, dm1])
        assert P.size == 16
        assert lat.validate_lattice(P) == []
        assert "," in P.labels[0]

    def test_product_unary_is_copy(self):
        dm1 = lat.build_dm1()
        P = lat.product([dm1])
        assert P.size == dm1.size and P.meet == dm1.meet

    def test_product_empty_rejected(self):
        with pytest.raises(ValueError):
            lat.product([])

    def test_product_of_chains_isomorphic_to_square(self):
        from demorgan import matrices as mx
        P = lat.product([lat.build_boolean(1), lat.build_boolean(1)])
        assert mx.lattices_isomorphic(P, lat.build_boolean(2))


class TestOrderDual:
    def test_dual_swaps_meet(self):
        dm1 = lat.build_dm1()
        D = lat.order_dual(dm1)
        n, b = 1, 2
        assert D.meet[n][b] == 3  # the old join
        assert lat.validate_lattice(D) == []

    def test_double_dual_identity(self):
        for L in (lat.build_dm1(), lat.build_boolean(2),
                  lat.build_chain_kleene()):
            assert lat.order_dual(lat.order_dual(L)) == L

    def test_chain_self_dual(self):
        from demorgan import matrices as mx
        L = lat.build_boolean(1)
        assert mx.lattices_isomorphic(L, lat.order_dual(L))


class TestFreeDeMorgan:
    def test_one_generator_four_elements(self):
        L, gens = lat.free_de_morgan(1)
        assert L.size == 4
        (g,) = gens
        elems = {g, L.neg[g], L.meet[g][L.neg[g]], L.join[g][L.neg[g]]}
        assert len(elems) == 4

    def test_zero_generators_rejected(self):
        with pytest.raises(ValueError):
            lat.free_de_morgan(0)

    def test_bound_enforced(self):
        with pytest.raises(ValueError):
            lat.free_de_morgan(3)

    def test_generator_assignment_decides_inequalities(self):
        # an inequality holds under the generator assignment iff it holds
        # under every valuation into the four-element algebra
        from demorgan import formulas as fm
        L, gens = lat.free_de_morgan(2)
        dm1 = lat.build_dm1()
        rng = random.Random(11)

        def rand_formula(depth=0):
            k = rng.randrange(6 if depth < 3 else 1)
            if k == 0:
                return fm.var(rng.randrange(2))
            if k == 1:
                return fm.neg(rand_formula(depth + 1))
            l, r = rand_formula(depth + 1), rand_formula(depth + 1)
            return fm.conj(l, r) if k % 2 == 0 else fm.disj(l, r)

        for _ in range(1000):
            a, b = rand_formula(), rand_formula()
            va = fm.eval_formula(a, gens, L)
            vb = fm.eval_formula(b, gens, L)
            free_leq = L.meet[va][vb] == va
            all_leq = all(
                dm1.meet[fm.eval_formula(a, v, dm1)][fm.eval_formula(b, v, dm1)]
                == fm.eval_formula(a, v, dm1)
                for v in itertools.product(range(4), repeat=2))
            assert free_leq == all_leq

    def test_contraction_inequality_holds(self):
        # x & ~x <= x | ~x holds in every De Morgan lattice
        L, (g,) = lat.free_de_morgan(1)
        lo = L.meet[g][L.neg[g]]
        hi = L.join[g][L.neg[g]]
        assert L.meet[lo][hi] == lo


class TestCongruences:
    def test_theta_kleene_dm1_total(self):
        dm1 = lat.build_dm1()
        theta = lat.theta_kleene(dm1)
        assert len(theta.blocks) == 1

    def test_theta_boolean_boolean_identity(self):
        for atoms in (1, 2, 3):
            L = lat.build_boolean(atoms)
            assert lat.theta_boolean(L).is_identity()

    def test_theta_kleene_kleene_identity(self):
        assert lat.theta_kleene(lat.build_chain_kleene()).is_identity()

    @pytest.mark.parametrize("build", [
        lat.build_dm1, lat.build_chain_kleene,
        lambda: lat.build_boolean(2),
        lambda: lat.product([lat.build_dm1(), lat.build_boolean(1)]),
    ])
    def test_theta_matches_bruteforce_minimum(self, build):
        L = build()
        congs = lat.all_congruences(L)
        for theta_fn, pred in ((lat.theta_kleene, lat.is_kleene),
                               (lat.theta_boolean, lat.is_boolean)):
            theta = theta_fn(L)
            Q, _ = lat.quotient(L, theta)
            assert pred(Q)
            good = [c for c in congs if pred(lat.quotient(L, c)[0])]
            for a in range(L.size):
                for b in range(L.size):
                    assert theta.relates(a, b) == all(
                        c.relates(a, b) for c in good)

    def test_quotient_by_identity_is_copy(self):
        L = lat.build_dm1()
        theta = lat.Congruence(L, list(range(L.size)))
        Q, proj = lat.quotient(L, theta)
        assert Q.size == L.size and proj == list(range(L.size))

    def test_quotient_by_total_is_point(self):
        L = lat.build_dm1()
        theta = lat.Congruence(L, [0] * L.size)
        Q, _ = lat.quotient(L, theta)
        assert Q.size == 1

    def test_quotient_dm1_boolean(self):
        L = lat.build_dm1()
        Q, _ = lat.quotient(L, lat.theta_boolean(L))
        assert lat.is_boolean(Q)

    def test_kleene_quotient_is_kleene_everywhere(self):
        for L in (lat.build_dm1(), lat.product([lat.build_dm1(),
                                                lat.build_chain_kleene()])):
            Q, _ = lat.quotient(L, lat.theta_kleene(L))
            assert lat.is_kleene(Q)
            assert lat.validate_lattice(Q) == []

    def test_bad_partition_rejected(self):
        L = lat.build_dm1()
        with pytest.raises(lat.NotACongruence):
            lat.Congruence(L, [0, 0, 1, 2])  # collapse f with n


class TestFComp:
    def test_dm1_total(self):
        L = lat.build_dm1()
        assert lat.f_comp_filter(L) == (1 << L.size) - 1

    def test_boolean_top_only(self):
        L = lat.build_boolean(2)
        assert lat.f_comp_filter(L) == 1 << 3

    def test_kleene_chain(self):
        L = lat.build_chain_kleene()
        assert lat.f_comp_filter(L) == (1 << 1) | (1 << 2)  # {n, t}


class TestJsonAndDot:
    def test_round_trip(self):
        L = lat.build_dm1()
        data = L.to_json()
        L2 = lat.FiniteLattice.from_json(data)
        assert L == L2 and L2.to_json() == data

    def test_dot_contains_covers(self):
        L = lat.build_dm1()
        dot = lat.lattice_hasse_dot(L, {3})
        assert "n0 -- n1" in dot or "n0 -- n2" in dot
        assert "fillcolor=black" in dot
