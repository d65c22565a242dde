"""Logics presented by finite matrix families: derivability and meta-theory.

A logic is a finite list of matrices; a rule is valid iff it holds in every
generator.  Comparison of logics is tri-valued with explicit certificates:
a true verdict carries, per generator of the larger presentation, a strict
image witness of its Leibniz reduct inside a bounded product of the smaller
presentation's generators; a false verdict carries a separating rule.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, product as iproduct

from . import formulas as fm
from . import matrices as mx
from .formulas import Formula, Rule, alpha, conj, disj, neg, rule, var
from .lattice import SizeCapExceeded, build_dm1
from .matrices import LogicMatrix


@dataclass(frozen=True)
class Logic:
    """A logic determined by a non-empty finite family of matrices."""
    matrices: tuple
    name: str = ""

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("a logic needs at least one generating matrix")

    def __repr__(self):
        return f"Logic({self.name or len(self.matrices)})"


def logic(matrices, name="") -> Logic:
    return Logic(tuple(matrices), name)


def bd(n: int) -> Logic:
    return logic([mx.catalog(f"DMm{n}")], f"BD{n}")


def lp(n: int) -> Logic:
    return logic([mx.catalog(f"Pm{n}")], f"LP{n}")


def kleene(n: int) -> Logic:
    return logic([mx.catalog(f"Km{n}")], f"K{n}")


def classical(n: int) -> Logic:
    return logic([mx.catalog(f"BAm{n}")], f"CL{n}")


def kalman_order(n: int) -> Logic:
    """Generated by the dual products Pm_i (x) Km_j with i + j = n."""
    mats = []
    for i in range(n + 1):
        j = n - i
        if i == 0:
            mats.append(mx.catalog(f"Km{j}"))
        elif j == 0:
            mats.append(mx.catalog(f"Pm{i}"))
        else:
            mats.append(mx.catalog("@".join(["Pm1"] * i + ["Km1"] * j)))
    return logic(mats, f"KO{n}")


_NAMED = {
    "ETL": lambda: logic([mx.catalog("M4")], "ETL"),
    "ABF": lambda: logic([mx.catalog("Q4")], "ABF"),
    "ECQ": lambda: logic([mx.catalog("BAm1*DMm1")], "ECQ"),
    "Kminus": lambda: logic([mx.catalog("M8")], "Kminus"),
    "TRIV": lambda: logic([mx.catalog("B1")], "TRIV"),
    "TRIVminus": lambda: logic([mx.catalog("A1")], "TRIVminus"),
}


def named_logic(name: str) -> Logic:
    """BD/LP/K/KO/CL with a numeric suffix, or one of the named logics."""
    key = name.strip()
    if key in _NAMED:
        return _NAMED[key]()
    import re
    m = re.fullmatch(r"(BD|LP|KO|K|CL)(\d+)", key)
    if m:
        builder = {"BD": bd, "LP": lp, "K": kleene, "KO": kalman_order,
                   "CL": classical}[m.group(1)]
        return builder(int(m.group(2)))
    # otherwise: comma-separated catalog names
    try:
        mats = [mx.catalog(p) for p in key.split("+")]
        return logic(mats, key)
    except KeyError:
        raise KeyError(f"unknown logic {name!r}") from None


def derives(lg: Logic, premises, conclusion: Formula, eq_premises=()):
    """Does the rule hold in every generating matrix?

    Returns (bool, counterexample) where the counterexample names the
    refuting matrix and the valuation.
    """
    r = rule(premises, conclusion, eq_premises)
    for M in lg.matrices:
        ok, cv = fm.rule_valid(r, M)
        if not ok:
            return False, {"matrix": M.name or f"{M.size}-element", "valuation": cv}
    return True, None


def rule_valid_in_logic(r: Rule, lg: Logic) -> bool:
    return all(fm.rule_valid(r, M)[0] for M in lg.matrices)


_DM1_MATRIX = None


def _dm1():
    global _DM1_MATRIX
    if _DM1_MATRIX is None:
        _DM1_MATRIX = mx.catalog("DMm1")
    return _DM1_MATRIX


_DM1_ALG = None
_LEQ_CACHE: dict = {}


def formula_leq_dm1(g: Formula, f: Formula) -> bool:
    """Does g <= f hold under every valuation into the four-element algebra?

    Inequalities valid in the four-element algebra hold in all De Morgan
    lattices (it generates the variety), so this decides single-premise
    derivability over all upsets.  Memoized on the interned formula pair.
    """
    key = (g.id, f.id)
    hit = _LEQ_CACHE.get(key)
    if hit is not None:
        return hit
    global _DM1_ALG
    if _DM1_ALG is None:
        _DM1_ALG = build_dm1()
    L = _DM1_ALG
    nv = max(g.nvars, f.nvars, 1)
    out = True
    for vals in iproduct(range(4), repeat=nv):
        a = fm.eval_formula(g, vals, L)
        b = fm.eval_formula(f, vals, L)
        if L.meet[a][b] != a:
            out = False
            break
    _LEQ_CACHE[key] = out
    return out


def bd_infty_derives(premises, conclusion: Formula) -> bool:
    """Upset-logic derivability: some single premise is below the conclusion."""
    return any(formula_leq_dm1(g, conclusion) for g in premises)


_BD1_CACHE: dict = {}


def bd1_derives(premises, conclusion: Formula) -> bool:
    """Four-valued derivability (with adjunction); memoized for prover leaves."""
    key = (frozenset(p.id for p in premises), conclusion.id)
    hit = _BD1_CACHE.get(key)
    if hit is None:
        hit = fm.rule_valid(rule(premises, conclusion), _dm1())[0]
        _BD1_CACHE[key] = hit
    return hit


def bd_n_reduction_check(premises, conclusion, n: int, pool=None, max_size: int = 3):
    """Find a finite term set witnessing the n-filter reduction of a rule.

    A witness is a set Phi with every meet of at most n members derivable
    from the premises over all upsets, and the full meet below the
    conclusion.  Searches the given pool (default: subformulas plus meets of
    premise subsets) up to max_size; None means none found in the pool.
    """
    premises = list(premises)
    if pool is None:
        seen = {}
        for f in premises + [conclusion]:
            for s in fm.subformulas(f):
                seen[s.id] = s
        for k in range(1, len(premises) + 1):
            for sub in combinations(premises, k):
                m = fm.conj_all(list(sub))
                seen[m.id] = m
        pool = sorted(seen.values(), key=lambda f: f.id)
    for size in range(1, max_size + 1):
        for phi in combinations(pool, size):
            full = fm.conj_all(list(phi))
            if not bd_infty_derives([full], conclusion) \
               and not formula_leq_dm1(full, conclusion):
                continue
            ok = True
            for k in range(1, min(n, size) + 1):
                for delta in combinations(phi, k):
                    if not bd_infty_derives(premises, fm.conj_all(list(delta))):
                        ok = False
                        break
                if not ok:
                    break
            if ok and formula_leq_dm1(full, conclusion):
                return list(phi)
    return None


def _default_psi_pool(premises, conclusion):
    nv = 0
    for f in list(premises) + [conclusion]:
        nv = max(nv, f.nvars)
    return [var(i) for i in range(max(nv, 1))]


def reduction_lp(premises, conclusion, n: int, psi_pool=None, max_size: int = 3):
    """Witness psi_1..psi_k with alpha-premises making the rule n-filter valid.

    Returns the psi list or None; soundness (witness implies validity in the
    3-element-based logic) is the caller's cross-check.
    """
    pool = psi_pool or _default_psi_pool(premises, conclusion)
    target = mx.catalog(f"DMm{n}")
    for size in range(1, max_size + 1):
        for psis in combinations(pool, size):
            a = alpha(list(psis))
            prem = [a] + [conj(g, a) for g in premises]
            if fm.rule_valid(rule(prem, conclusion), target)[0]:
                return list(psis)
    return None


def reduction_k(premises, conclusion, n: int, psi_pool=None, max_size: int = 3):
    pool = psi_pool or _default_psi_pool(premises, conclusion)
    target = mx.catalog(f"DMm{n}")
    for size in range(1, max_size + 1):
        for psis in combinations(pool, size):
            a = alpha(list(psis))
            if fm.rule_valid(rule(list(premises), disj(neg(a), conclusion)),
                             target)[0]:
                return list(psis)
    return None


def reduction_cl(premises, conclusion, n: int, psi_pool=None, max_size: int = 3):
    pool = psi_pool or _default_psi_pool(premises, conclusion)
    target = mx.catalog(f"DMm{n}")
    for size in range(1, max_size + 1):
        for psis in combinations(pool, size):
            a = alpha(list(psis))
            prem = [a] + [conj(g, a) for g in premises]
            if fm.rule_valid(rule(prem, disj(neg(a), conclusion)), target)[0]:
                return list(psis)
    return None


def reduction_ko(premises, conclusion, n: int = 0, psi_pool=None, max_size: int = 3):
    """Witness (gamma, psis) for the order-logic reduction over all upsets.

    gamma is a premise with alpha(psis) & gamma below the conclusion and
    gamma below ~alpha(psis) | conclusion, both over all De Morgan lattices.
    """
    pool = psi_pool or _default_psi_pool(premises, conclusion)
    for size in range(1, max_size + 1):
        for psis in combinations(pool, size):
            a = alpha(list(psis))
            for g in premises:
                if formula_leq_dm1(conj(a, g), conclusion) \
                   and formula_leq_dm1(g, disj(neg(a), conclusion)):
                    return g, list(psis)
    return None


# ---------------------------------------------------------------------------
# logic comparison with certificates

_PRODUCT_CACHE: dict = {}
_REDUCT_CACHE: dict = {}
_HSS_CACHE: dict = {}


def _product_of(mats):
    key = tuple(M.key() for M in mats)
    hit = _PRODUCT_CACHE.get(key)
    if hit is None:
        hit = mx.direct_product(list(mats)) if len(mats) > 1 else mats[0]
        _PRODUCT_CACHE[key] = hit
    return hit


def reduct_of(M: LogicMatrix) -> LogicMatrix:
    hit = _REDUCT_CACHE.get(M.key())
    if hit is None:
        hit = mx.leibniz_reduct(M)
        _REDUCT_CACHE[M.key()] = hit
    return hit


def _hss(A: LogicMatrix, B: LogicMatrix):
    key = (A.key(), B.key())
    if key not in _HSS_CACHE:
        _HSS_CACHE[key] = mx.hss_leq(A, B)
    return _HSS_CACHE[key]


def models_certificate(N: LogicMatrix, generators, max_factors: int = 3):
    """Witness that N is a model of the logic of the generators.

    Two semantic fast paths: a totally designated matrix models every logic
    (all rules hold outright), and a matrix with nothing designated models a
    logic iff it has no theorems, witnessed by a generator element whose
    generated subalgebra avoids the designated set.  Otherwise searches for
    a strict-image witness of N's Leibniz reduct inside a product of at most
    max_factors generators.  Returns a witness or None (bounded search, so
    None is not a refutation).
    """
    full = (1 << N.size) - 1
    if N.designated == full:
        return ["<totally designated>"]
    if N.designated == 0:
        for M in generators:
            for e in range(M.size):
                sub = mx.closure_set(M.lattice, [e])
                if not any(M.is_designated(s) for s in sub):
                    return [f"<theoremless via {M.name or M.size}>"]
        # fall through: a theorem may exist, or the bounded search may
        # still find nothing; both end in None
    R = reduct_of(N)
    for j in range(1, max_factors + 1):
        for combo in combinations_with_replacement(generators, j):
            size = 1
            for M in combo:
                size *= M.size
            if size < R.size:
                continue
            try:
                P = _product_of(combo)
            except SizeCapExceeded:
                continue
            if _hss(R, P) is not None:
                return list(combo)
    return None


def _random_rule(rng: random.Random, max_vars: int = 3, max_premises: int = 3) -> Rule:
    def rand_formula(depth):
        k = rng.randrange(6 if depth < 3 else 1)
        if k == 0:
            return var(rng.randrange(max_vars))
        if k == 1:
            return neg(rand_formula(depth + 1))
        left, right = rand_formula(depth + 1), rand_formula(depth + 1)
        return conj(left, right) if k % 2 == 0 else disj(left, right)

    prem = [rand_formula(0) for _ in range(rng.randrange(max_premises + 1))]
    return rule(prem, rand_formula(0))


def default_rule_pool():
    pool = list(fm.SEPARATING_RULES.values())
    pool += [fm.disjunctive_variant(r) for r in fm.SEPARATING_RULES.values()]
    pool += [fm.n_adjunction(k) for k in (1, 2, 3)]
    pool += [fm.lem_family(k) for k in (1, 2, 3)]
    pool += [fm.ecq(k) for k in (1, 2, 3)]
    pool += [fm.kminus(k) for k in (1, 2)]
    pool += [fm.catalog_rules("disjunctive_syllogism"), fm.catalog_rules("k_axiom"),
             fm.catalog_rules("ko_axiom")]
    pool += fm.catalog_rules("lp_axioms") + fm.catalog_rules("truth_eq_rules")
    # all four two-variable clauses force a contradictory pair; separates
    # the exactly-true logic from three-valued/product intersections
    pool.append(fm.parse_rule(
        "x | y, x | ~y, ~x | y, ~x | ~y "
        "|- (x & ~x & (y | ~y)) | (y & ~y & (x | ~x))"))
    pool.append(fm.disjunctive_variant(pool[-1]))
    return pool


@dataclass
class LeqVerdict:
    verdict: str                       # "true" | "false" | "inconclusive"
    witnesses: dict = field(default_factory=dict)   # generator name -> factors
    separating_rule: Rule | None = None
    max_factors: int = 0

    def __bool__(self):
        return self.verdict == "true"


def logic_leq_bounded(l1: Logic, l2: Logic, max_factors: int = 3,
                      rule_pool=None, random_rules: int = 0,
                      seed: int = 0) -> LeqVerdict:
    """Is every rule of l1 valid in l2?  Tri-valued with certificates.

    True: every generator of l2 models l1 (strict-image witness inside a
    bounded product of l1's generators).  False: a rule valid in l1 fails in
    some generator of l2.  Otherwise inconclusive.
    """
    witnesses = {}
    missing = []
    for i, N in enumerate(l2.matrices):
        w = models_certificate(N, l1.matrices, max_factors)
        if w is None:
            missing.append(N)
        else:
            witnesses[N.name or f"gen{i}"] = [
                M if isinstance(M, str) else M.name for M in w]
    if not missing:
        return LeqVerdict("true", witnesses, None, max_factors)
    pool = list(rule_pool) if rule_pool is not None else default_rule_pool()
    if random_rules:
        rng = random.Random(seed)
        pool += [_random_rule(rng) for _ in range(random_rules)]
    for r in pool:
        try:
            if not rule_valid_in_logic(r, l1):
                continue
        except fm.VariableCapExceeded:
            continue
        for N in l2.matrices:
            if not fm.rule_valid(r, N)[0]:
                return LeqVerdict("false", witnesses, r, max_factors)
    return LeqVerdict("inconclusive", witnesses, None, max_factors)


def logics_equivalent_bounded(l1: Logic, l2: Logic, **kw):
    a = logic_leq_bounded(l1, l2, **kw)
    b = logic_leq_bounded(l2, l1, **kw)
    if a.verdict == "true" and b.verdict == "true":
        return "true", (a, b)
    if a.verdict == "false" or b.verdict == "false":
        return "false", (a, b)
    return "inconclusive", (a, b)


# ---------------------------------------------------------------------------
# bounded proof-by-cases meta-checks


def npcp_pool(n: int, var_limit: int = 4, include_context: bool = True):
    """Bounded pool of case-split instances over at most var_limit variables.

    Each instance is (context, cases, goal): cases are drawn from the unit
    formulas v, ~v, v&~v, v|~v over n+1 distinct variables, the goal is a
    fresh variable, and the context is empty or a unit over one more fresh
    variable when the variable budget allows it.
    """
    if n + 2 > var_limit:
        raise ValueError("variable limit too small for this case arity")

    def units(v):
        return [v, neg(v), conj(v, neg(v)), disj(v, neg(v))]

    case_vars = [var(i) for i in range(n + 1)]
    goal = var(n + 1)
    out = []
    for combo in iproduct(*[units(v) for v in case_vars]):
        out.append(((), tuple(combo), goal))
        if include_context and n + 3 <= var_limit:
            for ctx in units(var(n + 2)):
                out.append(((ctx,), tuple(combo), goal))
    return out


def check_npcp(lg: Logic, n: int, pool=None):
    """Check the case-split meta-rule on a bounded instance pool.

    Returns ("violation", instance-info) for a genuine counterexample or
    ("no violation in pool", count).
    """
    pool = pool if pool is not None else npcp_pool(n)
    for ctx, cases, goal in pool:
        sub_ok = True
        for i in range(len(cases)):
            others = [cases[j] for j in range(len(cases)) if j != i]
            prem = list(ctx) + [fm.disj_all(others)]
            if not derives(lg, prem, goal)[0]:
                sub_ok = False
                break
        if not sub_ok:
            continue
        full = list(ctx) + [fm.disj_all(list(cases))]
        ok, cex = derives(lg, full, goal)
        if not ok:
            return "violation", {
                "context": [fm.print_formula(c) for c in ctx],
                "cases": [fm.print_formula(c) for c in cases],
                "goal": fm.print_formula(goal),
                "counterexample": cex,
            }
    return "no violation in pool", len(pool)


# ---------------------------------------------------------------------------
# Leibniz-hierarchy checks


def protoimplication_check(lg: Logic):
    """Both defining conditions of the two-variable implication set."""
    delta = fm.catalog_rules("protoimpl_delta")
    refl = fm.substitute(delta, {1: var(0)})
    cond1 = rule_valid_in_logic(rule([], refl), lg)
    cond2 = rule_valid_in_logic(rule([var(0), delta], var(1)), lg)
    return cond1, cond2


def truth_equational_check(lg: Logic):
    """Do the two truth-equationality rules hold, and does the defining
    equation x|~x = x pin the designated sets via the Leibniz congruence?

    Returns (rules_hold, biconditional_ok_per_matrix).
    """
    r1, r2 = fm.catalog_rules("truth_eq_rules")
    holds = rule_valid_in_logic(r1, lg) and rule_valid_in_logic(r2, lg)
    report = []
    for M in lg.matrices:
        theta = mx.leibniz_congruence(M)
        L = M.lattice
        ok = all((M.is_designated(a)) ==
                 theta.relates(L.join[a][L.neg[a]], a) for a in range(M.size))
        report.append(ok)
    return holds, report
