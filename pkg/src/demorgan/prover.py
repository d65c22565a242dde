"""Bounded backward proof search for the case-split sequent calculus.

Sequents are finite premise sets with a single conclusion.  Proof leaves are
identity sequents, base-oracle-valid sequents (single-premise derivability
over all upsets by default), and substitution instances of the configured
axioms; inner nodes apply weakening-absorbed cut and the case-split rule.
Not-found results are bounded-search outcomes, never refutations.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import combinations

from . import formulas as fm
from . import logics as lg
from .formulas import Formula


@dataclass(frozen=True)
class Sequent:
    premises: tuple
    conclusion: Formula

    def key(self):
        return (frozenset(f.id for f in self.premises), self.conclusion.id)

    def __repr__(self):
        return f"Sequent({self.text()})"

    def text(self):
        left = ", ".join(fm.print_formula(p) for p in self.premises)
        return f"{left} |> {fm.print_formula(self.conclusion)}" if left \
            else f"|> {fm.print_formula(self.conclusion)}"


def sequent(premises, conclusion) -> Sequent:
    return Sequent(tuple(sorted(set(premises), key=lambda f: f.id)), conclusion)


def parse_sequent(text: str) -> Sequent:
    r = fm.parse_rule(text.replace("|>", "|-"))
    if r.eq_premises:
        raise fm.ParseError("sequents cannot carry equational premises")
    return sequent(list(r.premises), r.conclusion)


@dataclass
class CalculusConfig:
    n: int                                   # case-split arity
    axioms: tuple                            # finitary rules as axiom schemas
    base_oracle: object = None               # callable(premises, conclusion)
    max_depth: int = 8
    max_cut_formulas: int = 24
    cut_left_depth: int = 2                  # bound on the cut's left branch
    max_nodes: int = 200000                  # total search-node budget

    def __post_init__(self):
        if self.n < 1 or self.max_depth < 1:
            raise ValueError("arity and depth must be positive")
        if self.base_oracle is None:
            self.base_oracle = lg.bd_infty_derives
        self.axioms = tuple(self.axioms)


@dataclass
class Proof:
    rule: str                    # identity | oracle | axiom | cut | cases
    sequent: Sequent
    children: list = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {"rule": self.rule, "sequent": self.sequent.text(),
                "note": self.note,
                "children": [c.to_json() for c in self.children]}

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = f"{pad}{self.sequent.text()}   [{self.rule}"
        head += f": {self.note}]" if self.note else "]"
        lines = [head]
        for c in self.children:
            lines.append(c.pretty(indent + 1))
        return "\n".join(lines)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


class InvalidProof(ValueError):
    pass


def _uses_var(f: Formula, i: int) -> bool:
    if f.kind == "var":
        return f.index == i
    return (f.left is not None and _uses_var(f.left, i)) or \
        (f.right is not None and _uses_var(f.right, i))


def _tuples(pool, k):
    if k == 0:
        yield ()
        return
    for rest in _tuples(pool, k - 1):
        for p in pool:
            yield rest + (p,)


def _axiom_instances(cfg: CalculusConfig, goal: Sequent, pool_cap: int = 12,
                     instance_cap: int = 4096):
    """Substitution instances of the axioms over the goal's subformulas."""
    seen = {}
    for f in list(goal.premises) + [goal.conclusion]:
        for s in fm.subformulas(f):
            seen[s.id] = s
    pool = sorted(seen.values(), key=lambda f: f.id)
    if not pool:
        pool = [fm.var(0)]
    # variables first so the cheap instances come early
    pool.sort(key=lambda f: (f.kind != "var", f.id))
    pool = pool[:pool_cap]
    out = []
    for ax in cfg.axioms:
        k = max(ax.nvars, 1)
        for combo in _tuples(pool, k):
            mapping = dict(enumerate(combo))
            prem = tuple(fm.substitute(p, mapping) for p in ax.premises)
            out.append((sequent(prem, fm.substitute(ax.conclusion, mapping)), ax))
            if len(out) >= instance_cap:
                return out
    return out


def _cut_pool(cfg: CalculusConfig, goal: Sequent):
    """Subformulas of the goal and axiom instances, plus small disjunctions."""
    seen = {}
    for f in list(goal.premises) + [goal.conclusion]:
        for s in fm.subformulas(f):
            seen[s.id] = s
    for inst, _ in _axiom_instances(cfg, goal):
        for f in list(inst.premises) + [inst.conclusion]:
            for s in fm.subformulas(f):
                seen[s.id] = s
    base = sorted(seen.values(), key=lambda f: f.id)
    pool = list(base)
    for a, b in combinations(base, 2):
        if len(pool) >= cfg.max_cut_formulas:
            break
        pool.append(fm.disj(a, b))
    return pool[: cfg.max_cut_formulas]


def _group(parts, k):
    """Split a disjunct list into k groups (last group absorbs the tail)."""
    return parts[: k - 1] + [fm.disj_all(parts[k - 1:])]


def prove(cfg: CalculusConfig, goal: Sequent):
    """Iterative-deepening backward search; a Proof, or None within bounds."""
    axioms = _axiom_instances(cfg, goal)
    axiom_sets = [(frozenset(f.id for f in inst.premises), inst.conclusion.id,
                   fm.print_rule(ax)) for inst, ax in axioms]
    cut_pool = _cut_pool(cfg, goal)
    leaf_memo: dict = {}

    def leaf(s: Sequent):
        key = s.key()
        if key in leaf_memo:
            kind, note = leaf_memo[key]
            return Proof(kind, s, note=note) if kind else None
        out = None
        if s.conclusion in s.premises:
            out = ("identity", "")
        elif s.premises and cfg.base_oracle(list(s.premises), s.conclusion):
            out = ("oracle", "")
        else:
            ids = frozenset(f.id for f in s.premises)
            for prem_ids, concl_id, note in axiom_sets:
                if concl_id == s.conclusion.id and prem_ids <= ids:
                    out = ("axiom", note)
                    break
        leaf_memo[key] = out if out else (None, None)
        return Proof(out[0], s, note=out[1]) if out else None

    memo: dict = {}
    budget = [cfg.max_nodes]

    class _BudgetExceeded(Exception):
        pass

    def search(s: Sequent, depth: int):
        budget[0] -= 1
        if budget[0] < 0:
            raise _BudgetExceeded
        hit = leaf(s)
        if hit is not None:
            return hit
        if depth <= 0:
            return None
        key = (s.key(), depth)
        if key in memo:
            return memo[key]
        memo[key] = None
        for d in s.premises:
            parts = fm.flatten_disjuncts(d)
            if len(parts) < cfg.n + 1:
                continue
            grouped = _group(parts, cfg.n + 1)
            rest = tuple(p for p in s.premises if p is not d)
            kids = []
            for i in range(cfg.n + 1):
                others = [grouped[j] for j in range(cfg.n + 1) if j != i]
                kid = search(sequent(rest + (fm.disj_all(others),),
                                     s.conclusion), depth - 1)
                if kid is None:
                    kids = None
                    break
                kids.append(kid)
            if kids is not None:
                out = Proof("cases", s, kids, note=fm.print_formula(d))
                memo[key] = out
                return out
        # cut: the left branch is kept shallow so contexts only grow along
        # the right spine; this trades bounded completeness for tractability
        for chi in cut_pool:
            if chi in s.premises or chi is s.conclusion:
                continue
            left = search(sequent(s.premises, chi),
                          min(depth - 1, cfg.cut_left_depth))
            if left is None:
                continue
            right = search(sequent(s.premises + (chi,), s.conclusion),
                           depth - 1)
            if right is not None:
                out = Proof("cut", s, [left, right], note=fm.print_formula(chi))
                memo[key] = out
                return out
        return None

    try:
        for depth in range(1, cfg.max_depth + 1):
            memo.clear()
            result = search(goal, depth)
            if result is not None:
                return result
    except _BudgetExceeded:
        pass
    return None


def check_proof(cfg: CalculusConfig, proof: Proof) -> bool:
    """Structural re-validation of a proof tree."""
    s = proof.sequent
    if proof.rule == "identity":
        return s.conclusion in s.premises
    if proof.rule == "oracle":
        return bool(cfg.base_oracle(list(s.premises), s.conclusion))
    if proof.rule == "axiom":
        return any(inst.conclusion is s.conclusion
                   and set(inst.premises) <= set(s.premises)
                   for inst, _ in _axiom_instances(cfg, s))
    if proof.rule == "cut":
        if len(proof.children) != 2:
            return False
        left, right = proof.children
        chi = left.sequent.conclusion
        return (set(left.sequent.premises) <= set(s.premises)
                and set(right.sequent.premises) <= set(s.premises) | {chi}
                and right.sequent.conclusion is s.conclusion
                and all(check_proof(cfg, c) for c in proof.children))
    if proof.rule == "cases":
        if len(proof.children) != cfg.n + 1:
            return False
        return all(c.sequent.conclusion is s.conclusion
                   and check_proof(cfg, c) for c in proof.children)
    return False


def check_soundness(cfg: CalculusConfig, proof: Proof, matrices) -> bool:
    """Does the proved sequent, read as a rule, hold in every matrix?"""
    if not check_proof(cfg, proof):
        raise InvalidProof("proof fails structural validation")
    r = fm.rule(list(proof.sequent.premises), proof.sequent.conclusion)
    return all(fm.rule_valid(r, M)[0] for M in matrices)


def unit_formulas(var_count: int = 3):
    """Small formula pool used by the random and sweep drivers."""
    out = []
    for i in range(var_count):
        v = fm.var(i)
        out += [v, fm.neg(v), fm.conj(v, fm.neg(v)), fm.disj(v, fm.neg(v))]
    for i in range(var_count):
        for j in range(i + 1, var_count):
            a, b = fm.var(i), fm.var(j)
            out.append(fm.disj(fm.conj(a, fm.neg(a)), fm.conj(b, fm.neg(b))))
            out.append(fm.disj(a, b))
    return out


def random_proofs(cfg: CalculusConfig, count: int, seed: int = 0,
                  var_count: int = 3, max_premises: int = 3, matrices=()):
    """Prove random goals until `count` proofs are collected.

    Goals are sampled from the unit-formula pool; goals invalid in the
    supplied matrices are skipped up front (a sound calculus can never prove
    them), and valid-but-not-found-within-bounds goals are skipped too.
    Returns (proofs, attempts).
    """
    rng = random.Random(seed)
    pool = unit_formulas(var_count)
    proofs = []
    attempts = 0
    while len(proofs) < count:
        attempts += 1
        k = rng.randrange(1, max_premises + 1)
        prem = [rng.choice(pool) for _ in range(k)]
        goal = sequent(prem, rng.choice(pool))
        if matrices:
            r = fm.rule(list(goal.premises), goal.conclusion)
            if not all(fm.rule_valid(r, M)[0] for M in matrices):
                continue
        pr = prove(cfg, goal)
        if pr is not None:
            proofs.append(pr)
    return proofs, attempts


def completeness_sweep(cfg: CalculusConfig, matrices, var_count: int = 3,
                       max_premises: int = 3):
    """Try to prove every pool sequent valid in the given matrices.

    Returns (proved, missed) lists; misses are bounded-search gaps, logged
    by the caller, never hidden.
    """
    pool = unit_formulas(var_count)
    proved = []
    missed = []
    goals = []
    for k in range(1, max_premises + 1):
        for prem in combinations(pool, k):
            for concl in pool:
                goals.append(sequent(list(prem), concl))
    for goal in goals:
        r = fm.rule(list(goal.premises), goal.conclusion)
        if not all(fm.rule_valid(r, M)[0] for M in matrices):
            continue
        pr = prove(cfg, goal)
        (proved if pr is not None else missed).append(goal)
    return proved, missed


def proof_to_json(proof: Proof) -> str:
    return json.dumps(proof.to_json(), indent=1)
