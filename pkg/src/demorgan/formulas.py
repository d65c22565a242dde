"""Formula ASTs, rules, parsing/printing, and exhaustive matrix validity.

Formulas are hash-consed: structurally equal terms are the same object, so
subterm sharing is free and evaluation can memoize on object identity.
Rule validity sweeps every valuation with numpy table lookups over the
full valuation grid (the scalar evaluator is kept as the test oracle).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .lattice import FiniteLattice
from .matrices import LogicMatrix

VAR_CAP = 7
_GRID_VARS = 5          # full numpy grid up to this many variables
_NAMES = ("x", "y", "z", "u", "v", "w")


class Formula:
    """Interned AST node: var / neg / and / or / top / bot."""

    __slots__ = ("kind", "left", "right", "index", "id", "nvars")
    _interned: dict = {}
    _next_id = 0

    def __new__(cls, kind, left=None, right=None, index=None):
        key = (kind, id(left) if left is not None else None,
               id(right) if right is not None else None, index)
        hit = cls._interned.get(key)
        if hit is not None:
            return hit
        self = object.__new__(cls)
        self.kind = kind
        self.left = left
        self.right = right
        self.index = index
        self.id = cls._next_id
        cls._next_id += 1
        nv = 0
        if kind == "var":
            nv = index + 1
        if left is not None:
            nv = max(nv, left.nvars)
        if right is not None:
            nv = max(nv, right.nvars)
        self.nvars = nv
        cls._interned[key] = self
        return self

    def __repr__(self):
        return f"Formula({print_formula(self)})"

    def __lt__(self, other):
        return self.id < other.id


def var(i: int) -> Formula:
    if i < 0:
        raise ValueError("variable index must be >= 0")
    return Formula("var", index=i)


def neg(f: Formula) -> Formula:
    return Formula("neg", left=f)


def conj(f: Formula, g: Formula) -> Formula:
    return Formula("and", left=f, right=g)


def disj(f: Formula, g: Formula) -> Formula:
    return Formula("or", left=f, right=g)


def top() -> Formula:
    return Formula("top")


def bot() -> Formula:
    return Formula("bot")


def conj_all(fs) -> Formula:
    fs = list(fs)
    if not fs:
        raise ValueError("empty conjunction")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = conj(f, out)
    return out


def disj_all(fs) -> Formula:
    fs = list(fs)
    if not fs:
        raise ValueError("empty disjunction")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = disj(f, out)
    return out


def subformulas(f: Formula):
    """Postorder list of distinct subterms."""
    seen = {}

    def walk(g):
        if g.id in seen:
            return
        if g.left is not None:
            walk(g.left)
        if g.right is not None:
            walk(g.right)
        seen[g.id] = g

    walk(f)
    return list(seen.values())


def flatten_disjuncts(f: Formula):
    if f.kind == "or":
        return flatten_disjuncts(f.left) + flatten_disjuncts(f.right)
    return [f]


def substitute(f: Formula, mapping) -> Formula:
    """mapping: var index -> Formula."""
    if f.kind == "var":
        return mapping.get(f.index, f)
    if f.kind == "neg":
        return neg(substitute(f.left, mapping))
    if f.kind == "and":
        return conj(substitute(f.left, mapping), substitute(f.right, mapping))
    if f.kind == "or":
        return disj(substitute(f.left, mapping), substitute(f.right, mapping))
    return f


# ---------------------------------------------------------------------------
# printing and parsing: ~ binds tightest, then &, then |.


def var_name(i: int) -> str:
    return _NAMES[i] if i < len(_NAMES) else f"x{i + 1}"


def print_formula(f: Formula, prec: int = 0) -> str:
    if f.kind == "var":
        return var_name(f.index)
    if f.kind == "top":
        return "T"
    if f.kind == "bot":
        return "F"
    if f.kind == "neg":
        inner = print_formula(f.left, 3)
        return f"~{inner}"
    if f.kind == "and":
        s = f"{print_formula(f.left, 2)} & {print_formula(f.right, 2)}"
        return f"({s})" if prec > 1 else s
    s = f"{print_formula(f.left, 1)} | {print_formula(f.right, 1)}"
    return f"({s})" if prec > 0 else s


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*([A-Za-z]\w*|[~&|()]|\|-|~=|,)")


class _Parser:
    def __init__(self, text: str, allow_constants: bool = True):
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            # longest-match scan for multi-char tokens first
            chunk = text[pos:]
            m = re.match(r"\s+", chunk)
            if m:
                pos += m.end()
                continue
            for pat in ("|-", "~=", None):
                if pat and chunk.startswith(pat):
                    self.tokens.append(pat)
                    pos += len(pat)
                    break
            else:
                m = re.match(r"[A-Za-z]\w*", chunk)
                if m:
                    self.tokens.append(m.group(0))
                    pos += m.end()
                elif chunk[0] in "~&|(),":
                    self.tokens.append(chunk[0])
                    pos += 1
                else:
                    raise ParseError(f"bad character {chunk[0]!r}")
        self.i = 0
        self.allow_constants = allow_constants

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def eat(self, tok=None):
        got = self.peek()
        if got is None or (tok is not None and got != tok):
            raise ParseError(f"expected {tok!r}, got {got!r}")
        self.i += 1
        return got

    def formula(self) -> Formula:
        return self._or()

    def _or(self):
        f = self._and()
        while self.peek() == "|":
            self.eat("|")
            f = disj(f, self._and())
        return f

    def _and(self):
        f = self._unary()
        while self.peek() == "&":
            self.eat("&")
            f = conj(f, self._unary())
        return f

    def _unary(self):
        t = self.peek()
        if t == "~":
            self.eat("~")
            return neg(self._unary())
        if t == "(":
            self.eat("(")
            f = self._or()
            self.eat(")")
            return f
        if t is None:
            raise ParseError("unexpected end of input")
        self.eat()
        if t in ("T", "TOP"):
            if not self.allow_constants:
                raise ParseError("constants disabled")
            return top()
        if t in ("F", "BOT"):
            if not self.allow_constants:
                raise ParseError("constants disabled")
            return bot()
        m = re.fullmatch(r"x(\d+)", t)
        if m:
            return var(int(m.group(1)) - 1)
        if t in _NAMES:
            return var(_NAMES.index(t))
        raise ParseError(f"unknown variable name {t!r}")


def parse_formula(text: str, allow_constants: bool = True) -> Formula:
    p = _Parser(text, allow_constants)
    f = p.formula()
    if p.peek() is not None:
        raise ParseError(f"trailing input at {p.peek()!r}")
    return f


@dataclass(frozen=True)
class Rule:
    """A finitary rule: premises |- conclusion, optionally with equational premises."""
    premises: tuple
    conclusion: Formula
    eq_premises: tuple = ()
    name: str = ""

    @property
    def nvars(self) -> int:
        nv = self.conclusion.nvars
        for p in self.premises:
            nv = max(nv, p.nvars)
        for l, r in self.eq_premises:
            nv = max(nv, l.nvars, r.nvars)
        return nv

    def __repr__(self):
        return f"Rule({print_rule(self)})"


def rule(premises, conclusion, eq_premises=(), name="") -> Rule:
    prem = tuple(sorted(set(premises), key=lambda f: f.id))
    eqs = tuple(sorted({(l, r) for l, r in eq_premises},
                       key=lambda p: (p[0].id, p[1].id)))
    return Rule(prem, conclusion, eqs, name)


def print_rule(r: Rule) -> str:
    parts = [f"{print_formula(l)} ~= {print_formula(rr)}" for l, rr in r.eq_premises]
    parts += [print_formula(p) for p in r.premises]
    left = ", ".join(parts)
    return f"{left} |- {print_formula(r.conclusion)}" if left \
        else f"|- {print_formula(r.conclusion)}"


def parse_rule(text: str) -> Rule:
    if "|-" not in text:
        raise ParseError("a rule needs '|-'")
    left, right = text.split("|-", 1)
    conclusion = parse_formula(right)
    premises = []
    eqs = []
    left = left.strip()
    if left:
        for chunk in _split_top_level(left):
            if "~=" in chunk:
                l, r = chunk.split("~=", 1)
                eqs.append((parse_formula(l), parse_formula(r)))
            else:
                premises.append(parse_formula(chunk))
    return rule(premises, conclusion, eqs)


def _split_top_level(text: str):
    depth = 0
    out = []
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    return [c for c in (s.strip() for s in out) if c]


# ---------------------------------------------------------------------------
# evaluation


def eval_formula(f: Formula, valuation, L: FiniteLattice) -> int:
    """Homomorphic extension of a valuation (scalar; the oracle evaluator)."""
    if f.kind == "var":
        if f.index >= len(valuation) or valuation[f.index] is None:
            raise ValueError(f"valuation misses variable {var_name(f.index)}")
        return valuation[f.index]
    if f.kind == "neg":
        return L.neg[eval_formula(f.left, valuation, L)]
    if f.kind == "and":
        return L.meet[eval_formula(f.left, valuation, L)][
            eval_formula(f.right, valuation, L)]
    if f.kind == "or":
        return L.join[eval_formula(f.left, valuation, L)][
            eval_formula(f.right, valuation, L)]
    if f.kind == "top":
        if L.top is None:
            raise ValueError("lattice has no top")
        return L.top
    if L.bottom is None:
        raise ValueError("lattice has no bottom")
    return L.bottom


class VariableCapExceeded(ValueError):
    pass


def _grid_eval(formulas, L: FiniteLattice, grid_vars: int, fixed: dict):
    """Evaluate formulas over all valuations of variables < grid_vars.

    fixed maps variable indices >= grid_vars to concrete elements.  Returns
    a dict formula-id -> int array of length size**grid_vars.
    """
    m = L.size
    total = m ** grid_vars
    meet_t = np.asarray(L.meet, dtype=np.int16)
    join_t = np.asarray(L.join, dtype=np.int16)
    neg_t = np.asarray(L.neg, dtype=np.int16)
    cache: dict[int, np.ndarray] = {}
    post = []
    seen = set()

    def collect(f):
        if f.id in seen:
            return
        if f.left is not None:
            collect(f.left)
        if f.right is not None:
            collect(f.right)
        seen.add(f.id)
        post.append(f)

    for f in formulas:
        collect(f)
    for f in post:
        if f.kind == "var":
            if f.index < grid_vars:
                reps = m ** (grid_vars - 1 - f.index)
                tiles = m ** f.index
                arr = np.tile(np.repeat(np.arange(m, dtype=np.int16), reps), tiles)
            else:
                arr = np.full(total, fixed[f.index], dtype=np.int16)
        elif f.kind == "neg":
            arr = neg_t[cache[f.left.id]]
        elif f.kind == "and":
            arr = meet_t[cache[f.left.id], cache[f.right.id]]
        elif f.kind == "or":
            arr = join_t[cache[f.left.id], cache[f.right.id]]
        elif f.kind == "top":
            arr = np.full(total, L.top, dtype=np.int16)
        else:
            arr = np.full(total, L.bottom, dtype=np.int16)
        cache[f.id] = arr
    return cache


def rule_valid(r: Rule, M: LogicMatrix, var_cap: int = VAR_CAP):
    """Exhaustive validity over all valuations; returns (bool, countervaluation).

    A countervaluation is a dict variable-name -> element label satisfying
    the equational premises, designating every premise, and missing the
    conclusion.
    """
    nv = max(r.nvars, 1)
    if nv > var_cap:
        raise VariableCapExceeded(f"{nv} variables exceeds cap {var_cap}")
    L = M.lattice
    m = L.size
    des = np.zeros(m, dtype=bool)
    for e in range(m):
        if M.is_designated(e):
            des[e] = True
    formulas = list(r.premises) + [r.conclusion]
    for l, rr in r.eq_premises:
        formulas += [l, rr]
    gv = min(nv, _GRID_VARS)
    outer = nv - gv

    def check_block(fixed):
        cache = _grid_eval(formulas, L, gv, fixed)
        ok = np.ones(m ** gv, dtype=bool)
        for l, rr in r.eq_premises:
            ok &= cache[l.id] == cache[rr.id]
        for p in r.premises:
            ok &= des[cache[p.id]]
        bad = ok & ~des[cache[r.conclusion.id]]
        idx = np.flatnonzero(bad)
        if idx.size:
            return int(idx[0])
        return None

    from itertools import product as iproduct
    for outer_vals in iproduct(range(m), repeat=outer):
        fixed = {gv + i: v for i, v in enumerate(outer_vals)}
        hit = check_block(fixed)
        if hit is not None:
            assignment = {}
            rem = hit
            for j in range(gv - 1, -1, -1):
                assignment[j] = rem % m
                rem //= m
            assignment.update(fixed)
            cv = {var_name(i): L.labels[assignment[i]] for i in range(nv)}
            return False, cv
    return True, None


def valuation_from_labels(L: FiniteLattice, cv: dict):
    lab = {l: i for i, l in enumerate(L.labels)}
    nv = max(_NAMES.index(k) if k in _NAMES else int(k[1:]) - 1 for k in cv) + 1
    out = [None] * nv
    for k, v in cv.items():
        i = _NAMES.index(k) if k in _NAMES else int(k[1:]) - 1
        out[i] = lab[v]
    return out


# ---------------------------------------------------------------------------
# rule transforms and the named rule catalog


def disjunctive_variant(r: Rule) -> Rule:
    """Append a fresh disjunct to every premise and the conclusion."""
    if r.eq_premises:
        raise ValueError("disjunctive variant undefined with equational premises")
    x = var(r.nvars)
    return rule([disj(p, x) for p in r.premises], disj(r.conclusion, x),
                name=f"{r.name}-disj" if r.name else "")


def alpha(psis) -> Formula:
    """Right-nested conjunction of (psi | ~psi) over the given formulas."""
    psis = list(psis)
    if not psis:
        raise ValueError("alpha needs at least one formula")
    return conj_all([disj(p, neg(p)) for p in psis])


def n_adjunction(n: int) -> Rule:
    """From the n+1 submeets omitting one variable each, infer the full meet."""
    if n < 1:
        raise ValueError("n must be >= 1")
    xs = [var(i) for i in range(n + 1)]
    prem = [conj_all([xs[j] for j in range(n + 1) if j != i])
            for i in range(n + 1)]
    return rule(prem, conj_all(xs), name=f"{n}-adjunction")


def lem_family(k: int) -> Rule:
    """|- (x1|~x1) & ... & (xk|~xk)."""
    return rule([], alpha([var(i) for i in range(k)]), name=f"lem({k})")


def ecq(k: int) -> Rule:
    """(x1&~x1) | ... | (xk&~xk) |- y."""
    xs = [var(i) for i in range(k)]
    return rule([disj_all([conj(x, neg(x)) for x in xs])], var(k),
                name=f"ecq({k})")


def kminus(k: int) -> Rule:
    """(x1&~x1)|...|(xk&~xk)|y, ~y|z |- z."""
    xs = [var(i) for i in range(k)]
    y, z = var(k), var(k + 1)
    return rule([disj_all([conj(x, neg(x)) for x in xs] + [y]),
                 disj(neg(y), z)], z, name=f"kminus({k})")


_x, _y, _z, _u = var(0), var(1), var(2), var(3)

SEPARATING_RULES = {
    "BAm1": rule([_x], _y),
    "A1": rule([], disj(_x, neg(_x))),
    "Km1": rule([_x], disj(_y, neg(_y))),
    "Pm1": rule([conj(_x, neg(_x))], _y),
    "DMm1": rule([conj(_x, neg(_x))], disj(_y, neg(_y))),
    "Q4": rule([conj(_x, neg(_x)), conj(_y, neg(_y))],
               conj(disj(_x, neg(_x)), disj(_y, neg(_y)))),
    "Q7": rule([_x, _y], disj_all([neg(_x), neg(_y), conj(_x, _y)])),
    "Q8": rule([conj(_x, neg(_x)), _y], disj(conj(_x, _y), neg(_y))),
    "Q9": rule([conj_all([_x, neg(_x), _z]), conj(_y, neg(_y))],
               conj(disj_all([_x, neg(_x), _z]),
                    disj_all([_y, neg(_y), neg(_z)]))),
    "BAm1@BAm1": rule([_x, neg(_x)], conj(_x, neg(_x))),
    "BAm1@Pm1": rule([conj(_x, neg(_x)), _y, neg(_y)], conj(_y, neg(_y))),
    "BAm1@Km1": rule([_x, neg(_x), disj(_y, neg(_y))],
                     conj(_x, disj_all([neg(_x), _y, neg(_y)]))),
    "BAm1@DMm1": rule([conj(_x, _y), disj(_x, neg(_x)), conj(_y, neg(_y))],
                      conj_all([disj(_x, neg(_x)), _y, neg(_y)])),
    "Km1@Km1": rule([conj(_x, _z), conj(_y, neg(_z))],
                    disj(conj(_x, _y), neg(conj(_x, _y)))),
    "Km1@Pm1": rule([_x, conj_all([neg(_x), _y, neg(_y)])],
                    conj(_x, disj(_y, neg(_y)))),
    "Km1@DMm1": rule([conj(_x, _z), conj_all([_y, neg(_y), neg(_z)])],
                     conj(disj(_x, neg(_x)), disj(_y, neg(_y)))),
    "Pm1@Pm1": rule([conj(_x, _y), conj(_x, neg(_x)), conj(_y, neg(_y))],
                    conj_all([_x, neg(_x), _y, neg(_y)])),
    "Pm1@DMm1": rule([conj_all([_x, neg(_x), _y]),
                      conj_all([_y, neg(_y), _z, neg(_z)])],
                     conj(disj(_x, neg(_x)), _z)),
    "DMm1@DMm1": rule([conj_all([_x, neg(_x), _z, neg(_z)]),
                       conj_all([_y, neg(_y), _z, neg(_z)])],
                      conj(disj(_x, neg(_x)), disj(_y, neg(_y)))),
}


def catalog_rules(name: str):
    """Named rules: single Rule, or a list for the *_axioms entries."""
    key = name.replace("⊗", "@").replace(" ", "")
    m = re.fullmatch(r"n_adjunction\((\d+)\)", key)
    if m:
        return n_adjunction(int(m.group(1)))
    m = re.fullmatch(r"ecq\((\d+)\)", key)
    if m:
        return ecq(int(m.group(1)))
    m = re.fullmatch(r"kminus\((\d+)\)", key)
    if m:
        return kminus(int(m.group(1)))
    m = re.fullmatch(r"lem\((\d+)\)", key)
    if m:
        return lem_family(int(m.group(1)))
    m = re.fullmatch(r"separating\((.+)\)", key)
    if m:
        return SEPARATING_RULES[m.group(1)]
    if key == "lem":
        return rule([], disj(_x, neg(_x)), name="lem")
    if key == "lp_axioms":
        return [rule([], disj(_x, neg(_x)), name="lem"),
                rule([_x], conj(_x, disj(_y, neg(_y))), name="lp-2")]
    if key == "k_axiom":
        return rule([disj(conj(_x, neg(_x)), _y)], _y, name="k")
    if key == "ko_axiom":
        return rule([disj(conj(conj(_x, neg(_x)), _z), _u)],
                    disj(conj(disj(_y, neg(_y)), _z), _u), name="ko")
    if key == "cl_axioms":
        return catalog_rules("lp_axioms") + [catalog_rules("k_axiom")]
    if key == "disjunctive_syllogism":
        return rule([_x, disj(neg(_x), _y)], _y, name="ds")
    if key == "truth_eq_rules":
        return [rule([], disj(_x, neg(_x)), name="lem"),
                rule([_x, disj(conj(disj(_x, neg(_x)), _y), _z)],
                     disj(conj(_x, _y), _z), name="truth-eq")]
    if key == "protoimpl_delta":
        return conj_all([disj(neg(_x), _y), disj(neg(_x), _x), disj(neg(_y), _y)])
    if key == "weak_splitting_rules":
        return [SEPARATING_RULES["DMm1"], SEPARATING_RULES["A1"],
                SEPARATING_RULES["Km1"], SEPARATING_RULES["Pm1"]]
    raise KeyError(f"unknown rule name {name!r}")
