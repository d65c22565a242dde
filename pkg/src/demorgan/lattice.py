"""Finite De Morgan lattices given by explicit meet/join/negation tables.

Elements are dense integer indices 0..size-1; every operation is a flat
table lookup, so the exhaustive loops that dominate this package stay
cache-friendly.  All values are immutable after construction.
"""

from __future__ import annotations

import os
from itertools import combinations, product as iproduct

DEFAULT_SIZE_CAP = 256


def size_cap() -> int:
    """Current lattice size cap (override with WORKBENCH_SIZE_CAP)."""
    return int(os.environ.get("WORKBENCH_SIZE_CAP", DEFAULT_SIZE_CAP))


class MalformedTable(ValueError):
    """Operation tables are structurally broken (shape or index range)."""


class SizeCapExceeded(ValueError):
    """A construction would exceed the configured size cap."""


class NotACongruence(ValueError):
    """A partition is not compatible with the lattice operations."""


class FiniteLattice:
    """A finite De Morgan lattice: meet/join tables plus an involution.

    The tables are not re-validated on every construction; builders in this
    module produce valid lattices and ``validate_lattice`` reports axiom
    violations for arbitrary tables.
    """

    __slots__ = ("size", "meet", "join", "neg", "labels", "up", "down",
                 "bottom", "top", "_covers")

    def __init__(self, meet, join, neg, labels=None):
        n = len(neg)
        if n == 0:
            raise MalformedTable("empty lattice")
        if len(meet) != n or len(join) != n:
            raise MalformedTable("table sizes disagree")
        for row in list(meet) + list(join):
            if len(row) != n or any(not (0 <= v < n) for v in row):
                raise MalformedTable("table entry out of range")
        if any(not (0 <= v < n) for v in neg):
            raise MalformedTable("negation entry out of range")
        if labels is not None and len(labels) != n:
            raise MalformedTable("label count disagrees with size")
        self.size = n
        self.meet = tuple(tuple(row) for row in meet)
        self.join = tuple(tuple(row) for row in join)
        self.neg = tuple(neg)
        self.labels = tuple(labels) if labels else tuple(str(i) for i in range(n))
        # up[i] = bitmask of elements >= i, down[i] = bitmask of elements <= i
        up = []
        down = []
        for i in range(n):
            u = d = 0
            for j in range(n):
                if self.meet[i][j] == i:
                    u |= 1 << j
                if self.meet[i][j] == j:
                    d |= 1 << j
            up.append(u)
            down.append(d)
        self.up = tuple(up)
        self.down = tuple(down)
        full = (1 << n) - 1
        bots = [i for i in range(n) if up[i] == full]
        tops = [i for i in range(n) if down[i] == full]
        self.bottom = bots[0] if bots else None
        self.top = tops[0] if tops else None
        self._covers = None

    def leq(self, a: int, b: int) -> bool:
        return self.meet[a][b] == a

    def meet_of(self, elems) -> int:
        it = iter(elems)
        acc = next(it)
        for x in it:
            acc = self.meet[acc][x]
        return acc

    def join_of(self, elems) -> int:
        it = iter(elems)
        acc = next(it)
        for x in it:
            acc = self.join[acc][x]
        return acc

    def covers(self):
        """List of (a, b) cover pairs: b covers a."""
        if self._covers is None:
            out = []
            for a in range(self.size):
                above = [b for b in range(self.size) if b != a and self.leq(a, b)]
                for b in above:
                    if not any(c != b and self.leq(c, b) for c in above):
                        out.append((a, b))
            self._covers = tuple(out)
        return self._covers

    def height(self, a: int) -> int:
        return bin(self.down[a]).count("1") - 1

    def key(self):
        """Hashable identity of the tables (labels excluded)."""
        return (self.meet, self.neg)

    def __eq__(self, other):
        return isinstance(other, FiniteLattice) and self.meet == other.meet \
            and self.join == other.join and self.neg == other.neg

    def __hash__(self):
        return hash((self.meet, self.neg))

    def __repr__(self):
        return f"FiniteLattice(size={self.size})"

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "meet": [list(r) for r in self.meet],
            "join": [list(r) for r in self.join],
            "neg": list(self.neg),
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteLattice":
        return cls(data["meet"], data["join"], data["neg"], data.get("labels"))


def validate_lattice(L: FiniteLattice):
    """Check every De Morgan lattice axiom on the tables.

    Returns a list of violation strings naming the axiom and witness
    elements; empty iff the tables describe a De Morgan lattice.
    Structural problems raise MalformedTable (from the constructor).
    """
    out = []
    n = L.size
    lab = L.labels
    meet, join, neg = L.meet, L.join, L.neg
    for a in range(n):
        if meet[a][a] != a:
            out.append(f"meet not idempotent at {lab[a]}")
        if join[a][a] != a:
            out.append(f"join not idempotent at {lab[a]}")
        if neg[neg[a]] != a:
            out.append(f"negation not an involution at {lab[a]}")
    for a in range(n):
        for b in range(n):
            if meet[a][b] != meet[b][a]:
                out.append(f"meet not commutative at ({lab[a]},{lab[b]})")
            if join[a][b] != join[b][a]:
                out.append(f"join not commutative at ({lab[a]},{lab[b]})")
            if meet[a][join[a][b]] != a:
                out.append(f"absorption a&(a|b) fails at ({lab[a]},{lab[b]})")
            if join[a][meet[a][b]] != a:
                out.append(f"absorption a|(a&b) fails at ({lab[a]},{lab[b]})")
            if neg[join[a][b]] != meet[neg[a]][neg[b]]:
                out.append(f"~(a|b) = ~a & ~b fails at ({lab[a]},{lab[b]})")
            if neg[meet[a][b]] != join[neg[a]][neg[b]]:
                out.append(f"~(a&b) = ~a | ~b fails at ({lab[a]},{lab[b]})")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if meet[meet[a][b]][c] != meet[a][meet[b][c]]:
                    out.append(
                        f"meet not associative at ({lab[a]},{lab[b]},{lab[c]})")
                if join[join[a][b]][c] != join[a][join[b][c]]:
                    out.append(
                        f"join not associative at ({lab[a]},{lab[b]},{lab[c]})")
                if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]]:
                    out.append(
                        f"distributivity fails at ({lab[a]},{lab[b]},{lab[c]})")
    return out


def _checked(meet, join, neg, labels=None) -> FiniteLattice:
    L = FiniteLattice(meet, join, neg, labels)
    bad = validate_lattice(L)
    assert not bad, f"builder produced invalid lattice: {bad[:3]}"
    return L


def build_dm1() -> FiniteLattice:
    """The four-element De Morgan lattice: f < n,b < t with n, b fixed by negation."""
    F, N, B, T = 0, 1, 2, 3
    meet = [[F, F, F, F],
            [F, N, F, N],
            [F, F, B, B],
            [F, N, B, T]]
    join = [[F, N, B, T],
            [N, N, T, T],
            [B, T, B, T],
            [T, T, T, T]]
    neg = [T, N, B, F]
    return _checked(meet, join, neg, ["f", "n", "b", "t"])


def build_boolean(n_atoms: int) -> FiniteLattice:
    """Boolean lattice with n_atoms atoms: subsets under and/or/complement."""
    if n_atoms < 1:
        raise ValueError("atom count must be >= 1")
    n = 1 << n_atoms
    if n > size_cap():
        raise SizeCapExceeded(f"2^{n_atoms} exceeds size cap {size_cap()}")
    full = n - 1
    meet = [[a & b for b in range(n)] for a in range(n)]
    join = [[a | b for b in range(n)] for a in range(n)]
    neg = [full ^ a for a in range(n)]
    if n_atoms == 1:
        labels = ["f", "t"]
    else:
        labels = []
        for a in range(n):
            members = [f"a{i + 1}" for i in range(n_atoms) if a >> i & 1]
            labels.append("{" + ".".join(members) + "}" if members else "f")
        labels[full] = "t"
    return _checked(meet, join, neg, labels)


def build_chain_kleene(neg_fix_label: str = "n") -> FiniteLattice:
    """Three-element chain f < m < t with the middle element a negation fixpoint."""
    F, M, T = 0, 1, 2
    meet = [[F, F, F], [F, M, M], [F, M, T]]
    join = [[F, M, T], [M, M, T], [T, T, T]]
    neg = [T, M, F]
    return _checked(meet, join, neg, ["f", neg_fix_label, "t"])


def product(Ls) -> FiniteLattice:
    """Direct product with componentwise operations; labels joined by ','."""
    Ls = list(Ls)
    if not Ls:
        raise ValueError("product of an empty list")
    total = 1
    for L in Ls:
        total *= L.size
    if total > size_cap():
        raise SizeCapExceeded(f"product size {total} exceeds cap {size_cap()}")
    tuples = list(iproduct(*[range(L.size) for L in Ls]))
    index = {t: i for i, t in enumerate(tuples)}
    meet = [[index[tuple(L.meet[a[k]][b[k]] for k, L in enumerate(Ls))]
             for b in tuples] for a in tuples]
    join = [[index[tuple(L.join[a[k]][b[k]] for k, L in enumerate(Ls))]
             for b in tuples] for a in tuples]
    neg = [index[tuple(L.neg[a[k]] for k, L in enumerate(Ls))] for a in tuples]
    labels = [",".join(L.labels[a[k]] for k, L in enumerate(Ls)) for a in tuples]
    return _checked(meet, join, neg, labels)


def order_dual(L: FiniteLattice) -> FiniteLattice:
    """Swap meet and join; negation stays (still antitone in the dual order)."""
    return _checked(L.join, L.meet, L.neg, L.labels)


def sublattice(L: FiniteLattice, elems) -> tuple[FiniteLattice, list[int]]:
    """Restrict L to a subuniverse (must be closed); returns (lattice, old indices)."""
    elems = sorted(elems)
    pos = {e: i for i, e in enumerate(elems)}
    for a in elems:
        if L.neg[a] not in pos:
            raise ValueError("subset not closed under negation")
        for b in elems:
            if L.meet[a][b] not in pos or L.join[a][b] not in pos:
                raise ValueError("subset not closed under meet/join")
    meet = [[pos[L.meet[a][b]] for b in elems] for a in elems]
    join = [[pos[L.join[a][b]] for b in elems] for a in elems]
    neg = [pos[L.neg[a]] for a in elems]
    labels = [L.labels[a] for a in elems]
    return FiniteLattice(meet, join, neg, labels), elems


def free_de_morgan(k: int, max_generators: int = 2):
    """Free De Morgan lattice on k generators, as tuples over all DM1 valuations.

    Each generator is the tuple listing its value under every valuation of the
    k variables into DM1; an inequality between k-variable terms holds in all
    De Morgan lattices iff it holds coordinatewise between these tuples.
    Returns (lattice, generator element indices).
    """
    if k < 1:
        raise ValueError("need at least one generator")
    if k > max_generators:
        raise ValueError(f"generator count {k} exceeds bound {max_generators}")
    dm1 = build_dm1()
    valuations = list(iproduct(range(4), repeat=k))
    gens = [tuple(v[j] for v in valuations) for j in range(k)]
    universe = set(gens)
    frontier = list(gens)
    while frontier:
        nxt = []
        for a in frontier:
            na = tuple(dm1.neg[x] for x in a)
            if na not in universe:
                universe.add(na)
                nxt.append(na)
            for b in list(universe):
                for t in (tuple(dm1.meet[x][y] for x, y in zip(a, b)),
                          tuple(dm1.join[x][y] for x, y in zip(a, b))):
                    if t not in universe:
                        universe.add(t)
                        nxt.append(t)
        frontier = nxt
    elems = sorted(universe)
    if len(elems) > size_cap():
        raise SizeCapExceeded(
            f"free lattice on {k} generators has {len(elems)} elements")
    index = {t: i for i, t in enumerate(elems)}
    meet = [[index[tuple(dm1.meet[x][y] for x, y in zip(a, b))] for b in elems]
            for a in elems]
    join = [[index[tuple(dm1.join[x][y] for x, y in zip(a, b))] for b in elems]
            for a in elems]
    neg = [index[tuple(dm1.neg[x] for x in a)] for a in elems]
    L = _checked(meet, join, neg)
    return L, [index[g] for g in gens]


class Congruence:
    """A partition of a lattice compatible with meet, join and negation."""

    __slots__ = ("lattice", "block_of", "blocks")

    def __init__(self, lattice: FiniteLattice, block_of, check: bool = True):
        self.lattice = lattice
        block_of = list(block_of)
        # normalize block ids to order of first appearance
        remap = {}
        for b in block_of:
            if b not in remap:
                remap[b] = len(remap)
        self.block_of = tuple(remap[b] for b in block_of)
        nblocks = len(remap)
        blocks = [[] for _ in range(nblocks)]
        for e, b in enumerate(self.block_of):
            blocks[b].append(e)
        self.blocks = tuple(tuple(b) for b in blocks)
        if check and not self._compatible():
            raise NotACongruence("partition not compatible with operations")

    def _compatible(self) -> bool:
        L = self.lattice
        bo = self.block_of
        for a in range(L.size):
            if bo[L.neg[a]] != bo[L.neg[self.blocks[bo[a]][0]]]:
                return False
        for a in range(L.size):
            for b in range(L.size):
                ra, rb = self.blocks[bo[a]][0], self.blocks[bo[b]][0]
                if bo[L.meet[a][b]] != bo[L.meet[ra][rb]]:
                    return False
                if bo[L.join[a][b]] != bo[L.join[ra][rb]]:
                    return False
        return True

    def relates(self, a: int, b: int) -> bool:
        return self.block_of[a] == self.block_of[b]

    def is_identity(self) -> bool:
        return len(self.blocks) == self.lattice.size

    def __eq__(self, other):
        return isinstance(other, Congruence) and self.block_of == other.block_of \
            and self.lattice.key() == other.lattice.key()

    def __hash__(self):
        return hash(self.block_of)

    def __repr__(self):
        return f"Congruence(blocks={len(self.blocks)})"


def congruence_from_pairs(L: FiniteLattice, related) -> Congruence:
    """Union-find partition from a symmetric 'related' predicate on elements."""
    parent = list(range(L.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(L.size):
        for b in range(a + 1, L.size):
            if related(a, b):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    return Congruence(L, [find(x) for x in range(L.size)])


def f_comp_filter(L: FiniteLattice) -> int:
    """Bitmask of the filter generated by all elements a|~a."""
    gens = {L.join[a][L.neg[a]] for a in range(L.size)}
    members = set(gens)
    changed = True
    while changed:
        changed = False
        for a in list(members):
            for b in list(members):
                m = L.meet[a][b]
                if m not in members:
                    members.add(m)
                    changed = True
    mask = 0
    for a in members:
        mask |= L.up[a]
    return mask


def theta_kleene(L: FiniteLattice) -> Congruence:
    """Smallest congruence whose quotient satisfies x&~x <= y|~y.

    a and b collapse iff a&f = b&f and ~f|a = ~f|b for some f in the filter
    generated by the elements x|~x.
    """
    fc = f_comp_filter(L)
    fs = [f for f in range(L.size) if fc >> f & 1]

    def related(a, b):
        return any(L.meet[a][f] == L.meet[b][f]
                   and L.join[L.neg[f]][a] == L.join[L.neg[f]][b] for f in fs)

    return congruence_from_pairs(L, related)


def theta_boolean(L: FiniteLattice) -> Congruence:
    """Smallest congruence with a Boolean quotient.

    a and b collapse iff (~f|a)&f = (~f|b)&f for some f in the filter
    generated by the elements x|~x.
    """
    fc = f_comp_filter(L)
    fs = [f for f in range(L.size) if fc >> f & 1]

    def related(a, b):
        return any(L.meet[L.join[L.neg[f]][a]][f] == L.meet[L.join[L.neg[f]][b]][f]
                   for f in fs)

    return congruence_from_pairs(L, related)


def quotient(L: FiniteLattice, theta: Congruence):
    """Quotient lattice and the projection map (block representative = least index)."""
    if theta.lattice.key() != L.key():
        raise NotACongruence("congruence belongs to a different lattice")
    reps = [blk[0] for blk in theta.blocks]
    bo = theta.block_of
    n = len(reps)
    meet = [[bo[L.meet[reps[i]][reps[j]]] for j in range(n)] for i in range(n)]
    join = [[bo[L.join[reps[i]][reps[j]]] for j in range(n)] for i in range(n)]
    neg = [bo[L.neg[reps[i]]] for i in range(n)]
    labels = [L.labels[r] for r in reps]
    Q = FiniteLattice(meet, join, neg, labels)
    bad = validate_lattice(Q)
    if bad:
        raise NotACongruence(f"quotient not a De Morgan lattice: {bad[0]}")
    return Q, list(bo)


def is_kleene(L: FiniteLattice) -> bool:
    """Does x&~x <= y|~y hold for all pairs?"""
    lows = {L.meet[a][L.neg[a]] for a in range(L.size)}
    highs = {L.join[a][L.neg[a]] for a in range(L.size)}
    return all(L.leq(x, y) for x in lows for y in highs)


def is_boolean(L: FiniteLattice) -> bool:
    """Does x|~x = top (and dually) hold for all elements?"""
    return all(L.join[a][L.neg[a]] == L.top and L.meet[a][L.neg[a]] == L.bottom
               for a in range(L.size))


def all_congruences(L: FiniteLattice):
    """Every congruence of L, by refining partitions (brute force, small L only)."""
    if L.size > 10:
        raise SizeCapExceeded("congruence enumeration capped at 10 elements")
    out = []
    # enumerate set partitions via restricted growth strings
    rgs = [0] * L.size

    def rec(i, maxb):
        if i == L.size:
            try:
                out.append(Congruence(L, list(rgs)))
            except NotACongruence:
                pass
            return
        for b in range(maxb + 1):
            rgs[i] = b
            rec(i + 1, max(maxb, b + 1) if b == maxb else maxb)

    if L.size == 1:
        return [Congruence(L, [0])]
    rec(0, 0)
    return out


def lattice_hasse_dot(L: FiniteLattice, designated=None, name="L") -> str:
    """DOT rendering of the Hasse diagram; designated node indices drawn filled."""
    designated = designated or set()
    lines = [f'graph "{name}" {{', "  rankdir=BT;"]
    for i in range(L.size):
        style = ' style=filled fillcolor=black fontcolor=white' if i in designated else ""
        lines.append(f'  n{i} [label="{L.labels[i]}"{style}];')
    for a, b in L.covers():
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines)
