"""Upsets of finite De Morgan lattices: n-filters, primeness, kinds, closures.

Upsets are bitmasks over element indices.  Every predicate here is decided
by a direct quantifier sweep over elements; these sweeps are the oracles the
rest of the package is tested against, so no shortcuts.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .lattice import FiniteLattice, SizeCapExceeded, f_comp_filter, order_dual


class NotAnUpset(ValueError):
    pass


class BadSeparationInput(ValueError):
    """Prime separation preconditions violated; .reason says which one."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def mask_of(elems) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def elems_of(mask: int):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def is_upset(L: FiniteLattice, mask: int) -> bool:
    acc = 0
    m = mask
    i = 0
    while m:
        if m & 1:
            acc |= L.up[i]
        m >>= 1
        i += 1
    return acc == mask


def up_closure(L: FiniteLattice, mask: int) -> int:
    acc = 0
    i = 0
    while mask:
        if mask & 1:
            acc |= L.up[i]
        mask >>= 1
        i += 1
    return acc


@dataclass(frozen=True)
class Upset:
    """An upward closed subset of a lattice, as a bitmask."""
    lattice: FiniteLattice
    members: int

    def __post_init__(self):
        if not is_upset(self.lattice, self.members):
            raise NotAnUpset("subset is not upward closed")

    def elements(self):
        return elems_of(self.members)

    def __contains__(self, e: int) -> bool:
        return bool(self.members >> e & 1)

    def size(self) -> int:
        return bin(self.members).count("1")


def _check_upset(L, mask):
    if not is_upset(L, mask):
        raise NotAnUpset("subset is not upward closed")


def is_n_filter(L: FiniteLattice, mask: int, n: int) -> bool:
    """Is the upset closed under the (n+1)-ary meet condition?

    For every (n+1)-subset Y of the upset: if every meet of a non-empty
    subset of Y with at most n elements is in the upset, so is the meet of Y.
    """
    _check_upset(L, mask)
    elems = elems_of(mask)
    if len(elems) <= n:
        return True
    for Y in combinations(elems, n + 1):
        full = L.meet_of(Y)
        if mask >> full & 1:
            continue
        ok = True
        for k in range(1, n + 1):
            for X in combinations(Y, k):
                if not mask >> L.meet_of(X) & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return False
    return True


def n_filter_degree(L: FiniteLattice, mask: int):
    """Least n >= 1 making the upset an n-filter; None if none up to |F|.

    Any upset of size s is vacuously an s-filter, so the scan is bounded and
    None can only occur for the (impossible) case of a non-upset input.
    """
    _check_upset(L, mask)
    top = max(1, bin(mask).count("1"))
    for n in range(1, top + 1):
        if is_n_filter(L, mask, n):
            return n
    return None


def is_prime(L: FiniteLattice, mask: int) -> bool:
    """x|y in F implies x in F or y in F (the empty upset counts as prime)."""
    _check_upset(L, mask)
    for x in range(L.size):
        for y in range(x, L.size):
            if mask >> L.join[x][y] & 1 and not (mask >> x & 1 or mask >> y & 1):
                return False
    return True


def complement_in_dual(L: FiniteLattice, mask: int):
    """The complement of an upset of L, as an upset of the order dual."""
    dual = order_dual(L)
    full = (1 << L.size) - 1
    return dual, full ^ mask


def n_prime_degree(L: FiniteLattice, mask: int):
    """Least n such that the complement is an n-ideal (n-filter of the dual)."""
    dual, comp = complement_in_dual(L, mask)
    return n_filter_degree(dual, comp)


def is_n_prime(L: FiniteLattice, mask: int, n: int) -> bool:
    dual, comp = complement_in_dual(L, mask)
    return is_n_filter(dual, comp, n)


@dataclass(frozen=True)
class KindFlags:
    almost_complete: bool
    complete: bool
    almost_consistent: bool
    consistent: bool
    almost_classical: bool
    classical: bool
    kalman: bool

    def as_dict(self):
        return self.__dict__ if hasattr(self, "__dict__") else {
            k: getattr(self, k) for k in (
                "almost_complete", "complete", "almost_consistent",
                "consistent", "almost_classical", "classical", "kalman")}


def classify_kind(L: FiniteLattice, mask: int) -> KindFlags:
    """Decide every §-kind flag of an upset by exhaustive sweeps."""
    _check_upset(L, mask)
    n = L.size
    full = (1 << n) - 1
    almost_complete = all(
        mask >> L.meet[x][L.join[y][L.neg[y]]] & 1
        for x in range(n) if mask >> x & 1 for y in range(n))
    complete = almost_complete and mask != 0
    almost_consistent = all(
        mask >> y & 1
        for x in range(n) for y in range(n)
        if mask >> L.join[L.meet[x][L.neg[x]]][y] & 1)
    consistent = almost_consistent and mask != full
    almost_classical = complete and almost_consistent
    classical = complete and consistent
    lows = sorted({L.meet[x][L.neg[x]] for x in range(n)})
    highs = sorted({L.join[y][L.neg[y]] for y in range(n)})
    kalman = True
    for z in range(n):
        for u in range(n):
            if any(mask >> L.join[L.meet[a][z]][u] & 1 for a in lows):
                if not all(mask >> L.join[L.meet[b][z]][u] & 1 for b in highs):
                    kalman = False
                    break
        if not kalman:
            break
    return KindFlags(almost_complete, complete, almost_consistent, consistent,
                     almost_classical, classical, kalman)


def generate_n_filter(L: FiniteLattice, subset: int, n: int) -> int:
    """Least n-filter containing the subset, by fixpoint saturation."""
    if subset == 0:
        return 0
    F = up_closure(L, subset)
    while True:
        added = 0
        elems = elems_of(F)
        for Y in combinations(elems, n + 1):
            full = L.meet_of(Y)
            if F >> full & 1:
                continue
            ok = True
            for k in range(1, n + 1):
                for X in combinations(Y, k):
                    if not F >> L.meet_of(X) & 1:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                added |= L.up[full]
        if added & ~F:
            F |= added
        else:
            return F


def closure_comp(L: FiniteLattice, upset: int) -> int:
    """Least complete upset containing the upset (F_comp when empty)."""
    fc = f_comp_filter(L)
    if upset == 0:
        return fc
    out = 0
    fs = elems_of(fc)
    for x in range(L.size):
        if any(upset >> a & 1 and L.leq(L.meet[a][f], x)
               for a in range(L.size) for f in fs):
            out |= 1 << x
    return out


def closure_cons(L: FiniteLattice, upset: int) -> int:
    """Least almost consistent upset contained membership-wise: x with ~f|x in U."""
    if upset == 0:
        return 0
    fc = elems_of(f_comp_filter(L))
    out = 0
    for x in range(L.size):
        if any(upset >> L.join[L.neg[f]][x] & 1 for f in fc):
            out |= 1 << x
    return out


def closure_class(L: FiniteLattice, upset: int) -> int:
    """Least almost classical upset: x with a&f <= ~f|x for some a in U, f comp."""
    if upset == 0:
        return closure_cons(L, f_comp_filter(L))
    fc = elems_of(f_comp_filter(L))
    out = 0
    for x in range(L.size):
        if any(upset >> a & 1 and L.leq(L.meet[a][f], L.join[L.neg[f]][x])
               for a in range(L.size) for f in fc):
            out |= 1 << x
    return out


def closure_kalman(L: FiniteLattice, upset: int) -> int:
    """Least Kalman upset: x with a&f <= x and a <= ~f|x for some a in U, f comp."""
    if upset == 0:
        return 0
    fc = elems_of(f_comp_filter(L))
    out = 0
    for x in range(L.size):
        if any(upset >> a & 1
               and L.leq(L.meet[a][f], x) and L.leq(a, L.join[L.neg[f]][x])
               for a in range(L.size) for f in fc):
            out |= 1 << x
    return out


KIND_CLOSURES = {
    "complete": closure_comp,
    "almost_consistent": closure_cons,
    "almost_classical": closure_class,
    "kalman": closure_kalman,
}


def generate_kind_n_filter(L: FiniteLattice, subset: int, n: int, kind: str) -> int:
    """Least n-filter of the given kind containing the subset.

    complete: fg_n after the complete closure; almost_consistent: consistent
    closure after fg_n; almost_classical / kalman: fg_n after the closure.
    """
    U = up_closure(L, subset)
    if kind == "complete":
        return generate_n_filter(L, closure_comp(L, U), n)
    if kind == "almost_consistent":
        return closure_cons(L, generate_n_filter(L, U, n))
    if kind == "almost_classical":
        return generate_n_filter(L, closure_class(L, U), n)
    if kind == "kalman":
        return generate_n_filter(L, closure_kalman(L, U), n)
    if kind == "plain":
        return generate_n_filter(L, U, n)
    raise ValueError(f"unknown kind {kind!r}")


def _has_kind(L, mask, n, kind) -> bool:
    if not is_n_filter(L, mask, n):
        return False
    if kind == "plain":
        return True
    flags = classify_kind(L, mask)
    if kind == "complete":
        return flags.complete
    if kind == "consistent":
        return flags.consistent
    if kind == "almost_consistent":
        return flags.almost_consistent
    if kind == "classical":
        return flags.classical
    if kind == "almost_classical":
        return flags.almost_classical
    if kind == "kalman":
        return flags.kalman
    raise ValueError(f"unknown kind {kind!r}")


def is_ideal(L: FiniteLattice, mask: int) -> bool:
    """Downset closed under finite joins."""
    if mask == 0:
        return True
    acc = 0
    for a in elems_of(mask):
        acc |= L.down[a]
    if acc != mask:
        return False
    es = elems_of(mask)
    return all(mask >> L.join[a][b] & 1 for a in es for b in es)


_SEPARATION_CLOSURE = {
    "plain": "plain",
    "complete": "complete",
    "consistent": "almost_consistent",
    "classical": "almost_classical",
    "kalman": "kalman",
}


def separate_prime(L: FiniteLattice, filt: int, ideal: int, n: int,
                   kind: str = "plain") -> int:
    """Extend a kind n-filter to a prime one of the same kind avoiding an ideal.

    Greedy maximalization: repeatedly add the least-index element whose kind
    n-filter closure with the current set stays disjoint from the ideal; the
    maximal result is prime.
    """
    if kind not in _SEPARATION_CLOSURE:
        raise ValueError(f"unknown kind {kind!r}")
    closure_kind = _SEPARATION_CLOSURE[kind]
    if not _has_kind(L, filt, n, kind):
        raise BadSeparationInput(f"input is not a {kind} {n}-filter")
    if ideal == 0 or not is_ideal(L, ideal):
        raise BadSeparationInput("second argument is not a non-empty ideal")
    if filt & ideal:
        raise BadSeparationInput("filter and ideal are not disjoint")
    G = filt
    while True:
        for x in range(L.size):
            if G >> x & 1:
                continue
            cand = generate_kind_n_filter(L, G | (1 << x), n, closure_kind)
            if not cand & ideal:
                G = cand
                break
        else:
            break
    assert is_prime(L, G) and _has_kind(L, G, n, kind) and not G & ideal
    return G


def enumerate_upsets(L: FiniteLattice, kind: str = "plain", n: int | None = None,
                     cap: int = 20):
    """All upsets of the given kind (and n-filter degree when n is given).

    kind in {plain, prime, complete, consistent, classical, kalman,
    almost_consistent, almost_classical}; n restricts to n-filters.
    """
    if L.size > cap:
        raise SizeCapExceeded(f"upset enumeration capped at {cap} elements")
    out = []
    for mask in range(1 << L.size):
        acc = 0
        m = mask
        i = 0
        ok = True
        while m:
            if m & 1:
                u = L.up[i]
                if u & ~mask:
                    ok = False
                    break
                acc |= u
            m >>= 1
            i += 1
        if not ok or acc != mask:
            continue
        if n is not None and not is_n_filter(L, mask, n):
            continue
        if kind == "plain":
            out.append(mask)
        elif kind == "prime":
            if is_prime(L, mask):
                out.append(mask)
        else:
            flags = classify_kind(L, mask)
            if getattr(flags, kind):
                out.append(mask)
    return out


def decompose_prime_n_filter(L: FiniteLattice, mask: int):
    """Write a non-empty prime n-filter as a union of at most n prime filters.

    Minimum-cardinality cover by prime 1-filters below it; when the input is
    complete/consistent/classical/kalman the parts are restricted to the same
    kinds.
    """
    if mask == 0 or not is_prime(L, mask):
        raise ValueError("input must be a non-empty prime upset")
    n = n_filter_degree(L, mask)
    flags = classify_kind(L, mask)
    wanted = [k for k in ("complete", "consistent", "classical", "kalman")
              if getattr(flags, k)]
    candidates = []
    for sub in enumerate_upsets(L, "prime", n=1):
        if sub == 0 or sub & ~mask:
            continue
        subflags = classify_kind(L, sub)
        if all(getattr(subflags, k) for k in wanted):
            candidates.append(sub)
    for size in range(1, n + 1):
        for combo in combinations(candidates, size):
            u = 0
            for c in combo:
                u |= c
            if u == mask:
                return list(combo)
    raise AssertionError("no prime-filter cover found (should be impossible)")
