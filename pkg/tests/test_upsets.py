"""Upset theory: degrees, kinds, closures, generation, separation."""

import itertools

import pytest

from demorgan import lattice as lat
from demorgan import upsets as ups
from demorgan import matrices as mx


@pytest.fixture(scope="module")
def dm1():
    return lat.build_dm1()


@pytest.fixture(scope="module")
def ba2():
    return lat.build_boolean(2)


F, N, B, T = range(4)  # DM1 element indices


class TestDegrees:
    def test_nonzero_of_ba2_is_a_2_filter(self, ba2):
        q2 = ups.mask_of([1, 2, 3])
        assert not ups.is_n_filter(ba2, q2, 1)
        assert ups.is_n_filter(ba2, q2, 2)
        assert ups.n_filter_degree(ba2, q2) == 2

    def test_nonzero_of_ba3_has_degree_3(self):
        ba3 = lat.build_boolean(3)
        q3 = ups.mask_of(range(1, 8))
        assert ups.n_filter_degree(ba3, q3) == 3

    def test_principal_upsets_are_filters(self, dm1):
        for x in range(4):
            assert ups.n_filter_degree(dm1, dm1.up[x]) == 1

    def test_not_an_upset_rejected(self, dm1):
        with pytest.raises(ups.NotAnUpset):
            ups.is_n_filter(dm1, ups.mask_of([F]), 1)

    def test_empty_upset_is_everything(self, dm1):
        assert ups.is_n_filter(dm1, 0, 1)
        assert ups.is_prime(dm1, 0)


class TestPrimeness:
    def test_tb_prime_on_dm1(self, dm1):
        assert ups.is_prime(dm1, ups.mask_of([B, T]))

    def test_top_not_prime_on_ba2(self, ba2):
        assert not ups.is_prime(ba2, ups.mask_of([3]))

    def test_top_is_2_prime_on_ba2(self, ba2):
        assert ups.n_prime_degree(ba2, ups.mask_of([3])) == 2
        assert ups.is_n_prime(ba2, ups.mask_of([3]), 2)


class TestKinds:
    def test_tb_on_dm1_plain(self, dm1):
        flags = ups.classify_kind(dm1, ups.mask_of([B, T]))
        assert not flags.complete and not flags.almost_consistent
        assert not flags.kalman

    def test_pm1_designated_complete(self):
        pm1 = mx.catalog("Pm1")
        flags = ups.classify_kind(pm1.lattice, pm1.designated)
        assert flags.complete and not flags.consistent

    def test_km1_designated_consistent(self):
        km1 = mx.catalog("Km1")
        flags = ups.classify_kind(km1.lattice, km1.designated)
        assert flags.consistent and not flags.complete

    def test_pk_designated_kalman_not_comp_nor_cons(self):
        pk = mx.catalog("Pm1@Km1")
        flags = ups.classify_kind(pk.lattice, pk.designated)
        assert flags.kalman
        assert not flags.complete and not flags.consistent

    def test_kalman_neq_comp_cap_cons_witness(self):
        # the dual product's designated set witnesses that the Kalman
        # closure is not the intersection of the other two closures
        pk = mx.catalog("Pm1@Km1")
        L, D = pk.lattice, pk.designated
        assert ups.closure_kalman(L, D) == D
        both = ups.closure_comp(L, D) & ups.closure_cons(L, D)
        assert both != ups.closure_kalman(L, D)

    def test_complete_iff_almost_complete_and_lem(self, dm1):
        for mask in ups.enumerate_upsets(dm1):
            flags = ups.classify_kind(dm1, mask)
            lem_in = all(mask >> dm1.join[x][dm1.neg[x]] & 1 for x in range(4))
            assert flags.complete == (flags.almost_complete and lem_in
                                      and mask != 0) or flags.complete == (
                flags.almost_complete and mask != 0)


class TestClosures:
    def test_comp_empty_is_f_comp(self, dm1):
        assert ups.closure_comp(dm1, 0) == lat.f_comp_filter(dm1)

    def test_cons_and_kalman_empty(self, dm1):
        assert ups.closure_cons(dm1, 0) == 0
        assert ups.closure_kalman(dm1, 0) == 0

    def test_class_empty(self, dm1):
        assert ups.closure_class(dm1, 0) == \
            ups.closure_cons(dm1, lat.f_comp_filter(dm1))

    @pytest.mark.parametrize("name", ["DMm1", "Pm1", "Km1", "BAm2",
                                      "Pm1@Km1", "BAm1@DMm1"])
    def test_class_is_cons_after_comp(self, name):
        L = mx.catalog(name).lattice
        for mask in ups.enumerate_upsets(L):
            assert ups.closure_class(L, mask) == \
                ups.closure_cons(L, ups.closure_comp(L, mask))

    @pytest.mark.parametrize("kind", ["complete", "almost_consistent",
                                      "almost_classical", "kalman"])
    def test_closures_are_least(self, dm1, kind):
        # oracle: intersect all upsets of the kind containing the input
        flag = {"complete": "complete", "almost_consistent": "almost_consistent",
                "almost_classical": "almost_classical", "kalman": "kalman"}[kind]
        closer = {"complete": ups.closure_comp,
                  "almost_consistent": ups.closure_cons,
                  "almost_classical": ups.closure_class,
                  "kalman": ups.closure_kalman}[kind]
        all_upsets = ups.enumerate_upsets(dm1)
        kinded = [m for m in all_upsets
                  if getattr(ups.classify_kind(dm1, m), flag)]
        for U in all_upsets:
            if U == 0:
                continue
            got = closer(dm1, U)
            over = [m for m in kinded if m & U == U]
            if not over:
                continue
            least = over[0]
            for m in over[1:]:
                least &= m
            assert got == least


class TestGeneration:
    def test_spec_example_degree_2(self, ba2):
        u = ups.mask_of([1, 2, 3])
        assert ups.generate_n_filter(ba2, u, 2) == u

    def test_spec_example_degree_1_collapses(self, ba2):
        u = ups.mask_of([1, 2, 3])
        assert ups.generate_n_filter(ba2, u, 1) == ups.mask_of([0, 1, 2, 3])

    def test_empty_generates_empty(self, ba2):
        assert ups.generate_n_filter(ba2, 0, 2) == 0

    @pytest.mark.parametrize("name", ["DMm1", "BAm2", "Pm1@Km1"])
    @pytest.mark.parametrize("n", [1, 2])
    def test_generation_matches_bruteforce(self, name, n):
        L = mx.catalog(name).lattice
        nfilters = [m for m in ups.enumerate_upsets(L)
                    if ups.is_n_filter(L, m, n)]
        for subset in range(1 << L.size):
            if subset.bit_count() > 3:
                continue
            got = ups.generate_n_filter(L, subset, n)
            over = [m for m in nfilters if m & subset == subset]
            least = (1 << L.size) - 1
            for m in over:
                least &= m
            if subset == 0:
                least = 0
            assert got == least

    def test_cap_lemma_small_lattices(self):
        for name in ("DMm1", "BAm2", "Km1", "Pm1"):
            L = mx.catalog(name).lattice
            for U in ups.enumerate_upsets(L):
                for x, y in itertools.product(range(L.size), repeat=2):
                    gx = ups.generate_n_filter(L, U | 1 << x, 2)
                    gy = ups.generate_n_filter(L, U | 1 << y, 2)
                    gxy = ups.generate_n_filter(L, U | 1 << L.join[x][y], 2)
                    assert gx & gy == gxy

    @pytest.mark.parametrize("kind", ["complete", "almost_consistent",
                                      "almost_classical", "kalman"])
    @pytest.mark.parametrize("n", [1, 2])
    def test_kind_generation_least(self, kind, n, dm1):
        flag = kind
        if kind == "almost_consistent":
            # the consistent closure of an n-filter stays an n-filter
            for U in ups.enumerate_upsets(dm1):
                g = ups.generate_n_filter(dm1, U, n)
                assert ups.is_n_filter(dm1, ups.closure_cons(dm1, g), n)
        kinded = [m for m in ups.enumerate_upsets(dm1)
                  if ups.is_n_filter(dm1, m, n)
                  and getattr(ups.classify_kind(dm1, m), flag)]
        for U in ups.enumerate_upsets(dm1):
            got = ups.generate_kind_n_filter(dm1, U, n, kind)
            over = [m for m in kinded if m & U == U]
            if kind == "complete" and U == 0:
                assert got == lat.f_comp_filter(dm1)
                continue
            if not over:
                continue
            least = over[0]
            for m in over[1:]:
                least &= m
            assert got == least


class TestSeparation:
    def test_spec_example_ba2(self, ba2):
        out = ups.separate_prime(ba2, ups.mask_of([3]), ups.mask_of([0]), 2)
        assert out == ups.mask_of([1, 2, 3])
        assert ups.is_prime(ba2, out)

    def test_preconditions_reported(self, ba2):
        with pytest.raises(ups.BadSeparationInput, match="not a plain"):
            ups.separate_prime(ba2, ups.mask_of([1, 2, 3]), ups.mask_of([0]), 1)
        with pytest.raises(ups.BadSeparationInput, match="ideal"):
            ups.separate_prime(ba2, ups.mask_of([3]), 0, 2)
        with pytest.raises(ups.BadSeparationInput, match="disjoint"):
            ups.separate_prime(ba2, ups.mask_of([1, 3]),
                               ups.mask_of([0, 1]), 2)

    def test_consistent_kind_on_km2(self):
        km2 = mx.catalog("Km2")
        L = km2.lattice
        filt = ups.generate_kind_n_filter(
            L, 1 << (L.size - 1), 2, "almost_consistent")
        out = ups.separate_prime(L, filt, 1 << 0, 2, "consistent")
        flags = ups.classify_kind(L, out)
        assert flags.consistent and ups.is_prime(L, out)
        assert ups.is_n_filter(L, out, 2)

    @pytest.mark.parametrize("kind", ["plain", "complete", "consistent",
                                      "classical", "kalman"])
    def test_separation_properties_all_kinds(self, kind):
        pk = mx.catalog("Pm1@Km1")
        L = pk.lattice
        base = {"plain": ups.mask_of([L.size - 1]),
                "complete": ups.generate_kind_n_filter(L, 0, 2, "complete"),
                "consistent": ups.closure_cons(
                    L, ups.generate_n_filter(L, 1 << (L.size - 1), 2)),
                "classical": ups.generate_kind_n_filter(
                    L, 1 << (L.size - 1), 2, "almost_classical"),
                "kalman": ups.generate_kind_n_filter(
                    L, 1 << (L.size - 1), 2, "kalman")}[kind]
        ideal = 1  # the bottom element
        if base & ideal:
            pytest.skip("kind filter reaches the bottom on this lattice")
        out = ups.separate_prime(L, base, ideal, 2, kind)
        assert ups.is_prime(L, out) and not out & ideal
        assert ups.is_n_filter(L, out, 2)
        if kind != "plain":
            key = {"consistent": "consistent", "complete": "complete",
                   "classical": "classical", "kalman": "kalman"}[kind]
            assert getattr(ups.classify_kind(L, out), key)


class TestDecomposition:
    def test_q2_on_ba2(self, ba2):
        parts = ups.decompose_prime_n_filter(ba2, ups.mask_of([1, 2, 3]))
        assert sorted(parts) == sorted([ups.mask_of([1, 3]),
                                        ups.mask_of([2, 3])])

    def test_prime_filter_is_itself(self, dm1):
        filt = ups.mask_of([B, T])
        assert ups.decompose_prime_n_filter(dm1, filt) == [filt]

    def test_q2_on_dm2_projections(self):
        dmm2 = mx.catalog("DMm2")
        L, D = dmm2.lattice, dmm2.designated
        parts = ups.decompose_prime_n_filter(L, D)
        assert len(parts) == 2
        got = set()
        for p in parts:
            got.add(frozenset(ups.elems_of(p)))
        expected = set()
        for coord in (0, 1):
            members = frozenset(
                e for e in range(L.size)
                if L.labels[e].split(",")[coord] in ("t", "b"))
            expected.add(members)
        assert got == expected

    def test_kind_preserved(self):
        pm2 = mx.catalog("Pm2")
        L, D = pm2.lattice, pm2.designated
        parts = ups.decompose_prime_n_filter(L, D)
        assert len(parts) <= 2
        for p in parts:
            assert ups.classify_kind(L, p).complete

    def test_rejects_non_prime(self, ba2):
        with pytest.raises(ValueError):
            ups.decompose_prime_n_filter(ba2, ups.mask_of([3]) | 0)


class TestEnumeration:
    def test_ba1_three_upsets(self):
        assert len(ups.enumerate_upsets(lat.build_boolean(1))) == 3

    def test_dm1_prime_count_golden(self, dm1):
        # by hand: the upsets are empty, {t}, {n,t}, {b,t}, {n,b,t}, all;
        # {t} is not prime (n|b = t), the rest are
        primes = ups.enumerate_upsets(dm1, "prime")
        assert len(primes) == 5
        assert ups.mask_of([3]) not in primes

    def test_dm2_filters_both_degrees(self):
        L = mx.catalog("DMm2").lattice
        one = [m for m in ups.enumerate_upsets(L) if ups.is_n_filter(L, m, 1)]
        two = [m for m in ups.enumerate_upsets(L) if ups.is_n_filter(L, m, 2)]
        assert set(one) <= set(two)
        assert mx.catalog("DMm2").designated in set(two) - set(one)


class TestHomToCanonical:
    def test_identity_case(self, dm1):
        hom = mx.hom_to_dm1(dm1, ups.mask_of([B, T]))
        assert hom.target.name == "DMm1"
        assert hom.mapping == (0, 1, 2, 3)

    def test_boolean_prime_filter_maps_to_two_chain(self, ba2):
        hom = mx.hom_to_dm1(ba2, ups.mask_of([1, 3]))
        assert hom.target.name == "BAm1"
        assert hom.verify()

    def test_non_prime_rejected(self, ba2):
        # the published example uses {t} on the two-atom algebra, which is
        # not a prime filter; the case map is not a homomorphism there
        with pytest.raises(ValueError):
            mx.hom_to_dm1(ba2, ups.mask_of([3]))

    def test_complete_prime_lands_in_pm1(self):
        pm1 = mx.catalog("Pm1")
        hom = mx.hom_to_dm1(pm1.lattice, pm1.designated)
        assert hom.target.name == "Pm1"
        assert hom.verify()
