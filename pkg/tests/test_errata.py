"""Pinned fingerprints of the published-data defects (see the repository
notes).  These tests are green exactly as long as the deviations stay the
ones documented; any drift in either direction is a failure."""

import pytest

from demorgan import formulas as fm
from demorgan import hierarchy as hx
from demorgan import logics as lg
from demorgan import matrices as mx


class TestRefutedFigureEdge:
    """The drawn Km1 edge into BAm1@Km1 cannot be a strict-image relation."""

    def test_lem_refutes_the_edge(self):
        lem = fm.catalog_rules("lem")
        assert fm.rule_valid(lem, mx.catalog("BAm1@Km1"))[0]
        assert not fm.rule_valid(lem, mx.catalog("Km1"))[0]

    def test_exhaustive_search_agrees(self):
        assert mx.hss_leq(mx.catalog("Km1"), mx.catalog("BAm1@Km1")) is None


class TestMissedEmbedding:
    """Q8 is literally a substructure of Km1@DMm1."""

    def test_witness(self):
        wit = mx.hss_leq(mx.catalog("Q8"), mx.catalog("Km1@DMm1"))
        assert wit is not None
        sub_elems, mapping = wit
        assert len(sub_elems) == 8 and len(set(mapping.values())) == 8

    def test_published_q8_rule_not_separating(self):
        r = fm.SEPARATING_RULES["Q8"]
        # fails in its own structure, as required ...
        assert not fm.rule_valid(r, mx.catalog("Q8"))[0]
        # ... but also fails in structures not above Q8 in either order
        assert not fm.rule_valid(r, mx.catalog("BAm1@DMm1"))[0]
        assert not fm.rule_valid(r, mx.catalog("Pm1@DMm1"))[0]


class TestFigureMismatchSet:
    def test_exactly_the_nine_pairs(self, level_prime2):
        ok, mism = hx.figure_poset_matches(level_prime2)
        assert not ok
        got = {(a, b) for a, b, _, _ in mism}
        assert got == set(hx.KNOWN_FIGURE_MISMATCHES)

    def test_corrected_poset_exact(self, level_prime2):
        ok, mism = hx.corrected_poset_matches(level_prime2)
        assert ok, mism


class TestMissingStructures:
    """The everything-but-bottom structures on the Q-algebras are genuine
    substructure classes with logics outside the published classification."""

    @pytest.mark.parametrize("name,size", [("R7", 7), ("R8", 8), ("R9", 9)])
    def test_present_as_substructure_classes(self, level_prime2, name, size):
        i = level_prime2.index_of(name)
        assert level_prime2.classes[i].size == size

    def test_r7_logic_is_no_intersection_of_published_logics(self):
        # r* is valid in both members of the sound over-approximation
        # {BAm1, Pm1} of R7's published model set, yet fails in R7
        rstar = fm.parse_rule("x & ~x, y & ~y, x & y |- x & ~x & y & ~y")
        assert fm.rule_valid(rstar, mx.catalog("BAm1"))[0]
        assert fm.rule_valid(rstar, mx.catalog("Pm1"))[0]
        assert not fm.rule_valid(rstar, mx.catalog("R7"))[0]

    def test_r7_distinct_from_every_published_class(self, level_prime2):
        r7 = mx.catalog("R7")
        for nm in hx.FIGURE_POSET_NODES:
            other = level_prime2.classes[level_prime2.index_of(nm)]
            verdict, _ = lg.logics_equivalent_bounded(
                lg.logic([r7], "R7"), lg.logic([other], nm), max_factors=2)
            assert verdict == "false", nm

    def test_downset_count_differs(self):
        # the corrected order has strictly more downsets than the published one
        pub_names, pub_downs = hx.figure_poset_downsets()
        cor_downs = hx.poset_downsets(hx.CORRECTED_POSET_NODES,
                                      hx.CORRECTED_POSET_EDGES)
        assert len(pub_names) == 19
        assert len(cor_downs) > len(pub_downs)


class TestAbfAxiomatizationIncomplete:
    """R7 models the published three axioms of the anything-but-falsehood
    logic, yet an ABF-valid rule fails in it; the fourth axiom repairs it."""

    RSTAR = "x & ~x, y & ~y, x & y |- x & ~x & y & ~y"

    def test_r7_models_published_axioms(self):
        r7 = mx.catalog("R7")
        for r in (fm.n_adjunction(2), fm.catalog_rules("lem"),
                  fm.parse_rule("x | y, ~x | y |- (x & ~x) | y")):
            assert fm.rule_valid(r, r7)[0]

    def test_rstar_separates(self):
        rstar = fm.parse_rule(self.RSTAR)
        assert fm.rule_valid(rstar, mx.catalog("Q4"))[0]
        assert not fm.rule_valid(rstar, mx.catalog("R7"))[0]

    def test_fourth_axiom_repairs(self):
        var = fm.disjunctive_variant(fm.parse_rule(self.RSTAR))
        assert not fm.rule_valid(var, mx.catalog("R7"))[0]
        for nm in ("Q4", "Pm1", "BAm1"):
            assert fm.rule_valid(var, mx.catalog(nm))[0]

    def test_corrected_axiomatization(self, level_prime2):
        report = hx.axiomatize_downset(level_prime2, ["Q4", "Pm1", "BAm1"])
        assert report.minimal_excluded == ["A1", "BAm1@BAm1", "R7"]
        assert len(report.output_rules) == 4
        assert report.verified


class TestCorrectedTable:
    def test_established_rows_pass(self, level_prime2):
        passed, rows = hx.verify_separating_table(level_prime2, corrected=True)
        open_rows = [r["structure"] for r in rows if r["ok"] is None]
        failed = [r["structure"] for r in rows if r["ok"] is False]
        assert failed == []
        # three rows stay open at the documented search bounds
        assert open_rows == ["DMm1@DMm1", "R8", "R9"]

    def test_published_table_fails_exactly_on_q8(self, level_prime2):
        all_ok, rows = hx.verify_separating_table(level_prime2,
                                                  corrected=False)
        assert not all_ok
        bad = [r["structure"] for r in rows if not r["ok"]]
        assert bad == ["Q8"]
