"""Hierarchy levels, logic lattices, axiomatization."""

import pytest

from demorgan import formulas as fm
from demorgan import hierarchy as hx
from demorgan import matrices as mx


class TestLevelOne:
    def test_six_classes(self, level_filter1):
        assert sorted(level_filter1.names) == \
            ["A1", "B1", "BAm1", "DMm1", "Km1", "Pm1"]

    def test_six_distinct_logics(self, level_filter1):
        assert len(level_filter1.logic_reps) == 6

    def test_hss_order(self, level_filter1):
        lvl = level_filter1
        for low, high, expected in [
                ("A1", "Km1", True), ("BAm1", "Km1", True),
                ("BAm1", "Pm1", True), ("Km1", "DMm1", True),
                ("Pm1", "DMm1", True), ("A1", "Pm1", False),
                ("B1", "DMm1", True), ("A1", "BAm1", False)]:
            got = lvl.hss[lvl.index_of(low)][lvl.index_of(high)]
            assert got == expected, (low, high)


class TestLevelTwoFilter:
    def test_class_count_golden(self, level_filter2):
        # 23 published classes (6 + M/N structures + 10 binary products)
        # plus the extra isomorphism classes that collapse logically
        assert len(level_filter2.classes) == 37
        named = [nm for nm in level_filter2.names if not nm.startswith("S")]
        assert len(named) == 23

    def test_published_classes_present(self, level_filter2):
        for nm in hx._FILTER2_NAMES:
            level_filter2.index_of(nm)  # raises if absent

    def test_eleven_logic_classes(self, level_filter2):
        assert len(level_filter2.logic_reps) == 11
        reps = sorted(level_filter2.names[i] for i in level_filter2.logic_reps)
        assert reps == ["A1", "B1", "BAm1", "BAm1*DMm1", "BAm1*Pm1", "DMm1",
                        "Km1", "Km1*Pm1", "M4", "M8", "Pm1"]

    def test_published_equivalence_chains(self, level_filter2):
        lvl = level_filter2
        cls = lvl.logic_class_of
        assert cls[lvl.index_of("N7")] == cls[lvl.index_of("Km1")]
        assert cls[lvl.index_of("M7")] == cls[lvl.index_of("Km1")]
        assert cls[lvl.index_of("Km1*Km1")] == cls[lvl.index_of("Km1")]
        assert cls[lvl.index_of("M9")] == cls[lvl.index_of("M4")]
        assert cls[lvl.index_of("N8")] == cls[lvl.index_of("DMm1")]
        assert cls[lvl.index_of("N9")] == cls[lvl.index_of("DMm1")]
        assert cls[lvl.index_of("DMm1*DMm1")] == cls[lvl.index_of("DMm1")]
        assert cls[lvl.index_of("Pm1*DMm1")] == cls[lvl.index_of("DMm1")]
        assert cls[lvl.index_of("Km1*DMm1")] == cls[lvl.index_of("BAm1*DMm1")]
        assert cls[lvl.index_of("BAm1*Km1")] == cls[lvl.index_of("Km1")]
        assert cls[lvl.index_of("Pm1*Pm1")] == cls[lvl.index_of("Pm1")]
        assert cls[lvl.index_of("BAm1*BAm1")] == cls[lvl.index_of("BAm1")]


class TestLevelTwoPrime:
    def test_class_count_golden(self, level_prime2):
        assert len(level_prime2.classes) == 37
        named = [nm for nm in level_prime2.names if not nm.startswith("S")]
        assert len(named) == 23  # 19 published + B1 + R7 + R8 + R9

    def test_twentythree_logic_classes(self, level_prime2):
        # the 22 corrected-poset nodes plus the trivial logic
        assert len(level_prime2.logic_reps) == 23


class TestLogicLattices:
    def test_level_one_lattice(self, level_filter1):
        lattice = hx.build_logic_lattice(level_filter1)
        assert len(lattice.node_families) == 9
        assert lattice.distributive
        ok, detail = hx.match_figure_lattice(lattice, level_filter1,
                                             hx.FIG_LEVEL1_NODES, None)
        assert ok, detail

    def test_prime_level_downsets(self, level_prime2):
        lattice = hx.build_logic_lattice(level_prime2)
        downs = hx.poset_downsets(hx.CORRECTED_POSET_NODES,
                                  hx.CORRECTED_POSET_EDGES)
        assert len(lattice.node_families) == len(downs)
        assert lattice.distributive

    def test_downset_enumeration_small(self):
        names = ("a", "b", "c")
        downs = hx.poset_downsets(names, (("a", "b"), ("a", "c")))
        # downsets of a V: empty, {a}, {a,b}, {a,c}, {a,b,c}
        assert len(downs) == 5


class TestAxiomatization:
    def test_abf_corrected(self, level_prime2):
        report = hx.axiomatize_downset(level_prime2, ["Q4", "Pm1", "BAm1"])
        assert report.minimal_excluded == ["A1", "BAm1@BAm1", "R7"]
        texts = {fm.print_rule(r) for r in report.output_rules}
        assert fm.print_rule(fm.n_adjunction(2)) in texts
        assert "|- x | ~x" in texts
        assert "x | y, ~x | y |- x & ~x | y" in texts
        assert report.verified

    def test_abf_published_universe(self, level_prime2):
        report = hx.axiomatize_downset(level_prime2, ["Q4", "Pm1", "BAm1"],
                                       names=hx.FIGURE_POSET_NODES)
        assert report.minimal_excluded == ["A1", "BAm1@BAm1"]
        assert len(report.output_rules) == 3
        assert report.verified

    def test_whole_level_needs_no_rules(self, level_prime2):
        report = hx.axiomatize_downset(level_prime2,
                                       list(hx.CORRECTED_POSET_NODES))
        assert report.minimal_excluded == []
        assert [fm.print_rule(r) for r in report.output_rules] == \
            [fm.print_rule(fm.n_adjunction(2))]

    def test_rejects_non_downset(self, level_prime2):
        with pytest.raises(ValueError):
            hx.axiomatize_downset(level_prime2, ["Q4"])

    def test_filter_level_etl_downset(self, level_filter2):
        # the exactly-true structure's cone at the filter level
        lvl = level_filter2
        names = [nm for nm in lvl.names if not nm.startswith("S")]
        idx = {nm: lvl.index_of(nm) for nm in names}
        target = [nm for nm in names
                  if lvl.hss[idx[nm]][idx["M4"]]]
        report = hx.axiomatize_downset(lvl, target, names=names)
        assert report.verified
        m4 = mx.catalog("M4")
        for r in report.output_rules:
            assert fm.rule_valid(r, m4)[0]


class TestDownsetSummary:
    def test_published_poset_downsets(self):
        names, downs = hx.figure_poset_downsets()
        assert len(names) == 19
        assert len(downs) == 269
        summary = hx.downset_lattice_summary()
        assert summary["nodes"] == 269
        assert summary["distributive"]
