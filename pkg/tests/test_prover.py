"""Sequent prover: leaves, case splits, cuts, soundness, sampling."""

import pytest

from demorgan import formulas as fm
from demorgan import logics as lg
from demorgan import matrices as mx
from demorgan import prover as pv

ECQ_AXIOM = fm.parse_rule("(x & ~x) | (y & ~y) |- z")
KMINUS_AXIOM = fm.parse_rule("(x & ~x) | y, ~y | z |- z")


@pytest.fixture(scope="module")
def ecq_cfg():
    return pv.CalculusConfig(2, (ECQ_AXIOM,), lg.bd1_derives,
                             max_depth=6, max_nodes=20000)


@pytest.fixture(scope="module")
def ecq_model():
    return mx.catalog("DMm1*BAm1")


class TestBasics:
    def test_identity_leaf(self, ecq_cfg):
        p = pv.prove(ecq_cfg, pv.parse_sequent("x |- x"))
        assert p.rule == "identity"

    def test_axiom_instance(self, ecq_cfg):
        p = pv.prove(ecq_cfg, pv.parse_sequent("(x & ~x) | (y & ~y) |- z"))
        assert p.rule == "axiom"

    def test_oracle_leaf(self, ecq_cfg):
        p = pv.prove(ecq_cfg, pv.parse_sequent("x & y |- y | z"))
        assert p.rule == "oracle"

    def test_cut_proof(self, ecq_cfg, ecq_model):
        p = pv.prove(ecq_cfg, pv.parse_sequent("x & ~x |- z"))
        assert p is not None and p.rule == "cut"
        assert pv.check_soundness(ecq_cfg, p, [ecq_model])

    def test_case_split(self, ecq_cfg):
        p = pv.prove(ecq_cfg,
                     pv.parse_sequent("(x & ~x) | (y & ~y) | (z & ~z) |- u"))
        assert p is not None and p.rule == "cases"
        assert len(p.children) == 3

    def test_unprovable_within_bounds(self, ecq_cfg):
        assert pv.prove(ecq_cfg, pv.parse_sequent("x |- y")) is None

    def test_config_validation(self):
        with pytest.raises(ValueError):
            pv.CalculusConfig(0, ())

    def test_sequent_parsing(self):
        s = pv.parse_sequent("x, y |> x & y")
        assert len(s.premises) == 2
        with pytest.raises(fm.ParseError):
            pv.parse_sequent("x ~= y |- z")


class TestProofChecking:
    def test_structural_validation(self, ecq_cfg, ecq_model):
        p = pv.prove(ecq_cfg, pv.parse_sequent("x & ~x |- z"))
        assert pv.check_proof(ecq_cfg, p)
        # tamper with the root sequent
        bad = pv.Proof("identity", pv.parse_sequent("x |- y"))
        assert not pv.check_proof(ecq_cfg, bad)
        with pytest.raises(pv.InvalidProof):
            pv.check_soundness(ecq_cfg, bad, [ecq_model])

    def test_json_and_pretty(self, ecq_cfg):
        p = pv.prove(ecq_cfg, pv.parse_sequent("x & ~x |- z"))
        data = pv.proof_to_json(p)
        assert "cut" in data
        assert "|>" in p.pretty()


class TestKminusCalculus:
    def test_small_provables_hold_in_m8(self):
        cfg = pv.CalculusConfig(2, (KMINUS_AXIOM,), lg.bd1_derives,
                                max_depth=5, max_nodes=20000)
        m8 = mx.catalog("M8")
        proofs, _ = pv.random_proofs(cfg, 60, seed=5, matrices=[m8])
        for p in proofs:
            assert pv.check_soundness(cfg, p, [m8])

    def test_axiom_fails_in_kleene_but_proof_system_tracks_model(self):
        # the K-minus axiom itself fails in the four-valued matrix
        assert not fm.rule_valid(KMINUS_AXIOM, mx.catalog("DMm1"))[0]
        assert fm.rule_valid(KMINUS_AXIOM, mx.catalog("M8"))[0]


class TestEcqSoundnessBatch:
    def test_batch_of_200(self, ecq_cfg, ecq_model):
        proofs, attempts = pv.random_proofs(ecq_cfg, 200, seed=2,
                                            matrices=[ecq_model])
        assert len(proofs) == 200
        for p in proofs:
            assert pv.check_soundness(ecq_cfg, p, [ecq_model])

    def test_two_variable_sweep_complete(self, ecq_cfg, ecq_model):
        proved, missed = pv.completeness_sweep(ecq_cfg, [ecq_model],
                                               var_count=2, max_premises=2)
        assert missed == []
        assert len(proved) > 300
