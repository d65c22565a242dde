"""FastAPI surface over the workbench core.

The service owns a cache of expensive artifacts (catalog structures,
enumerated hierarchy levels) so repeated queries are cheap.  Everything is
deterministic given the request, so caching is sound.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import formulas as fm
from .. import hierarchy as hx
from .. import lattice as lat
from .. import logics as lg
from .. import matrices as mx
from .. import prover as pv
from .. import upsets as ups
from . import schemas as sc

_LEVEL_CACHE: dict = {}


def cached_level(kind: str, n: int):
    key = (kind, n)
    if key not in _LEVEL_CACHE:
        _LEVEL_CACHE[key] = hx.enumerate_level(kind, n)
    return _LEVEL_CACHE[key]


def resolve_matrix(ref: sc.MatrixRef) -> mx.LogicMatrix:
    if ref.name:
        try:
            return mx.catalog(ref.name)
        except KeyError as e:
            raise HTTPException(404, str(e))
    if ref.matrix:
        try:
            return mx.LogicMatrix.from_json(ref.matrix.model_dump())
        except (ValueError, mx.NotAnUpset) as e:
            raise HTTPException(422, str(e))
    raise HTTPException(422, "matrix reference needs a name or inline tables")


def matrix_model(M: mx.LogicMatrix) -> sc.MatrixModel:
    return sc.MatrixModel(**M.to_json() | {"name": M.name})


def create_app() -> FastAPI:
    app = FastAPI(title="De Morgan upset-logic workbench", version="0.1.0")

    # -- lattice ----------------------------------------------------------

    @app.post("/lattice/validate", response_model=sc.ValidationReport)
    def lattice_validate(body: sc.LatticeModel):
        try:
            L = lat.FiniteLattice(body.meet, body.join, body.neg, body.labels)
        except lat.MalformedTable as e:
            raise HTTPException(422, f"malformed tables: {e}")
        v = lat.validate_lattice(L)
        return sc.ValidationReport(valid=not v, violations=v)

    @app.post("/lattice/build", response_model=sc.MatrixModel)
    def lattice_build(body: sc.LatticeBuildRequest):
        try:
            if body.builder == "dm1":
                L = lat.build_dm1()
            elif body.builder == "boolean":
                L = lat.build_boolean(body.atoms or 1)
            elif body.builder == "product":
                L = lat.product([mx.catalog(f).lattice
                                 for f in (body.factors or [])])
            elif body.builder == "dual":
                L = lat.order_dual(mx.catalog((body.factors or ["DMm1"])[0]).lattice)
            elif body.builder == "free":
                L, _ = lat.free_de_morgan(body.generators or 1)
            else:
                raise HTTPException(422, f"unknown builder {body.builder!r}")
        except (ValueError, KeyError) as e:
            raise HTTPException(422, str(e))
        return sc.MatrixModel(**L.to_json())

    # -- matrices ----------------------------------------------------------

    @app.get("/matrix/catalog")
    def catalog_names():
        return {"atoms": list(mx.CATALOG_ATOMS)}

    @app.get("/matrix/catalog/{name}", response_model=sc.MatrixModel)
    def catalog_entry(name: str):
        try:
            return matrix_model(mx.catalog(name))
        except KeyError as e:
            raise HTTPException(404, str(e))

    @app.get("/matrix/catalog/{name}/dot")
    def catalog_dot(name: str):
        try:
            return {"dot": mx.catalog(name).to_dot()}
        except KeyError as e:
            raise HTTPException(404, str(e))

    @app.post("/matrix/substructures")
    def matrix_substructures(body: sc.MatrixRef):
        M = resolve_matrix(body)
        subs = mx.substructures(M)
        return {"count": len(subs),
                "classes": [matrix_model(s).model_dump() for s in subs]}

    @app.post("/matrix/leibniz", response_model=sc.MatrixModel)
    def matrix_leibniz(body: sc.MatrixRef):
        return matrix_model(mx.leibniz_reduct(resolve_matrix(body)))

    @app.post("/matrix/dual", response_model=sc.MatrixModel)
    def matrix_dual(body: sc.MatrixRef):
        return matrix_model(mx.de_morgan_dual(resolve_matrix(body)))

    # -- upsets ------------------------------------------------------------

    @app.post("/upset/classify", response_model=sc.UpsetClassification)
    def upset_classify(body: sc.UpsetRequest):
        M = resolve_matrix(body.matrix)
        members = body.members if body.members is not None \
            else M.designated_elements()
        mask = ups.mask_of(members)
        if not ups.is_upset(M.lattice, mask):
            return sc.UpsetClassification(
                members=members, is_upset=False, n_filter_degree=None,
                n_prime_degree=None, prime=False, flags={})
        flags = ups.classify_kind(M.lattice, mask)
        return sc.UpsetClassification(
            members=members, is_upset=True,
            n_filter_degree=ups.n_filter_degree(M.lattice, mask),
            n_prime_degree=ups.n_prime_degree(M.lattice, mask),
            prime=ups.is_prime(M.lattice, mask),
            flags=flags.as_dict())

    @app.post("/upset/generate")
    def upset_generate(body: sc.GenerateUpsetRequest):
        M = resolve_matrix(body.matrix)
        try:
            mask = ups.generate_kind_n_filter(
                M.lattice, ups.mask_of(body.subset), body.n, body.kind)
        except ValueError as e:
            raise HTTPException(422, str(e))
        return {"members": ups.elems_of(mask)}

    @app.post("/upset/separate")
    def upset_separate(body: sc.SeparateRequest):
        M = resolve_matrix(body.matrix)
        try:
            mask = ups.separate_prime(
                M.lattice, ups.mask_of(body.filter_members),
                ups.mask_of(body.ideal_members), body.n, body.kind)
        except ups.BadSeparationInput as e:
            raise HTTPException(422, e.reason)
        return {"members": ups.elems_of(mask)}

    # -- rules ---------------------------------------------------------------

    @app.post("/rule/check", response_model=sc.RuleCheckResponse)
    def rule_check(body: sc.RuleCheckRequest):
        M = resolve_matrix(body.matrix)
        try:
            r = fm.parse_rule(body.rule)
        except fm.ParseError as e:
            raise HTTPException(422, f"cannot parse rule: {e}")
        try:
            ok, cv = fm.rule_valid(r, M)
        except fm.VariableCapExceeded as e:
            raise HTTPException(422, str(e))
        return sc.RuleCheckResponse(rule=fm.print_rule(r),
                                    matrix=M.name or f"{M.size}-element",
                                    valid=ok, countervaluation=cv)

    @app.post("/rule/variant", response_model=sc.RuleTransformResponse)
    def rule_variant(body: sc.RuleCheckRequest):
        try:
            r = fm.parse_rule(body.rule)
            out = fm.disjunctive_variant(r)
        except (fm.ParseError, ValueError) as e:
            raise HTTPException(422, str(e))
        return sc.RuleTransformResponse(input=fm.print_rule(r),
                                        output=fm.print_rule(out))

    @app.get("/rule/catalog/{name}")
    def rule_catalog(name: str):
        try:
            out = fm.catalog_rules(name)
        except KeyError as e:
            raise HTTPException(404, str(e))
        if isinstance(out, list):
            return {"rules": [fm.print_rule(r) for r in out]}
        if isinstance(out, fm.Formula):
            return {"formula": fm.print_formula(out)}
        return {"rule": fm.print_rule(out)}

    # -- logics --------------------------------------------------------------

    @app.post("/logic/derive", response_model=sc.DeriveResponse)
    def logic_derive(body: sc.DeriveRequest):
        try:
            logic = lg.named_logic(body.logic)
        except KeyError as e:
            raise HTTPException(404, str(e))
        try:
            r = fm.parse_rule(body.rule)
        except fm.ParseError as e:
            raise HTTPException(422, str(e))
        if r.eq_premises:
            ok = all(fm.rule_valid(r, M)[0] for M in logic.matrices)
            return sc.DeriveResponse(logic=logic.name, rule=fm.print_rule(r),
                                     derivable=ok)
        ok, cex = lg.derives(logic, list(r.premises), r.conclusion)
        return sc.DeriveResponse(logic=logic.name, rule=fm.print_rule(r),
                                 derivable=ok, counterexample=cex)

    @app.post("/logic/compare", response_model=sc.CompareResponse)
    def logic_compare(body: sc.CompareRequest):
        try:
            l1 = lg.named_logic(body.left)
            l2 = lg.named_logic(body.right)
        except KeyError as e:
            raise HTTPException(404, str(e))
        a = lg.logic_leq_bounded(l1, l2, body.max_factors)
        b = lg.logic_leq_bounded(l2, l1, body.max_factors)
        return sc.CompareResponse(
            verdict=a.verdict, reverse_verdict=b.verdict,
            separating_rule=fm.print_rule(a.separating_rule)
            if a.separating_rule else None,
            reverse_separating_rule=fm.print_rule(b.separating_rule)
            if b.separating_rule else None,
            witnesses=a.witnesses, reverse_witnesses=b.witnesses)

    @app.post("/logic/pcp", response_model=sc.PcpResponse)
    def logic_pcp(body: sc.PcpRequest):
        try:
            logic = lg.named_logic(body.logic)
        except KeyError as e:
            raise HTTPException(404, str(e))
        try:
            pool = lg.npcp_pool(body.n, body.var_limit)
        except ValueError as e:
            raise HTTPException(422, str(e))
        verdict, info = lg.check_npcp(logic, body.n, pool)
        if verdict == "violation":
            return sc.PcpResponse(logic=logic.name, n=body.n,
                                  verdict=verdict, detail=info)
        return sc.PcpResponse(logic=logic.name, n=body.n, verdict=verdict,
                              pool_size=info)

    # -- hierarchy -------------------------------------------------------------

    @app.post("/hierarchy/enumerate", response_model=sc.HierarchyResponse)
    def hierarchy_enumerate(body: sc.HierarchyRequest):
        try:
            level = cached_level(body.kind, body.n)
        except ValueError as e:
            raise HTTPException(422, str(e))
        classes = [sc.HierarchyClassInfo(
            name=level.names[i], size=level.classes[i].size,
            designated=len(level.classes[i].designated_elements()),
            logic_class=level.logic_class_of[i])
            for i in range(len(level.classes))]
        nodes = edges = None
        if body.kind == "prime" and body.n == 2:
            nodes = list(hx.CORRECTED_POSET_NODES)
            edges = [[a, b] for a, b in hx.CORRECTED_POSET_EDGES]
        return sc.HierarchyResponse(kind=body.kind, n=body.n, classes=classes,
                                    logic_class_count=len(level.logic_reps),
                                    poset_nodes=nodes, poset_edges=edges)

    @app.post("/hierarchy/table", response_model=sc.TableReport)
    def hierarchy_table(corrected: bool = False):
        level = cached_level("prime", 2)
        all_ok, rows = hx.verify_separating_table(level, corrected=corrected)
        return sc.TableReport(corrected=corrected, all_ok=all_ok,
                              rows=[sc.TableRow(**r) for r in rows])

    @app.post("/hierarchy/axiomatize", response_model=sc.AxiomatizeResponse)
    def hierarchy_axiomatize(body: sc.AxiomatizeRequest):
        try:
            level = cached_level(body.kind, body.n)
            report = hx.axiomatize_downset(level, body.target)
        except (ValueError, hx.InconclusiveComparison) as e:
            raise HTTPException(422, str(e))
        return sc.AxiomatizeResponse(
            target=report.target, minimal_excluded=report.minimal_excluded,
            output_rules=[fm.print_rule(r) for r in report.output_rules],
            transcript=report.transcript, verified=report.verified)

    @app.post("/hierarchy/lattice", response_model=sc.LatticeOfLogicsResponse)
    def hierarchy_lattice(body: sc.HierarchyRequest):
        try:
            level = cached_level(body.kind, body.n)
            lattice = hx.build_logic_lattice(level)
        except (ValueError, hx.InconclusiveComparison) as e:
            raise HTTPException(422, str(e))
        families = [list(f) for f in lattice.node_families]
        return sc.LatticeOfLogicsResponse(
            kind=body.kind, n=body.n, node_count=len(lattice.node_families),
            cover_count=len(lattice.covers), distributive=lattice.distributive,
            node_families=families if len(families) <= 64 else None)

    @app.get("/hierarchy/poset/dot")
    def hierarchy_poset_dot(corrected: bool = True):
        if corrected:
            return {"dot": hx.poset_dot(hx.CORRECTED_POSET_NODES,
                                        hx.CORRECTED_POSET_EDGES,
                                        "corrected-order")}
        return {"dot": hx.poset_dot(hx.FIGURE_POSET_NODES,
                                    hx.FIGURE_POSET_EDGES, "published-order")}

    # -- prover ------------------------------------------------------------------

    @app.post("/prove", response_model=sc.ProveResponse)
    def prove_endpoint(body: sc.ProveRequest):
        try:
            goal = pv.parse_sequent(body.sequent)
            axioms = tuple(fm.parse_rule(a) for a in body.axioms)
        except fm.ParseError as e:
            raise HTTPException(422, str(e))
        if body.base == "BD1":
            bd1 = lg.bd(1)

            def oracle(prem, concl):
                return lg.derives(bd1, prem, concl)[0]
        elif body.base == "upsets":
            oracle = None
        else:
            raise HTTPException(422, f"unknown base {body.base!r}")
        cfg = pv.CalculusConfig(body.n, axioms, oracle,
                                max_depth=body.max_depth)
        proof = pv.prove(cfg, goal)
        if proof is None:
            return sc.ProveResponse(sequent=goal.text(), proved=False)
        return sc.ProveResponse(sequent=goal.text(), proved=True,
                                proof=proof.to_json(), pretty=proof.pretty())

    # -- verification suites -------------------------------------------------------

    @app.post("/verify/{suite}", response_model=sc.VerifySuiteResponse)
    def verify_suite(suite: str, corrected: bool = False):
        from ..verification import SUITES
        try:
            fn = SUITES[suite]
        except KeyError:
            raise HTTPException(404, f"unknown suite {suite!r}; "
                                     f"available: {sorted(SUITES)}")
        passed, lines = fn(corrected=corrected)
        return sc.VerifySuiteResponse(suite=suite, passed=passed, lines=lines)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    return app


app = create_app()
