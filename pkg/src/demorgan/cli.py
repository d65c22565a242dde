"""Command-line client for the workbench service.

The CLI is a thin HTTP client: by default it mounts the FastAPI app
in-process (so no server needs to run), and --server switches to a remote
instance.  Exit codes: 0 success/verified, 1 verification failure, 2 usage
error.
"""

from __future__ import annotations

import json
import os
import sys

import click
import httpx


class Client:
    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            from fastapi.testclient import TestClient
            from .service import app
            self._client = TestClient(app)

    def call(self, method: str, path: str, **kw):
        r = self._client.request(method, path, **kw)
        if r.status_code >= 500:
            raise click.ClickException(f"server error: {r.text}")
        if r.status_code >= 400:
            detail = r.json().get("detail", r.text)
            raise click.UsageError(str(detail))
        return r.json()


pass_client = click.make_pass_decorator(Client)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Remote service URL (default: run the app in-process).")
@click.option("--json", "as_json", is_flag=True, help="Emit raw JSON.")
@click.pass_context
def main(ctx, server, as_json):
    """Finite-matrix workbench for logics of upsets of De Morgan lattices."""
    ctx.obj = Client(server)
    ctx.obj.as_json = as_json


def emit(ctx_obj, data, human):
    if getattr(ctx_obj, "as_json", False):
        click.echo(json.dumps(data, indent=1))
    else:
        human(data)


def _write_dot(dot: str, path: str):
    with open(path, "w") as fh:
        fh.write(dot + "\n")
    click.echo(f"wrote {path}")


# -- lattice ----------------------------------------------------------------

@main.group()
def lattice():
    """Build, validate and show lattices."""


@lattice.command("build")
@click.argument("builder")
@click.option("--atoms", type=int, default=None)
@click.option("--factors", default=None, help="Comma-separated catalog names.")
@click.option("--generators", type=int, default=None)
@pass_client
def lattice_build(client, builder, atoms, factors, generators):
    """Builders: dm1 | boolean | product | dual | free."""
    body = {"builder": builder, "atoms": atoms,
            "factors": factors.split(",") if factors else None,
            "generators": generators}
    data = client.call("POST", "/lattice/build", json=body)
    emit(client, data, lambda d: click.echo(
        f"size {d['size']}, labels: {', '.join(d['labels'])}"))


@lattice.command("validate")
@click.argument("path", type=click.Path(exists=True))
@pass_client
def lattice_validate(client, path):
    """Validate a lattice JSON file."""
    with open(path) as fh:
        body = json.load(fh)
    data = client.call("POST", "/lattice/validate", json=body)

    def human(d):
        if d["valid"]:
            click.echo("VALID")
        else:
            for v in d["violations"]:
                click.echo(f"violation: {v}")
            sys.exit(1)

    emit(client, data, human)


@lattice.command("show")
@click.argument("name")
@click.option("--dot", "dot_path", default=None, type=click.Path())
@pass_client
def lattice_show(client, name, dot_path):
    """Show a catalog structure (tables, designated set, optional DOT)."""
    data = client.call("GET", f"/matrix/catalog/{name}")
    if dot_path:
        dot = client.call("GET", f"/matrix/catalog/{name}/dot")["dot"]
        _write_dot(dot, dot_path)
        return

    def human(d):
        click.echo(f"{name}: {d['size']} elements, "
                   f"designated {[d['labels'][i] for i in d['designated']]}")
        click.echo(f"labels: {', '.join(d['labels'])}")

    emit(client, data, human)


# -- matrix -------------------------------------------------------------------

@main.group()
def matrix():
    """Catalog structures, substructures, products."""


@matrix.command("catalog")
@click.argument("name", required=False)
@pass_client
def matrix_catalog(client, name):
    """List catalog names, or show one entry."""
    if name is None:
        data = client.call("GET", "/matrix/catalog")
        emit(client, data, lambda d: click.echo(" ".join(d["atoms"])))
        return
    data = client.call("GET", f"/matrix/catalog/{name}")
    emit(client, data, lambda d: click.echo(json.dumps(d, indent=1)))


@matrix.command("substructures")
@click.argument("name")
@pass_client
def matrix_substructures(client, name):
    """Substructure classes of a catalog matrix, up to isomorphism."""
    data = client.call("POST", "/matrix/substructures", json={"name": name})

    def human(d):
        click.echo(f"{d['count']} classes")
        for c in d["classes"]:
            click.echo(f"  size {c['size']}, designated {len(c['designated'])}")

    emit(client, data, human)


@matrix.command("dual-product")
@click.argument("names", nargs=-1, required=True)
@pass_client
def matrix_dual_product(client, names):
    """Dual product of catalog matrices."""
    data = client.call("GET", f"/matrix/catalog/{'@'.join(names)}")
    emit(client, data, lambda d: click.echo(
        f"{d['name']}: {d['size']} elements, "
        f"{len(d['designated'])} designated"))


# -- upset ---------------------------------------------------------------------

@main.group()
def upset():
    """Classify, generate and separate upsets."""


@upset.command("classify")
@click.option("--matrix", "name", required=True)
@click.option("--members", default=None,
              help="Comma-separated element indices (default: designated set).")
@pass_client
def upset_classify(client, name, members):
    body = {"matrix": {"name": name},
            "members": [int(x) for x in members.split(",")] if members else None}
    data = client.call("POST", "/upset/classify", json=body)

    def human(d):
        if not d["is_upset"]:
            click.echo("not an upset")
            sys.exit(1)
        flags = " ".join(k for k, v in d["flags"].items() if v) or "plain"
        click.echo(f"members {d['members']}: n-filter degree "
                   f"{d['n_filter_degree']}, n-prime degree "
                   f"{d['n_prime_degree']}, prime={d['prime']}, {flags}")

    emit(client, data, human)


@upset.command("generate")
@click.option("--matrix", "name", required=True)
@click.option("--subset", required=True, help="Comma-separated indices.")
@click.option("-n", type=int, default=1)
@click.option("--kind", default="plain")
@pass_client
def upset_generate(client, name, subset, n, kind):
    body = {"matrix": {"name": name},
            "subset": [int(x) for x in subset.split(",")],
            "n": n, "kind": kind}
    data = client.call("POST", "/upset/generate", json=body)
    emit(client, data, lambda d: click.echo(f"members: {d['members']}"))


@upset.command("separate")
@click.option("--matrix", "name", required=True)
@click.option("--filter", "filt", required=True, help="Comma-separated indices.")
@click.option("--ideal", required=True, help="Comma-separated indices.")
@click.option("-n", type=int, default=1)
@click.option("--kind", default="plain")
@pass_client
def upset_separate(client, name, filt, ideal, n, kind):
    body = {"matrix": {"name": name},
            "filter_members": [int(x) for x in filt.split(",")],
            "ideal_members": [int(x) for x in ideal.split(",")],
            "n": n, "kind": kind}
    data = client.call("POST", "/upset/separate", json=body)
    emit(client, data, lambda d: click.echo(f"prime extension: {d['members']}"))


# -- rule -----------------------------------------------------------------------

@main.group()
def rule():
    """Parse, transform and check rules."""


@rule.command("check")
@click.argument("rule_text")
@click.option("--matrix", "name", required=True)
@pass_client
def rule_check(client, rule_text, name):
    """Check a rule on a matrix: exit 0 VALID, 1 INVALID."""
    body = {"rule": rule_text, "matrix": {"name": name}}
    data = client.call("POST", "/rule/check", json=body)

    def human(d):
        if d["valid"]:
            click.echo("VALID")
        else:
            click.echo(f"INVALID  countervaluation: {d['countervaluation']}")
            sys.exit(1)

    emit(client, data, human)
    if getattr(client, "as_json", False) and not data["valid"]:
        sys.exit(1)


@rule.command("variant")
@click.argument("rule_text")
@pass_client
def rule_variant(client, rule_text):
    """Disjunctive variant of a rule."""
    data = client.call("POST", "/rule/variant",
                       json={"rule": rule_text, "matrix": {"name": "DMm1"}})
    emit(client, data, lambda d: click.echo(d["output"]))


@rule.command("catalog")
@click.argument("name")
@pass_client
def rule_catalog(client, name):
    """Named rules, e.g. n_adjunction(2), lem, separating(Q7), ecq(2)."""
    data = client.call("GET", f"/rule/catalog/{name}")

    def human(d):
        if "rule" in d:
            click.echo(d["rule"])
        elif "formula" in d:
            click.echo(d["formula"])
        else:
            for r in d["rules"]:
                click.echo(r)

    emit(client, data, human)


# -- logic ---------------------------------------------------------------------

@main.group()
def logic():
    """Derivability, comparison and case-split checks."""


@logic.command("derive")
@click.argument("rule_text")
@click.option("--logic", "logic_name", required=True,
              help="BD1, BD2, LP1, K1, KO2, CL1, ETL, ABF, ECQ, Kminus, "
                   "or catalog names joined with '+'.")
@pass_client
def logic_derive(client, rule_text, logic_name):
    body = {"logic": logic_name, "rule": rule_text}
    data = client.call("POST", "/logic/derive", json=body)

    def human(d):
        if d["derivable"]:
            click.echo("DERIVABLE")
        else:
            click.echo(f"NOT DERIVABLE  counterexample: {d['counterexample']}")
            sys.exit(1)

    emit(client, data, human)


@logic.command("compare")
@click.argument("left")
@click.argument("right")
@click.option("--max-factors", type=int, default=3)
@pass_client
def logic_compare(client, left, right, max_factors):
    body = {"left": left, "right": right, "max_factors": max_factors}
    data = client.call("POST", "/logic/compare", json=body)

    def human(d):
        click.echo(f"{left} <= {right}: {d['verdict']}"
                   + (f" (separating rule: {d['separating_rule']})"
                      if d["separating_rule"] else ""))
        click.echo(f"{right} <= {left}: {d['reverse_verdict']}"
                   + (f" (separating rule: {d['reverse_separating_rule']})"
                      if d["reverse_separating_rule"] else ""))

    emit(client, data, human)


@logic.command("pcp")
@click.option("--logic", "logic_name", required=True)
@click.option("-n", type=int, default=1)
@click.option("--var-limit", type=int, default=4)
@pass_client
def logic_pcp(client, logic_name, n, var_limit):
    body = {"logic": logic_name, "n": n, "var_limit": var_limit}
    data = client.call("POST", "/logic/pcp", json=body)

    def human(d):
        if d["verdict"] == "violation":
            click.echo(f"VIOLATION: {d['detail']}")
            sys.exit(1)
        click.echo(f"no violation in pool ({d['pool_size']} instances)")

    emit(client, data, human)


# -- hierarchy --------------------------------------------------------------------

@main.group(invoke_without_command=True)
@click.option("--kind", default="prime")
@click.option("--n", "level_n", type=int, default=2)
@click.option("--dot", "dot_path", default=None, type=click.Path())
@click.pass_context
def hierarchy(ctx, kind, level_n, dot_path):
    """Substructure hierarchies (default action: enumerate)."""
    if ctx.invoked_subcommand is not None:
        return
    client = ctx.obj
    data = client.call("POST", "/hierarchy/enumerate",
                       json={"kind": kind, "n": level_n})
    if dot_path:
        dot = client.call("GET", "/hierarchy/poset/dot?corrected=true")["dot"]
        _write_dot(dot, dot_path)

    def human(d):
        click.echo(f"level ({d['kind']},{d['n']}): {len(d['classes'])} "
                   f"classes, {d['logic_class_count']} logic classes")
        for c in d["classes"]:
            click.echo(f"  {c['name']:12s} size {c['size']:3d} "
                       f"designated {c['designated']:3d} "
                       f"logic class {c['logic_class']}")

    emit(client, data, human)


@hierarchy.command("verify")
@click.option("--corrected", is_flag=True)
@pass_client
def hierarchy_verify(client, corrected):
    """Verify the separating-rule table against the computed order."""
    data = client.call("POST", f"/hierarchy/table?corrected={str(corrected).lower()}")

    def human(d):
        for row in d["rows"]:
            tag = {True: "PASS", False: "FAIL", None: "OPEN"}[row["ok"]]
            click.echo(f"{tag}  {row['structure']}: {row['rule']}")
        if not d["all_ok"]:
            sys.exit(1)

    emit(client, data, human)
    if getattr(client, "as_json", False) and not data["all_ok"]:
        sys.exit(1)


@hierarchy.command("axiomatize")
@click.option("--kind", default="prime")
@click.option("--n", "level_n", type=int, default=2)
@click.argument("target", nargs=-1, required=True)
@pass_client
def hierarchy_axiomatize(client, kind, level_n, target):
    """Axiomatize the logic of a downward closed family of classes."""
    body = {"kind": kind, "n": level_n, "target": list(target)}
    data = client.call("POST", "/hierarchy/axiomatize", json=body)

    def human(d):
        click.echo(f"minimal excluded: {', '.join(d['minimal_excluded'])}")
        for r in d["output_rules"]:
            click.echo(f"  axiom: {r}")
        click.echo("verified" if d["verified"] else "VERIFICATION FAILED")
        if not d["verified"]:
            sys.exit(1)

    emit(client, data, human)


@hierarchy.command("lattice")
@click.option("--kind", default="filter")
@click.option("--n", "level_n", type=int, default=1)
@pass_client
def hierarchy_lattice(client, kind, level_n):
    """Lattice of distinct logics at a level."""
    body = {"kind": kind, "n": level_n}
    data = client.call("POST", "/hierarchy/lattice", json=body)

    def human(d):
        click.echo(f"{d['node_count']} logics, {d['cover_count']} covers, "
                   f"distributive={d['distributive']}")
        if d.get("node_families"):
            for fam in d["node_families"]:
                click.echo(f"  {{{', '.join(fam) or 'trivial'}}}")

    emit(client, data, human)


# -- prover -----------------------------------------------------------------------

@main.command("prove")
@click.argument("sequent_text")
@click.option("-n", type=int, default=2, help="Case-split arity.")
@click.option("--axiom", "axioms", multiple=True,
              help="Axiom schema as a rule; repeatable.")
@click.option("--base", default="upsets", type=click.Choice(["upsets", "BD1"]))
@click.option("--max-depth", type=int, default=6)
@pass_client
def prove_cmd(client, sequent_text, n, axioms, base, max_depth):
    """Proof search in the case-split sequent calculus."""
    body = {"sequent": sequent_text, "n": n, "axioms": list(axioms),
            "base": base, "max_depth": max_depth}
    data = client.call("POST", "/prove", json=body)

    def human(d):
        if d["proved"]:
            click.echo(d["pretty"])
        else:
            click.echo("not found within bounds")
            sys.exit(1)

    emit(client, data, human)


# -- verify ----------------------------------------------------------------------

@main.command("verify")
@click.argument("suite")
@click.option("--corrected", is_flag=True,
              help="Verify against the corrected order/table where the "
                   "published data is defective.")
@pass_client
def verify_cmd(client, suite, corrected):
    """Bundled reproduction suites: algebra nfilters table1 figure4
    lattices abf npcp reductions section4 prover."""
    data = client.call(
        "POST", f"/verify/{suite}?corrected={str(corrected).lower()}")

    def human(d):
        for line in d["lines"]:
            click.echo(line)
        click.echo("VERIFIED" if d["passed"] else "VERIFICATION FAILED")
        if not d["passed"]:
            sys.exit(1)

    emit(client, data, human)
    if getattr(client, "as_json", False) and not data["passed"]:
        sys.exit(1)


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the workbench service."""
    import uvicorn
    uvicorn.run("demorgan.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
