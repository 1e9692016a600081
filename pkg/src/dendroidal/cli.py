"""Command-line interface: ``dendroidal {trees,homology,verify,export}``.

Exit codes: 0 when every check passes, 1 on a mathematical failure (the
certificates say where), 2 on usage or bounds errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

from .barcobar import (
    Bar,
    CoBar,
    check_coassociativity,
    check_structure_maps,
    check_structure_naturality,
    describe_bar,
    describe_cobar,
    export_complex,
)
from .dhomology import build_dc, category_pair_homology, dendroidal_homology
from .duality import (
    all_pass,
    certificate,
    correspondence,
    triangle_identities,
    universal_cocycle,
    verify_duality,
)
from .exactalg import ContractViolation
from .presheaf import check_functoriality, parse_presheaf
from .trees import Tree, TreeError, comma_poset, enumerate_trees

BOUNDS = {"homology": 6, "bar": 5, "cobar": 5, "duality": 4, "adjunction": 4, "dc": 6, "oracle": 6, "trees": 7}
DUALITY_SEEDS = 25
BUDGET_ENV = "DENDROIDAL_BUDGET"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    presheaf: str | None
    leaves: list
    seed: int
    fmt: str
    budget: int
    out: str | None
    unsafe: bool


def parse_leaves(text: str) -> list:
    """``"4"``, ``"2-5"`` or ``"2,3"``."""
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse leaf range {text!r}") from None


def check_bounds(kind: str, leaves: list, unsafe: bool) -> None:
    bound = BOUNDS[kind]
    for n in leaves:
        if n < 2:
            raise UsageError(f"leaf count {n} is below 2")
        if n > bound:
            if not unsafe:
                raise UsageError(f"leaf count {n} exceeds the {kind} bound {bound} (pass --unsafe-bounds to override)")
            print(f"warning: {kind} at {n} leaves may take very long", file=sys.stderr)
        if n > 7:
            raise UsageError("trees with more than 7 leaves are not supported")


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return 3
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def load(desc: str, leaves, budget: int):
    try:
        return parse_presheaf(desc, tuple(leaves), budget)
    except (ValueError, TreeError) as err:
        raise UsageError(str(err)) from None


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- trees --------------------------------------------------------------------


def cmd_trees(cfg: RunConfig, mode: str) -> int:
    check_bounds("trees", cfg.leaves, cfg.unsafe)
    rows = []
    for n in cfg.leaves:
        if mode == "count":
            rows.append({"leaves": n, "count": len(enumerate_trees(n))})
        elif mode == "list":
            rows.extend({"leaves": n, "tree": t.term()} for t in enumerate_trees(n))
        else:
            rows.extend({"leaves": n, "lower": s.term(), "upper": t.term()} for s, t in comma_poset(n).hasse_edges)
    if cfg.fmt == "json":
        emit(cfg, json.dumps(rows, indent=2))
    elif cfg.fmt == "csv":
        emit(cfg, _csv(rows))
    else:
        lines = []
        for r in rows:
            if mode == "count":
                lines.append(str(r["count"]) if len(cfg.leaves) == 1 else f"{r['leaves']}\t{r['count']}")
            elif mode == "list":
                lines.append(r["tree"])
            else:
                lines.append(f"{r['lower']} < {r['upper']}")
        emit(cfg, "\n".join(lines))
    return 0


def _csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# -- homology ----------------------------------------------------------------


def cmd_homology(cfg: RunConfig) -> int:
    check_bounds("homology", cfg.leaves, cfg.unsafe)
    results = []
    for n in cfg.leaves:
        m = load(cfg.presheaf, [n], cfg.budget)
        results.append((n, dendroidal_homology(m, n)))
    if cfg.fmt == "json":
        emit(cfg, json.dumps([{"presheaf": cfg.presheaf, "leaves": n, "homology": h.to_json()} for n, h in results], indent=2))
    elif cfg.fmt == "csv":
        rows = [
            {"leaves": n, "degree": g.degree, "betti": g.betti, "torsion": " ".join(map(str, g.torsion))}
            for n, h in results
            for g in h.groups
        ]
        emit(cfg, _csv(rows))
    else:
        lines = []
        for n, h in results:
            lines.append(f"{cfg.presheaf}, {n} leaves")
            lines.append("degree  betti  torsion")
            for g in h.groups:
                tors = " ".join(f"Z/{t}" for t in g.torsion) or "-"
                lines.append(f"{g.degree:>6}  {g.betti:>5}  {tors}")
        emit(cfg, "\n".join(lines))
    return 0


# -- verify ------------------------------------------------------------------


def _single(check: str, desc: str, n: int, ok: bool, witness=None) -> dict:
    return certificate(check, desc, n, Tree.corolla(n), ok, witness=witness)


def verify_dc(desc: str, m, n: int) -> list:
    try:
        dc = build_dc(m, n, check=True)
        ok, wit = True, None
    except ContractViolation as err:
        return [_single("dc", desc, n, False, str(err))]
    bad = dc.check_simplicial_identities()
    if bad:
        ok, wit = False, repr(bad[0])
    return [_single("dc", desc, n, ok, wit)]


def verify_bar(desc: str, m, n: int, cobar: bool) -> list:
    b = Bar(m)
    x = CoBar(b) if cobar else b
    name = "cobar" if cobar else "bar"
    certs = []
    for t in enumerate_trees(n):
        try:
            x.double(t).check()
            certs.append(certificate(name, desc, n, t, True))
        except ContractViolation as err:
            certs.append(certificate(name, desc, n, t, False, witness=str(err)))
    rep = check_functoriality(x, n, pairs=n <= 4)
    certs.append(_single(name + "-functoriality", desc, n, rep.ok, rep.failure))
    if hasattr(m, "theta"):
        for label, r in (
            ("structure", check_structure_maps(x, n, quasi_iso=True)),
            ("coassociativity", check_coassociativity(x, n)),
            ("structure-naturality", check_structure_naturality(x, n)),
        ):
            certs.append(_single(f"{name}-{label}", desc, n, r.ok, r.failure))
    return certs


def verify_adjunction(desc: str, m, n: int) -> list:
    tb, tc = triangle_identities(m, n)
    corr = correspondence(universal_cocycle(m, n))
    return [
        _single("triangle", desc, n, tb.ok, tb.failure),
        _single("triangle", f"Bar({desc})", n, tc.ok, tc.failure),
        _single("twisting", desc, n, corr.consistent and corr.maurer_cartan, None if corr.consistent else repr(corr)),
    ]


def verify_oracle(desc: str, m, n: int) -> list:
    a = dendroidal_homology(m, n)
    b = category_pair_homology(m, n)
    ok = a.table() == b.table()
    return [_single("oracle", desc, n, ok, None if ok else {"dendroidal": a.to_json(), "category_pair": b.to_json()})]


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    kind = suite if suite in BOUNDS else "duality"
    check_bounds(kind, cfg.leaves, cfg.unsafe)
    if cfg.presheaf:
        descs = [cfg.presheaf]
    elif suite == "duality":
        descs = [f"random:{cfg.seed + i}" for i in range(DUALITY_SEEDS)]
    else:
        descs = ["nass", "ncom", f"random:{cfg.seed}"]
    certs = []
    for n in cfg.leaves:
        for desc in descs:
            m = load(desc, [n], cfg.budget)
            if suite == "dc":
                certs += verify_dc(desc, m, n)
            elif suite in ("bar", "cobar"):
                certs += verify_bar(desc, m, n, suite == "cobar")
            elif suite == "adjunction":
                certs += verify_adjunction(desc, m, n)
            elif suite == "duality":
                certs += verify_duality(m, n)
            else:
                certs += verify_oracle(desc, m, n)
    ok = all_pass(certs)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(certs, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if cfg.fmt == "json" and not cfg.out:
        print(json.dumps(certs, indent=2, sort_keys=True))
    else:
        failed = [c for c in certs if c["status"] != "pass"]
        print(f"verify {suite}: {'pass' if ok else 'fail'} ({len(certs)} certificates, {len(descs)} presheaves)")
        for c in failed[:10]:
            print(f"  FAIL {c['check']} {c['presheaf']} {c['tree']}: {c.get('witness')}")
    return 0 if ok else 1


# -- export ------------------------------------------------------------------


def cmd_export(cfg: RunConfig, what: str) -> int:
    check_bounds("homology" if what == "dc" else what, cfg.leaves, cfg.unsafe)
    dumps = []
    for n in cfg.leaves:
        m = load(cfg.presheaf, [n], cfg.budget)
        if what == "dc":
            dc = build_dc(m, n, check=False)

            def describe(key):
                t, x = key
                return {"S": Tree.corolla(n).term(), "T": t.term(), "d": [], "e": [sorted(c) for c in t.inner_edges], "coeff": repr(x), "sign": 1}

            complexes = {Tree.corolla(n).term(): export_complex(dc.total(), describe)}
        else:
            x = Bar(m) if what == "bar" else CoBar(Bar(m))
            desc_fn = describe_bar if what == "bar" else describe_cobar
            complexes = {t.term(): export_complex(x.value(t), desc_fn(t)) for t in enumerate_trees(n)}
        dumps.append({"what": what, "presheaf": cfg.presheaf, "leaves": n, "complexes": complexes})
    emit(cfg, json.dumps(dumps if len(dumps) > 1 else dumps[0], indent=2, sort_keys=True))
    return 0


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--leaves", required=True, help="leaf count: N, A-B or A,B,...")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out")
    common.add_argument("--budget", type=int, default=None, help=f"size budget for random presheaves (default ${BUDGET_ENV} or 3)")
    common.add_argument("--unsafe-bounds", action="store_true")

    p = argparse.ArgumentParser(prog="dendroidal", description="Exact dendroidal homology, bar and cobar constructions.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trees", parents=[common], help="enumerate trees")
    g = t.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_const", dest="mode", const="list")
    g.add_argument("--count", action="store_const", dest="mode", const="count")
    g.add_argument("--poset", action="store_const", dest="mode", const="poset")
    t.set_defaults(mode="count")

    h = sub.add_parser("homology", parents=[common], help="dendroidal homology table")
    h.add_argument("--presheaf", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=("dc", "bar", "cobar", "adjunction", "duality", "oracle"))
    v.add_argument("--presheaf")

    e = sub.add_parser("export", parents=[common], help="dump a complex as JSON")
    e.add_argument("what", choices=("dc", "bar", "cobar"))
    e.add_argument("--presheaf", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            command=args.command,
            presheaf=getattr(args, "presheaf", None),
            leaves=parse_leaves(args.leaves),
            seed=args.seed,
            fmt=args.format,
            budget=args.budget if args.budget is not None else default_budget(),
            out=args.out,
            unsafe=args.unsafe_bounds,
        )
        if args.command == "trees":
            return cmd_trees(cfg, args.mode)
        if args.command == "homology":
            return cmd_homology(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        return cmd_export(cfg, args.what)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
