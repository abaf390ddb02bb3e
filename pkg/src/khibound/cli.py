"""Command-line front end: ``khibound <subcommand> ...``.

Exit codes: 0 success, 1 table rows disagree with the reference, 2 a bound
was returned after the search budget ran out, 3 bad input, 4 unknown knot
name, 5 certificate mismatch, 70 internal invariant violated.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from importlib import metadata, resources
from pathlib import Path

from .alexander import alexander_poly, khi_lower_bound
from .errors import KhiError
from .heegaard_builder import BuildChoice, build_sutured_handlebody, choose_construction
from .knot_io import KnotDiagram, bundled_names, resolve
from .reduction_engine import (STRATEGIES, BoundCertificate, SearchConfig, replay, tree_size,
                               upper_bound_report)
from .suture_model import VanishingRuleSet, region_report
from .surgery_calc import SurgeryQuery, parse_slope, parse_slope_grid, surgery_dim

EXIT_OK, EXIT_MISMATCH, EXIT_BUDGET = 0, 1, 2

BUDGETS = {
    "default": (10**6, 600.0),
    "extended": (10**8, 4 * 3600.0),
}


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


@dataclass
class RunRecord:
    knot: str
    pd_hash: str
    upper: int
    lower: int
    alexander: str
    sharp: bool
    budget_exhausted: bool
    construction: str
    certificate: str | None
    config: str
    wall_time: float
    version: str
    reference: int | None = None
    match: bool | None = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise KhiError(f"lower bound {self.lower} exceeds upper bound {self.upper}")


def load_reference() -> dict[str, tuple[int, str]]:
    text = resources.files("khibound").joinpath("data/reference.csv").read_text()
    rows = csv.DictReader(ln for ln in text.splitlines() if not ln.startswith("#"))
    return {r["name"]: (int(r["bound"]), r["alexander_printed"]) for r in rows}


def record_schema() -> dict:
    text = resources.files("khibound").joinpath("data/run_record.schema.json").read_text()
    return json.loads(text)


# ------------------------------------------------------------------ config

def _env_int(name: str) -> int | None:
    v = os.environ.get(name)
    return int(v) if v else None


def _env_float(name: str) -> float | None:
    v = os.environ.get(name)
    return float(v) if v else None


def config_from_args(args) -> SearchConfig:
    nodes, seconds = BUDGETS[args.budget]
    nodes = args.node_budget or _env_int("KHIBOUND_NODE_BUDGET") or nodes
    seconds = args.time_budget or _env_float("KHIBOUND_TIME_BUDGET") or seconds
    workers = args.workers or _env_int("KHIBOUND_WORKERS") or 1
    if args.rules is not None:
        rules = VanishingRuleSet.from_names([r for r in args.rules.split(",") if r])
    elif args.sharpen:
        rules = VanishingRuleSet.sharpen()
    else:
        rules = VanishingRuleSet()
    return SearchConfig(
        strategy=args.strategy,
        beam_width=args.beam_width,
        depth_cap=args.depth_cap,
        rules=rules,
        node_budget=nodes,
        time_budget=seconds,
        memo=not args.no_memo,
        seed=args.seed,
        lower_bound=args.lower_bound,
        workers=workers,
    )


def _cache_path(cache_dir: str | None, d: KnotDiagram, cfg: SearchConfig) -> Path | None:
    cache_dir = cache_dir or os.environ.get("KHIBOUND_CACHE_DIR")
    if not cache_dir:
        return None
    h = hashlib.sha256(cfg.snapshot().encode()).hexdigest()[:16]
    return Path(cache_dir) / f"{d.pd_hash}-{h}.cert"


def run_bound(d: KnotDiagram, cfg: SearchConfig, cache_dir: str | None = None,
              cert_path: str | None = None) -> tuple[RunRecord, BoundCertificate]:
    t0 = time.monotonic()
    name = d.name or "-"
    cached = _cache_path(cache_dir, d, cfg)
    cert = None
    if cached is not None and cached.exists():
        cert = BoundCertificate.from_text(cached.read_text())
        cs = build_sutured_handlebody(d, _parse_choice(cert.construction))
        replay(cert, cs)
    if cert is None:
        cs, choice = choose_construction(d)
        lower = khi_lower_bound(alexander_poly(d))
        _, cert, _ = upper_bound_report(cs, cfg, lower, knot=name, pd_hash=d.pd_hash,
                                        construction=choice.describe())
        if cached is not None:
            cached.parent.mkdir(parents=True, exist_ok=True)
            cached.write_text(cert.to_text())
    if cert_path:
        Path(cert_path).write_text(cert.to_text())
    poly = alexander_poly(d)
    rec = RunRecord(
        knot=name,
        pd_hash=d.pd_hash,
        upper=cert.bound,
        lower=khi_lower_bound(poly),
        alexander=str(poly),
        sharp=cert.bound == khi_lower_bound(poly),
        budget_exhausted=cert.budget_exhausted,
        construction=cert.construction,
        certificate=cert_path,
        config=cfg.snapshot(),
        wall_time=round(time.monotonic() - t0, 3),
        version=version(),
    )
    return rec, cert


def _parse_choice(text: str) -> BuildChoice | None:
    if text == "-":
        return None
    kv = dict(item.split("=", 1) for item in text.split())
    return BuildChoice(int(kv["start"]), kv["reverse"] == "1", int(kv["torsion"]))


# ------------------------------------------------------------------ output

def emit(rows: list[dict], fmt: str, out=None, text_line=None, single: bool = False):
    """Write rows as text lines, CSV, or JSON (one object when ``single``)."""
    out = out or sys.stdout
    if fmt == "json":
        json.dump(rows[0] if single else rows, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        if rows:
            w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    else:
        for r in rows:
            out.write((text_line(r) if text_line else " ".join(f"{k}={v}" for k, v in r.items())) + "\n")


def _bound_line(r: dict) -> str:
    verdict = "sharp" if r["sharp"] else "not-sharp"
    s = f"upper={r['upper']} lower={r['lower']} {verdict}"
    if r["budget_exhausted"]:
        s += " budget-exhausted"
    return s


# ------------------------------------------------------------------ commands

def cmd_bound(args) -> int:
    d = resolve(args.knot, dt=args.dt)
    cfg = config_from_args(args)
    rec, cert = run_bound(d, cfg, args.cache_dir, args.cert)
    emit([asdict(rec)], args.format, text_line=_bound_line, single=True)
    if args.verbose:
        inner, leaves = tree_size(cert.tree)
        print(f"moves={inner} leaves={leaves} rules={','.join(cert.rules_used) or '-'} "
              f"construction={cert.construction}", file=sys.stderr)
    return EXIT_BUDGET if rec.budget_exhausted else EXIT_OK


def cmd_table(args) -> int:
    ref = load_reference()
    names = [n for n in bundled_names() if n != "10_153"]
    for extra in args.include or []:
        if extra not in names:
            names.append(extra)
    cfg = config_from_args(args)
    rows = []
    ok = True
    for name in names:
        d = resolve(name)
        rec, _ = run_bound(d, cfg, args.cache_dir,
                           str(Path(args.cert_dir) / f"{name}.cert") if args.cert_dir else None)
        if name in ref:
            rec.reference = ref[name][0]
            rec.match = rec.upper == rec.reference
            if d.c <= 7 and not rec.match:
                ok = False
        elif name == "unknot":
            rec.reference, rec.match = 1, rec.upper == 1
            ok = ok and rec.match
        rows.append(asdict(rec))
    if args.out:
        with open(args.out, "w") as fh:
            emit(rows, "json" if args.out.endswith(".json") else "csv", fh)
    emit(rows, args.format, text_line=lambda r: (
        f"{r['knot']:8} upper={r['upper']:<3} lower={r['lower']:<3} reference={r['reference']} "
        f"{'match' if r['match'] else 'MISMATCH'}{' budget-exhausted' if r['budget_exhausted'] else ''}"))
    if args.figure:
        table_figure(rows, args.figure)
    small = [r for r in rows if r["knot"] != "10_153"]
    print(f"{sum(1 for r in small if r['match'])}/{len(small)} small-knot rows match", file=sys.stderr)
    return EXIT_OK if ok else EXIT_MISMATCH


def table_figure(rows: list[dict], path: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = [r["knot"] for r in rows]
    x = range(len(rows))
    fig, ax = plt.subplots(figsize=(8, 3.6))
    ax.bar([i - 0.2 for i in x], [r["upper"] for r in rows], width=0.4, label="computed upper bound")
    ax.bar([i + 0.2 for i in x], [r["lower"] for r in rows], width=0.4, label="Alexander lower bound")
    ref = [(i, r["reference"]) for i, r in zip(x, rows) if r["reference"] is not None]
    ax.plot([i for i, _ in ref], [v for _, v in ref], "k_", markersize=14, label="reference")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=45)
    ax.set_ylabel("dim KHI bound")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_alexander(args) -> int:
    d = resolve(args.knot, dt=args.dt)
    p = alexander_poly(d)
    row = {"knot": d.name or "-", "alexander": str(p), "lower": khi_lower_bound(p),
           "coefficients": json.dumps(p.to_json()) if args.format == "csv" else p.to_json()}
    emit([row], args.format, text_line=lambda r: f"{r['alexander']}  (lower={r['lower']})", single=True)
    return EXIT_OK


def cmd_build(args) -> int:
    d = resolve(args.knot, dt=args.dt)
    cs, choice = choose_construction(d)
    rep = region_report(cs, require_two=True)
    row = {
        "knot": d.name or "-",
        "genus": cs.genus,
        "counts": list(cs.counts),
        "gamma_components": len(cs.gamma_components),
        "euler_plus_minus": list(rep.euler_pair),
        "construction": choice.describe(),
        "key": cs.key_digest(),
    }
    if args.dump:
        Path(args.dump).write_text(cs.serialize())
    emit([row], args.format, single=True)
    return EXIT_OK


def cmd_surgery(args) -> int:
    p, q = parse_slope(args.slope)
    scenarios = [args.scenario] if args.scenario else [1, 2]
    row = {"genus": args.genus, "slope": f"{p}/{q}"}
    for s in scenarios:
        row[f"scenario{s}"] = surgery_dim(SurgeryQuery(p, q, args.genus, s))
    emit([row], args.format, single=True)
    return EXIT_OK


def cmd_surgery_table(args) -> int:
    rows = []
    for p, q in parse_slope_grid(args.slopes):
        rows.append({"genus": args.genus, "slope": f"{p}/{q}",
                     "scenario1": surgery_dim(SurgeryQuery(p, q, args.genus, 1)),
                     "scenario2": surgery_dim(SurgeryQuery(p, q, args.genus, 2))})
    emit(rows, args.format)
    return EXIT_OK


def cmd_replay(args) -> int:
    cert = BoundCertificate.from_text(Path(args.cert).read_text())
    if args.knot:
        d = resolve(args.knot, dt=args.dt)
        cs = build_sutured_handlebody(d, _parse_choice(cert.construction))
    else:
        cs = cert.system
    bound = replay(cert, cs)
    emit([{"bound": bound, "knot": cert.knot, "verified": True}], args.format, single=True)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _search_flags(p: argparse.ArgumentParser, strategy: str = "exhaustive", sharpen: bool = True):
    p.add_argument("--strategy", choices=STRATEGIES, default=strategy)
    p.add_argument("--beam-width", type=int, default=3)
    p.add_argument("--depth-cap", type=int, default=None)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--sharpen", action="store_true", default=sharpen,
                   help="enable all vanishing rules V0, V1, V2 (default)")
    g.add_argument("--no-sharpen", dest="sharpen", action="store_false",
                   help="every leaf is worth 1")
    p.add_argument("--rules", default=None, help="comma-separated subset of V0,V1,V2")
    p.add_argument("--budget", choices=sorted(BUDGETS), default="default")
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-memo", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lower-bound", choices=("torsion", "none"), default="torsion")
    p.add_argument("--cache-dir", default=None)


def _fmt(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="khibound", description="Upper bounds on instanton knot homology.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {version()}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="upper bound for one knot")
    p.add_argument("knot", help="bundled name (3_1, ...), PD code, or DT code with --dt")
    p.add_argument("--dt", action="store_true")
    p.add_argument("--cert", default=None, help="write the certificate here")
    p.add_argument("-v", "--verbose", action="store_true")
    _search_flags(p)
    _fmt(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("table", help="recompute every bundled row")
    p.add_argument("--include", action="append", help="extra knots, e.g. 10_153")
    p.add_argument("--out", default=None, help="copy of the table: JSON if the name ends in .json, else CSV")
    p.add_argument("--figure", default=None, help="matplotlib figure file")
    p.add_argument("--cert-dir", default=None)
    _search_flags(p)
    _fmt(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("alexander", help="Alexander polynomial")
    p.add_argument("knot")
    p.add_argument("--dt", action="store_true")
    _fmt(p)
    p.set_defaults(func=cmd_alexander)

    p = sub.add_parser("build", help="construct the sutured handlebody")
    p.add_argument("knot")
    p.add_argument("--dt", action="store_true")
    p.add_argument("--dump", default=None, help="write the curve system here")
    _fmt(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("surgery", help="framed instanton dimension of r-surgery")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--slope", required=True, help="P/Q; write negative slopes as --slope=-P/Q")
    p.add_argument("--scenario", type=int, choices=(1, 2), default=None)
    _fmt(p)
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("surgery-table", help="surgery dimensions over a slope grid")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--slopes", required=True, help="PMIN:PMAX/QMIN:QMAX or P/Q,P/Q,...")
    _fmt(p)
    p.set_defaults(func=cmd_surgery_table)

    p = sub.add_parser("replay", help="check a certificate")
    p.add_argument("cert")
    p.add_argument("--knot", default=None, help="rebuild the system from this knot instead")
    p.add_argument("--dt", action="store_true")
    _fmt(p)
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KhiError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
