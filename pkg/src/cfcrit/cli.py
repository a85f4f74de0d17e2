"""Command-line frontend.

Subcommands: analyze, kim-series, simulate, construct-psi, diagnostics.
All outputs are deterministic given the flags: every file starts with
header comments embedding the tool version, the full configuration and
the seed, and reruns produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .cf import InsufficientPrecision, SpecError, table_for
from .criteria import (
    DEFAULT_EPS_GRID,
    DEFAULT_GAP,
    DEFAULT_WINDOW,
    INCONCLUSIVE,
    classify,
    condition_b_report,
    kim_series,
)
from .sequences import (
    dual_phi,
    dual_psi,
    dyadic_block_psi,
    dyadic_diagnostics,
    khinchin_validate,
    phi_step_from_indices,
)
from .sim import hit_count, tail_measure_profile, union_bound_tail
from .specfiles import (
    format_psi,
    load_phi,
    load_psi,
    load_theta,
    save,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _header(config: dict, seed=None) -> list[str]:
    lines = [f"# cfcrit {__version__}"]
    cfg = json.dumps(config, sort_keys=True, default=str)
    lines.append(f"# config = {cfg}")
    if seed is not None:
        lines.append(f"# seed = {seed}")
    return lines


def _write_csv(path: Path, header_lines, columns, rows):
    text = "\n".join(header_lines) + "\n" + ",".join(columns) + "\n"
    text += "\n".join(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text(text + "\n", newline="\n")


def _write_json(path: Path, config, seed, tree):
    doc = {"tool": f"cfcrit {__version__}", "config": config, "seed": seed, "report": tree}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n", newline="\n")


def _int_list(s: str) -> list[int]:
    return [int(tok) for tok in s.replace(",", " ").split()]


def _float_list(s: str) -> list[float]:
    return [float(tok) for tok in s.replace(",", " ").split()]


def cmd_analyze(args) -> int:
    theta = load_theta(args.theta)
    eps_grid = _float_list(args.eps_grid) if args.eps_grid else list(DEFAULT_EPS_GRID)
    config = {
        "command": "analyze",
        "theta": Path(args.theta).name,
        "depth": args.depth,
        "eps_grid": eps_grid,
        "window": args.window,
    }
    table = table_for(theta, args.depth, numerators=False)
    cls = classify(table, window=args.window)
    condb = condition_b_report(table, eps_grid=eps_grid, window=args.window)
    tree = {"classify": cls.to_tree(), "condition_b": condb.to_tree()}
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_json(outdir / "analyze_report.json", config, None, tree)
    entries = cls.entries + condb.entries
    names = [e.name for e in entries]
    series = {e.name: dict(zip((int(k) for k in e.k_values), e.statistic)) for e in entries}
    ks = sorted({k for s in series.values() for k in s})
    rows = [[k] + [series[n].get(k) for n in names] for k in ks]
    _write_csv(outdir / "analyze_series.csv", _header(config), ["k"] + names, rows)
    verdict = cls.overall if cls.overall != INCONCLUSIVE else condb.overall
    print(f"classify: {cls.overall}  condition_b: {condb.params['verdict']}")
    return EXIT_OK if verdict != INCONCLUSIVE else EXIT_INCONCLUSIVE


def cmd_kim_series(args) -> int:
    theta = load_theta(args.theta)
    if args.phi:
        phi = load_phi(args.phi)
    elif args.psi:
        phi = dual_phi(load_psi(args.psi))
    else:
        raise SpecError("kim-series requires --phi or --psi")
    config = {
        "command": "kim-series",
        "theta": Path(args.theta).name,
        "phi": Path(args.phi).name if args.phi else None,
        "psi": Path(args.psi).name if args.psi else None,
        "depth": args.depth,
        "window": args.window,
    }
    table = table_for(theta, args.depth)
    trace = kim_series(table, phi, K=args.depth - 1, window=args.window)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    header = _header(config) + [
        f"# slope = {trace.slope!r}",
        f"# tail = {trace.tail!r}",
    ]
    rows = list(zip(trace.k_values.tolist(), trace.terms.tolist(), trace.partial_sums.tolist()))
    _write_csv(outdir / "kim_series.csv", header, ["k", "term", "partial_sum"], rows)
    print(f"slope = {trace.slope:.6g}, tail = {trace.tail:.6g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    theta = load_theta(args.theta)
    psi = load_psi(args.psi)
    checkpoints = _int_list(args.checkpoints) if args.checkpoints else [args.q]
    config = {
        "command": "simulate",
        "theta": Path(args.theta).name,
        "psi": Path(args.psi).name,
        "q0": args.q0,
        "q": args.q,
        "checkpoints": checkpoints,
        "samples": args.samples,
        "delta": args.delta,
    }
    try:
        profile = tail_measure_profile(theta, psi, args.q0, checkpoints, delta=args.delta)
    except InsufficientPrecision as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    bound = union_bound_tail(psi, args.q0, checkpoints[-1])
    header = _header(config, seed=args.seed) + [f"# union_bound = {bound!r}"]
    _write_csv(
        outdir / "measure_profile.csv",
        header,
        ["Q", "inner_measure", "outer_measure"],
        list(profile.rows()),
    )
    rng = np.random.default_rng(args.seed)
    samples = rng.random(args.samples)
    hit_rows = []
    for s in samples:
        res = hit_count(theta, psi, float(s), args.q, delta=args.delta)
        uncertain = set(res.uncertain)
        for q in res.hits + res.uncertain:
            hit_rows.append(
                (
                    repr(float(s)),
                    q,
                    repr(float(res.distances[q - 1])),
                    repr(float(psi.values_array(np.array([q]))[0])),
                    repr(float(res.margins[q - 1])),
                    int(q not in uncertain),
                )
            )
    _write_csv(
        outdir / "hits.csv",
        _header(config, seed=args.seed),
        ["s", "q", "distance", "psi_q", "margin", "certain"],
        hit_rows,
    )
    print(
        f"final outer measure = {profile.outer[-1]:.6g} "
        f"(union bound {bound:.6g})"
    )
    return EXIT_OK


def cmd_construct_psi(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.counterexample:
        n = _int_list(args.counterexample)
        psi = dyadic_block_psi(n)
        config = {"command": "construct-psi", "counterexample": n}
    elif args.theta and args.indices:
        theta = load_theta(args.theta)
        k_seq = _int_list(args.indices)
        table = table_for(theta, max(k_seq))
        phi = phi_step_from_indices(table, k_seq)
        psi = dual_psi(phi)
        config = {
            "command": "construct-psi",
            "theta": Path(args.theta).name,
            "indices": k_seq,
        }
    else:
        raise SpecError("construct-psi requires --counterexample or --theta with --indices")
    save(outdir / "psi.spec", format_psi(psi))
    report = khinchin_validate(psi, args.q)
    if psi.kind == "step":
        rows = list(zip(psi.breakpoints[:-1], [str(Fraction(v)) for v in psi.values]))
    else:
        bps = psi.phi.breakpoints
        rows = [(b, repr(1.0 / (b * psi.phi(b)))) for b in bps[:-1]]
    header = _header(config) + [
        f"# monotone_ok = {report.monotone_ok}",
        f"# partial_sum = {report.partial_sum!r}",
        f"# divergence_evidence = {report.divergence_evidence}",
    ]
    _write_csv(outdir / "psi_steps.csv", header, ["breakpoint", "value"], rows)
    print(f"monotone_ok = {report.monotone_ok}")
    return EXIT_OK


def cmd_diagnostics(args) -> int:
    theta = load_theta(args.theta)
    if args.phi:
        phi = load_phi(args.phi)
    elif args.psi:
        phi = dual_phi(load_psi(args.psi))
    else:
        raise SpecError("diagnostics requires --phi or --psi")
    config = {
        "command": "diagnostics",
        "theta": Path(args.theta).name,
        "phi": Path(args.phi).name if args.phi else None,
        "psi": Path(args.psi).name if args.psi else None,
        "depth": args.depth,
        "m_max": args.m_max,
    }
    table = table_for(theta, args.depth)
    diag = dyadic_diagnostics(table, phi, args.m_max)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    header = _header(config) + [
        f"# s_indices = {' '.join(map(str, diag.S))}",
        f"# ties = {' '.join(map(str, diag.ties))}",
    ]
    rows = [
        (r.m, r.Q_m, repr(r.kappa), repr(r.lam) if r.lam is not None else "", r.s_count, repr(r.t_log_sum))
        for r in diag.records
    ]
    _write_csv(
        outdir / "diagnostics.csv",
        header,
        ["m", "Q_m", "kappa_m", "lambda_m", "s_count", "t_log_sum"],
        rows,
    )
    print(f"{len(diag.records)} dyadic levels, {len(diag.S)} indices in S")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cfcrit",
        description="Continued-fraction criteria and circle-rotation measure experiments",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, depth_default=200):
        p.add_argument("--theta", required=True, help="theta spec file")
        p.add_argument("--depth", type=int, default=depth_default, help="truncation depth K")
        p.add_argument("--window", type=float, default=DEFAULT_WINDOW)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=["csv", "json-tree"], default="csv")

    p = sub.add_parser("analyze", help="run the classifier and truncation-statistic sweep")
    common(p)
    p.add_argument("--eps-grid", default="", help="comma-separated eps values")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("kim-series", help="criterion series terms and partial sums")
    common(p)
    p.add_argument("--phi", default="", help="phi spec file")
    p.add_argument("--psi", default="", help="psi spec file (phi taken as dual)")
    p.set_defaults(func=cmd_kim_series)

    p = sub.add_parser("simulate", help="tail measure profile and hit counts")
    p.add_argument("--theta", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--q0", type=int, default=1)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--checkpoints", default="", help="comma-separated Q values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--delta", type=float, default=1e-15)
    p.add_argument("--out", default=".")
    p.add_argument("--format", choices=["csv", "json-tree"], default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("construct-psi", help="build a psi spec (counterexample or proof step)")
    p.add_argument("--counterexample", default="", help="exponent list n_0 n_1 ...")
    p.add_argument("--theta", default="")
    p.add_argument("--indices", default="", help="index list k_0 k_1 ... for the step phi")
    p.add_argument("--q", type=int, default=10**4, help="validation range")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_construct_psi)

    p = sub.add_parser("diagnostics", help="dyadic Q_m/kappa_m/lambda_m diagnostics")
    common(p)
    p.add_argument("--phi", default="")
    p.add_argument("--psi", default="")
    p.add_argument("--m-max", type=int, default=10)
    p.set_defaults(func=cmd_diagnostics)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, InsufficientPrecision, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
