"""Command-line front end: ``peakbound {sigma,peak,desync,witness,scan,fixtures}``.

Exit codes: 0 success, 1 input error, 2 undetermined quasi-controllability
(``sigma`` only).
"""
from __future__ import annotations

import argparse
import sys
import time
from typing import List, Optional

import numpy as np

from . import fixtures
from .desync import (DesyncModel, MixtureFamily, RandomSchedule, desync_peak_bound,
                     mixture_sigma_bound, schedule_from_dict, simulate)
from .exceptions import ModelFileError, PeakboundError
from .io import dump_report, load_model, make_report, rows_to_csv, serialize_model
from .qc import QCParams, continuity_scan, sigma_estimate
from .stability import chi_lower, peak_report
from .witness import build_witness, robustness_scan

EXIT_OK, EXIT_INPUT, EXIT_UNDETERMINED = 0, 1, 2


def _floats(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("model", help="model file (JSON, schema v1)")
    p.add_argument("--norm", choices=["l1", "l2", "linf"], default=None,
                   help="vector norm (default: the model's, else l1)")
    p.add_argument("--p", type=int, default=None, help="product depth for sigma (default N-1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9, help="rank tolerance")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--cap", type=int, default=None, help="product cap (env PEAKBOUND_CAP)")
    p.add_argument("--exploratory", action="store_true", help="allow p < N-1")
    p.add_argument("-o", "--out", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="peakbound", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sigma", help="quasi-controllability measure and verdict")
    _common(p)

    p = sub.add_parser("peak", help="bounds on the overshooting measure")
    _common(p)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--kmax", type=int, default=8)

    p = sub.add_parser("desync", help="mixture bounds and simulated desynchronized runs")
    _common(p)
    p.add_argument("--T", type=int, default=200, help="steps per run")
    p.add_argument("--runs", type=int, default=100, help="random schedules (seed, seed+1, ...)")
    p.add_argument("--kmax", type=int, default=8)

    p = sub.add_parser("witness", help="exponential-instability witness")
    _common(p)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--depth", type=int, default=8, help="seed search depth")
    p.add_argument("--x0", type=_floats, default=None, help="start vector (default all ones)")

    p = sub.add_parser("scan", help="sigma and witness scans along F(tau)")
    _common(p)
    p.add_argument("--taus", type=_floats, default=[0.1, 0.01, 0.001])
    p.add_argument("--kind", choices=["continuity", "robustness", "both"], default="continuity")
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--csv", action="store_true", help="emit CSV tables instead of JSON")

    p = sub.add_parser("fixtures", help="print a built-in model")
    p.add_argument("name", nargs="?", help="fixture name (omit with --list)")
    p.add_argument("--list", action="store_true")
    p.add_argument("--a", type=float, default=None, help="E0: diagonal entry")
    p.add_argument("--eps", type=float, default=None, help="E0: off-diagonal entry")
    p.add_argument("--m", type=int, default=None, help="limexp/unbounded: index m")
    p.add_argument("-o", "--out", default=None)
    return ap


def _params(args, model) -> QCParams:
    return QCParams(p=args.p, norm=args.norm or model.norm, seed=args.seed, rank_tol=args.tol,
                    n_jobs=args.threads, cap=args.cap, exploratory=args.exploratory)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _inputs(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("out",)}


def cmd_sigma(args, model):
    params = _params(args, model)
    rep = sigma_estimate(model.family_at(0.0), params)
    code = EXIT_UNDETERMINED if rep.verdict == "undetermined" else EXIT_OK
    return rep.to_dict(), code


def cmd_peak(args, model):
    params = _params(args, model)
    rep = peak_report(model.family_at(0.0), args.depth, params, args.kmax)
    return rep.to_dict(), EXIT_OK


def cmd_desync(args, model):
    if model.base is None:
        raise ModelFileError("desync needs a model with a 'base' matrix")
    A = model.base_matrix
    norm = args.norm or model.norm
    fam = MixtureFamily(A, norm, args.tol)
    low = mixture_sigma_bound(A, norm, args.tol)
    peak = desync_peak_bound(A, args.kmax, norm, args.tol)
    rng = np.random.default_rng(args.seed)
    ratios = []
    if model.schedule is not None:
        sched = schedule_from_dict(model.schedule)
        sim = simulate(DesyncModel(A, sched), rng.normal(size=fam.N), args.T, norm)
        ratios.append(sim.peak_ratio)
    else:
        for k in range(args.runs):
            sim = simulate(DesyncModel(A, RandomSchedule(args.seed + k)),
                           rng.normal(size=fam.N), args.T, norm)
            ratios.append(sim.peak_ratio)
    chi, word = chi_lower(fam, min(args.T, 10), norm, certificate=peak.certificate, cap=args.cap)
    return {
        "mixtures": [M.tolist() for M in fam.members],
        "alpha": {"value": fam.alpha, "method": "certified"},
        "beta": {"value": fam.beta, "method": "certified", "applicable": fam.beta_applicable},
        "irreducible": fam.irreducible,
        "sigma_bound": {"value": low.value, "method": "certified", "reason": low.reason},
        "peak_bound": {"value": peak.value, "method": "certified", "reason": peak.reason},
        "chi_lower_depth10": {"value": chi, "method": "certified", "word": list(word)},
        "simulation": {"runs": len(ratios), "T": args.T, "max_peak_ratio": max(ratios),
                       "method": "estimated",
                       "within_bound": None if peak.value is None else max(ratios) <= peak.value + 1e-6},
    }, EXIT_OK


def cmd_witness(args, model):
    params = _params(args, model)
    F = model.family_at(0.0)
    x0 = np.ones(F.N) if args.x0 is None else np.asarray(args.x0)
    out = build_witness(F, args.p, x0, args.horizon, params, args.depth)
    return {"found": out.witness is not None, "diagnostic": out.diagnostic,
            "witness": out.witness}, EXIT_OK


def cmd_scan(args, model):
    if model.perturbation is None:
        raise ModelFileError("scan needs a model with a 'perturbation' block")
    params = _params(args, model)
    result = {"taus": args.taus}
    tables = []
    if args.kind in ("continuity", "both"):
        table = continuity_scan(model.family_at, [0.0] + list(args.taus), params)
        rows = [vars(r) for r in table.rows]
        result["continuity"] = {"rows": rows, "kappa": table.kappa, "method": "estimated/certified"}
        tables.append(rows_to_csv(rows, ["tau", "sigma_grid", "sigma_upper", "sigma_lower", "verdict"]))
    if args.kind in ("robustness", "both"):
        rows = [vars(r) for r in robustness_scan(model.family_at, args.taus, params,
                                                 args.horizon, args.depth)]
        result["robustness"] = {"rows": rows, "method": "certified"}
        tables.append(rows_to_csv(rows, ["tau", "verdict", "witness_found", "lam"]))
    return result, EXIT_OK, tables


def cmd_fixtures(args):
    if args.list:
        _emit("\n".join(fixtures.names()), args.out)
        return EXIT_OK
    if not args.name:
        raise ModelFileError("give a fixture name or --list")
    try:
        model = fixtures.build(args.name, a=args.a, eps=args.eps, m=args.m)
    except TypeError as exc:
        raise ModelFileError(f"fixture {args.name!r} does not take that flag ({exc})") from None
    except KeyError as exc:
        raise ModelFileError(exc.args[0]) from None
    _emit(serialize_model(model), args.out)
    return EXIT_OK


_COMMANDS = {"sigma": cmd_sigma, "peak": cmd_peak, "desync": cmd_desync,
             "witness": cmd_witness, "scan": cmd_scan}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "fixtures":
            return cmd_fixtures(args)
        model = load_model(args.model)
        t0 = time.perf_counter()
        out = _COMMANDS[args.command](args, model)
        wall = time.perf_counter() - t0
        result, code = out[0], out[1]
        if args.command == "scan" and args.csv:
            _emit("\n".join(out[2]).rstrip("\n"), args.out)
            return code
        report = make_report(args.command, {"args": _inputs(args), "model": model.to_dict()},
                             result, args.seed, wall)
        _emit(dump_report(report), args.out)
        return code
    except (PeakboundError, ValueError) as exc:
        print(f"peakbound: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
