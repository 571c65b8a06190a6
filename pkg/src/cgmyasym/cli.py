"""Command-line front end: ``cgmyasym {coeffs,curve,ivcurve,bench,validate}``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .bs import ImpliedVolError, implied_vol
from .expansions import (
    D32_MC_DEFAULT,
    coeffs_for,
    d32_pure_mc,
    iv_expansion,
    mixed_coeffs,
    price_expansion,
    pure_jump_coeffs,
)
from .ift import IftConvergenceError, ift_price
from .model import ModelConfig, ParameterError, char_fn, kappa_at, load_config
from .montecarlo import McConfig, mc_price_grid
from .stable import QuadratureError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

CURVE_HEADER = ["t", "kappa", "p1", "p2", "p3", "mc_mean", "mc_se", "ift"]
IV_HEADER = ["t", "iv_expansion", "iv_from_price"]
METHODS = ("p1", "p2", "p3", "mc", "ift")


class InputError(ValueError):
    pass


# ----------------------------------------------------------------------------
# grid and formatting


def parse_grid(spec: str) -> np.ndarray:
    """``START:STOP:COUNT:log|lin`` to a strictly increasing array of times."""
    parts = spec.split(":")
    if len(parts) != 4:
        raise InputError(f"grid must be START:STOP:COUNT:SCALE, got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"grid bounds must be numbers and COUNT an integer: {spec!r}") from None
    scale = parts[3]
    if scale not in ("log", "lin"):
        raise InputError(f"grid scale must be 'log' or 'lin', got {scale!r}")
    if not (math.isfinite(start) and math.isfinite(stop)) or start <= 0:
        raise InputError("grid times must be positive and finite")
    if count < 1:
        raise InputError("grid COUNT must be >= 1")
    if count == 1:
        if start != stop:
            raise InputError("a one-point grid needs START == STOP")
        return np.array([start])
    if not stop > start:
        raise InputError("grid needs STOP > START")
    return np.geomspace(start, stop, count) if scale == "log" else np.linspace(start, stop, count)


def parse_methods(spec: str) -> list[str]:
    items = [m.strip() for m in spec.split(",") if m.strip()]
    bad = [m for m in items if m not in METHODS]
    if bad:
        raise InputError(f"unknown method(s) {', '.join(bad)}; choose from {', '.join(METHODS)}")
    return items


def fmt(x) -> str:
    return "" if x is None else f"{float(x):.17g}"


def write_csv(header, rows, out: str | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return text


def read_csv(text: str) -> tuple[list[str], list[list[float | None]]]:
    """Inverse of :func:`write_csv`; empty cells become ``None``."""
    r = csv.reader(io.StringIO(text))
    header = next(r)
    return header, [[float(c) if c != "" else None for c in row] for row in r]


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


def _metadata(cfg: ModelConfig, args, extra=None) -> dict:
    doc = {
        "params": cfg.params.as_dict(),
        "schedule": {"e1": cfg.schedule.e1, "e2": cfg.schedule.e2, "model": cfg.schedule.model},
        "seed": args.seed,
        "n_paths": args.n_paths,
        "d32_paths": args.d32_paths,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    doc.update(extra or {})
    return doc


def _emit_metadata(meta: dict, out: str | None):
    text = json.dumps(meta, indent=2)
    if out:
        Path(out + ".meta.json").write_text(text + "\n")
    else:
        print(f"# metadata {json.dumps(meta)}", file=sys.stderr)


def _d32_cfg(args) -> McConfig:
    return McConfig(args.d32_paths, args.seed)


# ----------------------------------------------------------------------------
# commands


def cmd_coeffs(args) -> int:
    cfg = load_config(args.config)
    c = coeffs_for(cfg.params, cfg.schedule, _d32_cfg(args), args.d32)
    doc = {
        **c.as_dict(),
        "order": args.order,
        "inputs": {
            "params": cfg.params.as_dict(),
            "e1": cfg.schedule.e1,
            "e2": cfg.schedule.e2,
            "seed": args.seed,
            "d32_paths": args.d32_paths,
            "d32_method": args.d32 if cfg.params.kind == "pure_jump" else None,
        },
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


@dataclass
class PriceCurve:
    rows: list[list]
    metadata: dict = field(default_factory=dict)


def build_curve(cfg: ModelConfig, ts, methods, seed: int, n_paths: int, d32_cfg: McConfig,
                d32_method: str = "mc") -> PriceCurve:
    p, s = cfg.params, cfg.schedule
    ks = np.asarray(kappa_at(s, ts), dtype=float).reshape(-1)
    cols = {m: [None] * len(ts) for m in ("p1", "p2", "p3", "mc_mean", "mc_se", "ift")}
    orders = [int(m[1]) for m in methods if m in ("p1", "p2", "p3")]
    if orders:
        c = coeffs_for(p, s, d32_cfg, d32_method) if 3 in orders else coeffs_for(p, s, d32_cfg, "quad")
        for o in orders:
            cols[f"p{o}"] = [float(v) for v in np.atleast_1d(price_expansion(c, ts, o))]
    if "mc" in methods:
        est = mc_price_grid(p, ts, ks, McConfig(n_paths, seed))
        cols["mc_mean"] = [e.mean for e in est]
        cols["mc_se"] = [e.se for e in est]
    if "ift" in methods:
        for i, (t, k) in enumerate(zip(ts, ks)):
            try:
                cols["ift"][i] = ift_price(p, float(t), float(k))
            except IftConvergenceError as exc:
                _warn(f"ift at t={t:.6g}: {exc}")
    rows = [[float(t), float(k)] + [cols[m][i] for m in CURVE_HEADER[2:]] for i, (t, k) in enumerate(zip(ts, ks))]
    return PriceCurve(rows)


def cmd_curve(args) -> int:
    cfg = load_config(args.config)
    ts = parse_grid(args.grid)
    methods = parse_methods(args.methods)
    if methods:
        curve = build_curve(cfg, ts, methods, args.seed, args.n_paths, _d32_cfg(args), args.d32)
        rows = curve.rows
    else:
        rows = []
    write_csv(CURVE_HEADER, rows, args.out)
    _emit_metadata(_metadata(cfg, args, {"grid": args.grid, "methods": methods}), args.out)
    return EXIT_OK


def cmd_ivcurve(args) -> int:
    cfg = load_config(args.config)
    if not cfg.schedule.is_atm:
        raise InputError("ivcurve needs an ATM schedule (e1 = e2 = 0)")
    ts = parse_grid(args.grid)
    p, s = cfg.params, cfg.schedule
    c = coeffs_for(p, s, _d32_cfg(args), args.d32)
    ivx = np.atleast_1d(iv_expansion(p, s, ts, args.order, c))
    if args.iv_source == "mc":
        prices = [e.mean for e in mc_price_grid(p, ts, np.zeros_like(ts), McConfig(args.n_paths, args.seed))]
    else:
        prices = [float(v) for v in np.atleast_1d(price_expansion(c, ts, args.order))]
    rows = []
    for t, a, pr in zip(ts, ivx, prices):
        try:
            b = implied_vol(pr, float(t), 0.0)
        except ImpliedVolError as exc:
            _warn(f"implied vol at t={t:.6g}: {exc}")
            b = None
        rows.append([float(t), float(a), b])
    write_csv(IV_HEADER, rows, args.out)
    _emit_metadata(_metadata(cfg, args, {"grid": args.grid, "order": args.order, "iv_source": args.iv_source}), args.out)
    return EXIT_OK


def _timed(fn, min_time: float = 0.05):
    """Seconds per call of ``fn``, repeating fast calls until ``min_time`` elapses."""
    n, start = 0, time.perf_counter()
    while True:
        fn()
        n += 1
        el = time.perf_counter() - start
        if el >= min_time or n >= 10_000:
            return el / n


def timing_report(cfg: ModelConfig, ts, n_paths: int, seed: int, d32_cfg: McConfig) -> dict:
    p, s = cfg.params, cfg.schedule
    ks = np.asarray(kappa_at(s, ts), dtype=float).reshape(-1)
    report: dict = {"grid_points": len(ts), "n_paths": n_paths, "seconds": {}}
    sec = report["seconds"]
    est = None
    if p.kind == "pure_jump":
        t0 = time.perf_counter()
        est = d32_pure_mc(p, d32_cfg)
        sec["d32_one_off"] = time.perf_counter() - t0

    def expansion(order):
        def run():
            # closed-form coefficients are recomputed; d32 comes from the one-off run
            c = pure_jump_coeffs(p, s, d32_estimate=est) if est else mixed_coeffs(p, s)
            price_expansion(c, ts, order)
        return run

    for o in (1, 2, 3):
        sec[f"expansion_order{o}"] = _timed(expansion(o))
    t0 = time.perf_counter()
    mc_price_grid(p, ts, ks, McConfig(n_paths, seed))
    sec["mc"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    fails = 0
    for t, k in zip(ts, ks):
        try:
            ift_price(p, float(t), float(k))
        except IftConvergenceError:
            fails += 1
    sec["ift"] = time.perf_counter() - t0
    report["ift_failures"] = fails
    return report


def format_timing(report: dict) -> str:
    lines = [f"grid points: {report['grid_points']}   mc paths: {report['n_paths']}", f"{'method':<20}{'seconds':>14}"]
    for k, v in report["seconds"].items():
        lines.append(f"{k:<20}{v:>14.6g}")
    if report.get("ift_failures"):
        lines.append(f"ift tolerance failures: {report['ift_failures']}")
    return "\n".join(lines)


def cmd_bench(args) -> int:
    cfg = load_config(args.config)
    ts = parse_grid(args.grid)
    rep = timing_report(cfg, ts, args.n_paths, args.seed, _d32_cfg(args))
    print(format_timing(rep))
    text = json.dumps(rep, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_validate(args) -> int:
    """Cross-oracle checks on one model config; prints one PASS/FAIL line each."""
    from .expansions import d32_pure_quad
    from .montecarlo import mc_price, mc_weight_identity_check

    cfg = load_config(args.config)
    p = cfg.params
    checks = []
    for t in (1 / 252, 1 / 52, 1 / 12, 1 / 4):
        err = abs(char_fn(p, t, -1j) - 1.0)
        checks.append((f"martingale t={t:.6g}", err < 1e-10, f"|phi(-i)-1|={err:.2e}"))
    w = mc_weight_identity_check(p, 1 / 12, args.n_paths, args.seed)
    z = (w.mean - math.exp(p.constants.eta / 12)) / w.se
    checks.append(("weight identity t=1/12", abs(z) <= 3, f"z={z:+.2f}"))
    for k in (-0.01, 0.0, 0.01):
        m = mc_price(p, 0.25, k, McConfig(args.n_paths, args.seed))
        try:
            f = ift_price(p, 0.25, k)
            ok = abs(f - m.mean) <= max(3 * m.se, 1e-4)
            checks.append((f"mc vs ift t=0.25 kappa={k:+.2f}", ok, f"diff={f - m.mean:+.2e} se={m.se:.2e}"))
        except IftConvergenceError as exc:
            checks.append((f"mc vs ift t=0.25 kappa={k:+.2f}", False, str(exc)))
    if p.kind == "pure_jump":
        q = d32_pure_quad(p)
        c = coeffs_for(p, cfg.schedule, _d32_cfg(args), "mc")
        z = (c.d32 - q) / c.d32_se
        checks.append(("d32 mc vs quadrature", abs(z) <= 3, f"z={z:+.2f}"))
    for name, ok, info in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<34} {info}")
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_NUMERIC


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cgmyasym", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, grid=False):
        sp.add_argument("--config", required=True, help="model JSON file")
        sp.add_argument("--seed", type=int, default=D32_MC_DEFAULT.seed)
        sp.add_argument("--n-paths", type=int, default=100_000, help="Monte Carlo paths for prices")
        sp.add_argument("--d32-paths", type=int, default=D32_MC_DEFAULT.n_paths, help="pairs for the d32 estimate")
        sp.add_argument("--d32", choices=("mc", "quad"), default="mc", help="pure-jump d32 route")
        sp.add_argument("--out", help="output file (default stdout)")
        if grid:
            sp.add_argument("--grid", required=True, help="START:STOP:COUNT:log|lin")

    sp = sub.add_parser("coeffs", help="expansion coefficients as JSON")
    common(sp)
    sp.add_argument("--order", type=int, choices=(1, 2, 3), default=3)
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("curve", help="price curve CSV")
    common(sp, grid=True)
    sp.add_argument("--methods", default="p1,p2,p3,mc", help="comma list from p1,p2,p3,mc,ift")
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("ivcurve", help="ATM implied-vol curve CSV")
    common(sp, grid=True)
    sp.add_argument("--order", type=int, choices=(1, 2, 3), default=3)
    sp.add_argument("--iv-source", choices=("p3", "mc"), default="p3",
                    help="price inverted for iv_from_price: expansion at --order or Monte Carlo")
    sp.set_defaults(func=cmd_ivcurve)

    sp = sub.add_parser("bench", help="timing table")
    common(sp, grid=True)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("validate", help="cross-oracle checks")
    common(sp)
    sp.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args)
    except ParameterError as exc:
        print(f"error: constraint {exc.constraint!r} violated: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FileNotFoundError, IsADirectoryError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IftConvergenceError, ImpliedVolError, QuadratureError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
