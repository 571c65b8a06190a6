"""Time the numba and numpy flavours of each Monte Carlo kernel.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Both flavours receive identical inputs. The script reports the best wall time
of each, their ratio, and the largest relative difference between outputs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cgmyasym import _kernels
from cgmyasym.model import PRESETS


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def rel_diff(x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return float(np.max(np.abs(x - y) / np.maximum(np.abs(y), 1e-300)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    p = PRESETS["al_mixed"]
    k = p.constants
    rng = np.random.default_rng(1)
    v = rng.uniform(-np.pi / 2, np.pi / 2, args.n)
    w = rng.standard_exponential(args.n)
    a = _kernels.cms_numpy(v, w, p.Y)
    b = _kernels.cms_numpy(w * 0 + v[::-1], w[::-1], p.Y)
    z = rng.standard_normal(args.n)
    ts = np.geomspace(1 / 2520, 1 / 12, 20)
    ks = np.zeros_like(ts)

    cases = {
        "cms": lambda be: _kernels.kernel("cms", be)(v, w, p.Y),
        "price_sums": lambda be: _kernels.kernel("price_sums", be)(
            a, b, z, ts, ks, k.m_star, k.g_star, k.eta, k.gamma_tilde, p.sigma, p.Y
        )[0],
        "weight_sums": lambda be: _kernels.kernel("weight_sums", be)(a, b, ts, k.m_star, k.g_star, p.Y)[0],
        "minsq_sums": lambda be: _kernels.kernel("minsq_sums", be)(a, b, 20.0)[0],
    }
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<14}{'numpy s':>12}{'numba s':>12}{'speedup':>10}{'max rel diff':>15}")
    for name, run in cases.items():
        run("numba")  # compile outside the timed region
        t_np, o_np = best_time(lambda: run("numpy"), args.repeat)
        t_nb, o_nb = best_time(lambda: run("numba"), args.repeat)
        print(f"{name:<14}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.2f}{rel_diff(o_nb, o_np):>15.2e}")


if __name__ == "__main__":
    main()
