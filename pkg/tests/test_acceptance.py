"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (lines are also collected in the terminal summary) or
directly with ``python tests/test_acceptance.py``. Tolerances are fixed by the
criteria themselves; a failing line carries the measured numbers.
"""

from __future__ import annotations

import math
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cgmyasym.bs import implied_vol  # noqa: E402
from cgmyasym.expansions import (  # noqa: E402
    D32_MC_DEFAULT,
    d32_pure_mc,
    iv_expansion,
    mixed_coeffs,
    mixed_d32_alt,
    price_expansion,
    pure_jump_coeffs,
)
from cgmyasym.ift import IftConvergenceError, ift_price  # noqa: E402
from cgmyasym.model import PRESETS, CgmyParams, char_fn, kappa_at, schedule_for  # noqa: E402
from cgmyasym.montecarlo import McConfig, mc_price_grid, mc_weight_grid  # noqa: E402
from cgmyasym.stable import (  # noqa: E402
    OneSidedStableLaw,
    SymStableLaw,
    char_fn_stable,
    e_z_plus,
    sample_one_sided,
    sample_z_pair,
)

from oracles import d1_by_quadrature, eta_by_quadrature, sym_cdf  # noqa: E402

SEED = 20_240_101
GRID = np.geomspace(1 / 2520, 1 / 12, 20)
SCHEDULES = {"atm": (0.0, 0.0), "ctm": (0.1, -0.1)}
NAMES = ("schoutens", "al_pure", "al_mixed")


def record(k: int, ok: bool, detail: str) -> bool:
    line = f"CRITERION {k} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    try:
        from conftest import ACCEPTANCE_LINES

        ACCEPTANCE_LINES.append(line)
    except ImportError:  # standalone run
        pass
    return ok


# ----------------------------------------------------------------------------
# shared, cached computations


@lru_cache(maxsize=None)
def d32_estimate(name: str):
    t0 = time.perf_counter()
    est = d32_pure_mc(PRESETS[name], D32_MC_DEFAULT)
    return est, time.perf_counter() - t0


def coeffs(p: CgmyParams, e1: float, e2: float, name: str | None = None):
    s = schedule_for(p, e1, e2)
    if p.kind == "mixed":
        return mixed_coeffs(p, s)
    est = d32_estimate(name)[0] if name else d32_pure_mc(p, D32_MC_DEFAULT)
    return pure_jump_coeffs(p, s, d32_estimate=est)


@lru_cache(maxsize=None)
def figure_run(name: str, tag: str):
    p = PRESETS[name]
    e1, e2 = SCHEDULES[tag]
    c = coeffs(p, e1, e2, name)
    ks = np.asarray(kappa_at(schedule_for(p, e1, e2), GRID), dtype=float)
    t0 = time.perf_counter()
    mc = mc_price_grid(p, GRID, ks, McConfig(100_000, SEED))
    mc_time = time.perf_counter() - t0
    return c, mc, mc_time


# ----------------------------------------------------------------------------
# criteria


def criterion_1() -> bool:
    t0 = time.perf_counter()
    worst = 0.0
    for name in NAMES:
        for t in (1 / 252, 1 / 52, 1 / 12, 1 / 4):
            worst = max(worst, abs(char_fn(PRESETS[name], t, -1j) - 1.0))
    el = time.perf_counter() - t0
    return record(1, worst < 1e-10 and el < 1.0, f"max |phi_t(-i) - 1| = {worst:.2e} (< 1e-10), {el:.3f} s (< 1 s)")


def criterion_2() -> bool:
    t0 = time.perf_counter()
    parts, ok = [], True
    for name in NAMES:
        p = PRESETS[name]
        ts = [1 / 12, 1 / 2]
        for t, e in zip(ts, mc_weight_grid(p, ts, McConfig(1_000_000, SEED))):
            z = (e.mean - math.exp(p.constants.eta * t)) / e.se
            ok &= abs(z) <= 3
            parts.append(f"{name} t={t:.4g} z={z:+.2f}")
    el = time.perf_counter() - t0
    ok &= el < 30
    return record(2, ok, f"{'; '.join(parts)}; {el:.1f} s (< 30 s)")


def criterion_3() -> bool:
    t0 = time.perf_counter()
    d1 = max(abs(d1_by_quadrature(PRESETS[n]) / e_z_plus(PRESETS[n]) - 1) for n in ("schoutens", "al_pure"))
    eta = max(abs(eta_by_quadrature(PRESETS[n]) / PRESETS[n].constants.eta - 1) for n in NAMES)
    p = PRESETS["al_mixed"]
    d32 = abs(mixed_coeffs(p).d32 / mixed_d32_alt(p) - 1)
    el = time.perf_counter() - t0
    ok = d1 < 1e-6 and eta < 1e-8 and d32 < 1e-10 and el < 10
    return record(3, ok, f"(a) d1 rel {d1:.1e} (< 1e-6); (b) eta rel {eta:.1e} (< 1e-8); "
                         f"(c) mixed d32 rel {d32:.1e} (< 1e-10); {el:.1f} s (< 10 s)")


def figure_check(name: str, tag: str):
    c, mc, _ = figure_run(name, tag)
    errs = {o: np.array([abs(float(price_expansion(c, t, o)) - e.mean) for t, e in zip(GRID, mc)]) for o in (1, 2, 3)}
    tol = np.array([max(3 * e.se, 2e-4) for e in mc])
    frac = float(np.mean(errs[3] <= tol))
    m = {o: float(errs[o].mean()) for o in (1, 2, 3)}
    ordered = m[3] <= m[2] <= m[1]
    return frac >= 0.9 and ordered, frac, m


def criterion_4() -> bool:
    t0 = time.perf_counter()
    parts, ok = [], True
    for name in NAMES:
        for tag in SCHEDULES:
            good, frac, m = figure_check(name, tag)
            ok &= good
            parts.append(f"{name}/{tag} within={frac:.0%} mae=({m[3]:.1e},{m[2]:.1e},{m[1]:.1e})")
    el = time.perf_counter() - t0
    ok &= el < 600
    return record(4, ok, f"{'; '.join(parts)}; need >= 90% and mae3 <= mae2 <= mae1; {el:.0f} s")


def slope(p: CgmyParams, e1: float, e2: float) -> float:
    c = coeffs(p, e1, e2)
    ts = np.geomspace(1e-5, 1e-3, 20)
    d = np.abs(price_expansion(c, ts, 3) - price_expansion(c, ts, 2))
    return float(np.polyfit(np.log(ts), np.log(d), 1)[0])


def criterion_5() -> bool:
    p = PRESETS["al_pure"]
    parts, ok = [], True
    for tag, (e1, e2) in SCHEDULES.items():
        c = coeffs(p, e1, e2, "al_pure")
        t = 1e-3
        third = float(price_expansion(c, t, 3) - price_expansion(c, t, 2))
        same = abs(c.exponents[2] - 4 / 3) < 1e-15 and abs(c.exponents[3] - 4 / 3) < 1e-15
        summed = same and abs(third / ((c.d31 + c.d32) * t ** (4 / 3)) - 1) < 1e-12
        good, frac, _ = figure_check("al_pure", tag)
        ok &= summed and good
        parts.append(f"Y=1.5/{tag} summed t^(4/3) term={summed} crit4={frac:.0%}")
    for Y in (1.4, 1.6):
        q = CgmyParams(p.C, p.G, p.M, Y)
        expect = min(2 - 1 / Y, 2 / Y)
        for tag, (e1, e2) in SCHEDULES.items():
            s = slope(q, e1, e2)
            dev = abs(s / expect - 1)
            ok &= dev <= 0.05
            parts.append(f"Y={Y}/{tag} slope {s:.4f} vs {expect:.4f} ({dev:.1%})")
    return record(5, ok, "; ".join(parts) + "; slopes need <= 5%")


def criterion_6() -> bool:
    t0 = time.perf_counter()
    parts, ok = [], True
    for name in ("schoutens", "al_pure"):
        p = PRESETS[name]
        a = d32_pure_mc(p, McConfig(1_000_000, SEED))
        b = d32_pure_mc(p, McConfig(1_000_000, SEED + 1))
        z = (a.mean - b.mean) / math.hypot(a.se, b.se)
        small = d32_pure_mc(p, McConfig(250_000, SEED + 2))
        ratio = a.se / small.se
        ok &= abs(z) <= 3 and 0.5 * 0.85 <= ratio <= 0.5 * 1.15
        parts.append(f"{name} seeds z={z:+.2f} se(4n)/se(n)={ratio:.3f}")
    el = time.perf_counter() - t0
    ok &= el < 120
    return record(6, ok, f"{'; '.join(parts)}; need |z| <= 3 and ratio in [0.425, 0.575]; {el:.0f} s (< 120 s)")


def iv_round_trip(name: str, t: float) -> tuple[float, float, float]:
    p = PRESETS[name]
    c = coeffs(p, 0.0, 0.0, name if p.kind == "pure_jump" else None)
    ivx = float(iv_expansion(p, schedule_for(p), t, 3, c))
    inv = implied_vol(float(price_expansion(c, t, 3)), t, 0.0)
    return ivx, inv, ivx / inv - 1


def criterion_7() -> bool:
    parts, ok = [], True
    for name, tol in (("schoutens", 0.02), ("al_mixed", 0.01)):
        for t in (1 / 252, 1 / 52, 1 / 12):
            _, _, rel = iv_round_trip(name, t)
            ok &= abs(rel) < tol
            parts.append(f"{name} t={t:.4g} rel {rel:+.2%}")
    # informational: the pure iv expansion keeps only the dominant third-order
    # term, so compare it with the inverted price that drops the other one too
    c = coeffs(PRESETS["schoutens"], 0.0, 0.0, "schoutens")
    info = []
    for t in (1 / 252, 1 / 52, 1 / 12):
        ivx = float(iv_expansion(PRESETS["schoutens"], schedule_for(PRESETS["schoutens"]), t, 3, c))
        dom = float(price_expansion(c, t, 3)) - c.d32 * t ** c.exponents[3]
        info.append(f"{ivx / implied_vol(dom, t, 0.0) - 1:+.2%}")
    parts.append(f"(info, schoutens without the d32 term: {', '.join(info)})")
    p = PRESETS["al_mixed"]
    gap = abs(float(iv_expansion(p, schedule_for(p), 1e-6, 3)) - p.sigma)
    ok &= gap < 1e-3
    parts.append(f"mixed |iv(1e-6) - 0.1| = {gap:.2e} (< 1e-3)")
    return record(7, ok, "; ".join(parts) + "; tolerances 2% pure, 1% mixed")


def criterion_8() -> bool:
    parts, ok = [], True
    for name in NAMES:
        p = PRESETS[name]
        ks = [-0.01, 0.0, 0.01]
        mc = mc_price_grid(p, [0.25] * 3, ks, McConfig(1_000_000, SEED))
        worst = 0.0
        for k, e in zip(ks, mc):
            try:
                f = ift_price(p, 0.25, k)
                good = abs(f - e.mean) <= max(3 * e.se, 1e-4)
                worst = max(worst, abs(f - e.mean) / max(3 * e.se, 1e-4))
            except IftConvergenceError:
                good, worst = False, math.inf
            ok &= good
        parts.append(f"{name} t=0.25 max |ift-mc|/tol = {worst:.2f}")
    # small t: a value may come back only if it is right
    t = 1 / 2520
    for name in NAMES:
        p = PRESETS[name]
        try:
            f = ift_price(p, t, 0.0)
        except IftConvergenceError:
            parts.append(f"{name} t=1/2520 signalled")
            continue
        e = mc_price_grid(p, [t], [0.0], McConfig(1_000_000, SEED))[0]
        good = abs(f - e.mean) <= max(3 * e.se, 1e-4)
        ok &= good and name != "schoutens"
        parts.append(f"{name} t=1/2520 returned {f:.6g}, mc {e.mean:.6g} +- {e.se:.1e}")
    return record(8, ok, "; ".join(parts))


def criterion_9() -> bool:
    parts, ok = [], True
    for name in NAMES:
        p = PRESETS[name]
        c, _, mc_time = figure_run(name, "atm")
        reps, t0 = 0, time.perf_counter()
        while time.perf_counter() - t0 < 0.2:
            cc = coeffs(p, 0.0, 0.0, name)  # closed forms recomputed; d32 reused
            price_expansion(cc, GRID, 3)
            reps += 1
        ex_time = (time.perf_counter() - t0) / reps
        speed = mc_time / ex_time
        ok &= speed >= 100
        extra = f", d32 one-off {d32_estimate(name)[1]:.2f} s" if p.kind == "pure_jump" else ""
        parts.append(f"{name} expansion {ex_time:.1e} s vs mc {mc_time:.2f} s ({speed:.0f}x){extra}")
    return record(9, ok, "; ".join(parts) + "; need >= 100x")


def criterion_10() -> bool:
    n = 1_000_000
    parts, ok = [], True
    for name in NAMES:
        p = PRESETS[name]
        law = OneSidedStableLaw.of(p)
        x = sample_one_sided(law, n, SEED)
        g = law.c_one ** (1 / p.Y)
        cf = 0.0
        for u in (0.5, 1.0, 2.0):
            for v in (u, u / g):  # literal frequency and law-scaled frequency
                cf = max(cf, abs(np.mean(np.exp(1j * v * x)) - char_fn_stable(law, v)))
        xt = (p.C / p.Y / (1e3 / n)) ** (1 / p.Y)
        ratio = float(np.mean(x >= xt) / (p.C / p.Y * xt ** (-p.Y)))
        up, un = sample_z_pair(p, 100_000, SEED + 1)
        pv = stats.kstest(up + un, sym_cdf(SymStableLaw.of(p))).pvalue
        ok &= cf <= 4 / math.sqrt(n) and 0.9 <= ratio <= 1.1 and pv > 0.01
        parts.append(f"{name} cf err {cf:.1e} (<= {4 / math.sqrt(n):.0e}) tail ratio {ratio:.3f} KS p={pv:.3f}")
    return record(10, ok, "; ".join(parts))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.slow
@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(crit):
    assert crit()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
