"""Hot Monte Carlo kernels, each in a numba and a pure-numpy flavour.

The backend is picked once at import from ``CGMYASYM_BACKEND`` (``numba`` or
``numpy``); numba is used when it is importable and not disabled. Both
flavours consume the same raw variates drawn by numpy generators, so they
agree up to floating-point rounding in the transcendental functions.
"""

from __future__ import annotations

import math
import os

import numpy as np

ENV_FLAG = "CGMYASYM_BACKEND"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _requested() -> str:
    want = os.environ.get(ENV_FLAG, "numba").strip().lower()
    if want not in ("numba", "numpy"):
        raise ValueError(f"{ENV_FLAG} must be 'numba' or 'numpy', got {want!r}")
    return want


BACKEND = "numba" if (HAVE_NUMBA and _requested() == "numba") else "numpy"


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ----------------------------------------------------------------------------
# Chambers-Mallows-Stuck transform, totally skewed (beta = 1), unit Sato scale


def cms_constants(Y: float) -> tuple[float, float]:
    tan_a = math.tan(math.pi * Y / 2.0)
    b = math.atan(tan_a) / Y
    s = (1.0 + tan_a * tan_a) ** (1.0 / (2.0 * Y))
    return b, s


def cms_numpy(v, w, Y):
    b, s = cms_constants(Y)
    return (
        s
        * np.sin(Y * (v + b))
        / np.cos(v) ** (1.0 / Y)
        * (np.cos(v - Y * (v + b)) / w) ** ((1.0 - Y) / Y)
    )


@_njit
def _cms_nb(v, w, Y, b, s, out):
    inv = 1.0 / Y
    ex = (1.0 - Y) / Y
    for i in range(v.shape[0]):
        vi = v[i]
        out[i] = s * math.sin(Y * (vi + b)) / math.cos(vi) ** inv * (math.cos(vi - Y * (vi + b)) / w[i]) ** ex
    return out


def cms_numba(v, w, Y):
    b, s = cms_constants(Y)
    return _cms_nb(v, w, Y, b, s, np.empty_like(v))


# ----------------------------------------------------------------------------
# Call payoff under the stable measure, many (t, kappa) points per draw set
#
#   weight  = exp(-t^{1/Y} (m* a + g* b) - eta t)
#   payoff  = weight * (1 - exp(e)),  e = kappa - gt t - t^{1/Y} (a - b) - sigma sqrt(t) N
# with a, b unit-time one-sided draws; the payoff is zero when e >= 0.


def price_sums_numpy(a, b, z, ts, kappas, m_star, g_star, eta, gt, sigma, Y):
    n_pts = ts.shape[0]
    s1 = np.empty(n_pts)
    s2 = np.empty(n_pts)
    u = m_star * a + g_star * b
    d = a - b
    for j in range(n_pts):
        t = ts[j]
        sc = t ** (1.0 / Y)
        e = (kappas[j] - gt * t) - sc * d
        if sigma > 0.0:
            e = e - sigma * math.sqrt(t) * z
        itm = e < 0.0
        pay = np.exp(-sc * u[itm] - eta * t) * -np.expm1(e[itm])
        s1[j] = pay.sum()
        s2[j] = (pay * pay).sum()
    return s1, s2


@_njit
def _price_sums_nb(a, b, z, ts, kappas, m_star, g_star, eta, gt, sigma, Y, s1, s2):
    n = a.shape[0]
    u = np.empty(n)
    d = np.empty(n)
    for i in range(n):
        u[i] = m_star * a[i] + g_star * b[i]
        d[i] = a[i] - b[i]
    for j in range(ts.shape[0]):
        t = ts[j]
        sc = t ** (1.0 / Y)
        sq = sigma * math.sqrt(t)
        c0 = kappas[j] - gt * t
        acc1 = 0.0
        acc2 = 0.0
        for i in range(n):
            e = c0 - sc * d[i]
            if sigma > 0.0:
                e -= sq * z[i]
            if e < 0.0:
                p = math.exp(-sc * u[i] - eta * t) * -math.expm1(e)
                acc1 += p
                acc2 += p * p
        s1[j] = acc1
        s2[j] = acc2
    return s1, s2


def price_sums_numba(a, b, z, ts, kappas, m_star, g_star, eta, gt, sigma, Y):
    n_pts = ts.shape[0]
    return _price_sums_nb(a, b, z, ts, kappas, m_star, g_star, eta, gt, sigma, Y, np.empty(n_pts), np.empty(n_pts))


# ----------------------------------------------------------------------------
# exp(-U~_t) = exp(-t^{1/Y}(m* a + g* b)), the measure-change weight


def weight_sums_numpy(a, b, ts, m_star, g_star, Y):
    s1 = np.empty(ts.shape[0])
    s2 = np.empty(ts.shape[0])
    u = m_star * a + g_star * b
    for j, t in enumerate(ts):
        w = np.exp(-(t ** (1.0 / Y)) * u)
        s1[j] = w.sum()
        s2[j] = (w * w).sum()
    return s1, s2


@_njit
def _weight_sums_nb(a, b, ts, m_star, g_star, Y, s1, s2):
    u = np.empty(a.shape[0])
    for i in range(a.shape[0]):
        u[i] = m_star * a[i] + g_star * b[i]
    for j in range(ts.shape[0]):
        sc = ts[j] ** (1.0 / Y)
        acc1 = 0.0
        acc2 = 0.0
        for i in range(a.shape[0]):
            w = math.exp(-sc * u[i])
            acc1 += w
            acc2 += w * w
        s1[j] = acc1
        s2[j] = acc2
    return s1, s2


def weight_sums_numba(a, b, ts, m_star, g_star, Y):
    n_pts = ts.shape[0]
    return _weight_sums_nb(a, b, ts, m_star, g_star, Y, np.empty(n_pts), np.empty(n_pts))


# ----------------------------------------------------------------------------
# Truncated second moment of min(a, b), the body of the d32 estimator


def minsq_sums_numpy(a, b, cut):
    m = np.minimum(a, b)
    v = np.where(m <= cut, m * m, 0.0)
    return v.sum(), (v * v).sum()


@_njit
def _minsq_sums_nb(a, b, cut):
    acc1 = 0.0
    acc2 = 0.0
    for i in range(a.shape[0]):
        m = a[i] if a[i] < b[i] else b[i]
        if m <= cut:
            v = m * m
            acc1 += v
            acc2 += v * v
    return acc1, acc2


def minsq_sums_numba(a, b, cut):
    return _minsq_sums_nb(a, b, cut)


KERNELS = {
    "numpy": {
        "cms": cms_numpy,
        "price_sums": price_sums_numpy,
        "weight_sums": weight_sums_numpy,
        "minsq_sums": minsq_sums_numpy,
    },
    "numba": {
        "cms": cms_numba,
        "price_sums": price_sums_numba,
        "weight_sums": weight_sums_numba,
        "minsq_sums": minsq_sums_numba,
    },
}


def kernel(name: str, backend: str | None = None):
    """Return kernel ``name`` for ``backend`` (default: the active one)."""
    be = backend or BACKEND
    if be not in KERNELS:
        raise ValueError(f"backend must be 'numba' or 'numpy', got {be!r}")
    if be == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return KERNELS[be][name]
