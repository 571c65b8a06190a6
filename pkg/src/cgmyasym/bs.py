"""Black-Scholes pricing with zero rate and unit spot, and implied volatility."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, ndtr

IV_BRACKET = (1e-8, 10.0)


class ImpliedVolError(ValueError):
    """Price outside the no-arbitrage range or solver bracket exhausted."""


@dataclass(frozen=True)
class BsQuote:
    t: float
    kappa: float
    price: float

    def __post_init__(self):
        lo = max(1.0 - math.exp(self.kappa), 0.0)
        if not lo <= self.price < 1.0:
            raise ValueError(f"price {self.price} outside [{lo}, 1)")


def bs_call(sigma, t, kappa):
    """Call price ``E(e^{X_t} - e^kappa)^+`` for Black-Scholes log-returns."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0) or t <= 0:
        raise ValueError("sigma and t must be positive")
    sd = sigma * math.sqrt(t)
    if kappa == 0.0:
        out = erf(sd / (2.0 * math.sqrt(2.0)))
    else:
        d1 = -kappa / sd + 0.5 * sd
        out = ndtr(d1) - math.exp(kappa) * ndtr(d1 - sd)
    return out[()] if np.ndim(out) == 0 else out


def bs_vega(sigma: float, t: float, kappa: float) -> float:
    sd = sigma * math.sqrt(t)
    d1 = -kappa / sd + 0.5 * sd
    return math.sqrt(t) * math.exp(-0.5 * d1 * d1) / math.sqrt(2.0 * math.pi)


def bs_char_fn(Sigma: float, t: float, u):
    """``exp(-Sigma^2 t (u^2 + i u) / 2)``, the Black-Scholes log-return CF."""
    u = np.asarray(u, dtype=complex)
    out = np.exp(-0.5 * Sigma * Sigma * t * (u * u + 1j * u))
    return out[()] if out.ndim == 0 else out


def implied_vol(price: float, t: float, kappa: float, tol: float = 1e-14, max_iter: int = 200) -> float:
    """Invert :func:`bs_call` in ``sigma`` on the bracket ``[1e-8, 10]``.

    Newton steps are accepted while they stay inside the current bracket;
    otherwise the step falls back to bisection. The bracket shrinks around
    the root on every iteration, so the loop always terminates.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    lower = max(1.0 - math.exp(kappa), 0.0)
    if not (lower < price < 1.0) or not math.isfinite(price):
        raise ImpliedVolError(f"price {price!r} outside the open no-arbitrage range ({lower}, 1)")
    lo, hi = IV_BRACKET
    f_lo = bs_call(lo, t, kappa) - price
    f_hi = bs_call(hi, t, kappa) - price
    if f_lo > 0.0 or f_hi < 0.0:
        raise ImpliedVolError(f"price {price!r} not bracketed by sigma in [{lo}, {hi}]")
    # start from the ATM small-time guess when it lies inside the bracket
    x = min(max(price * math.sqrt(2.0 * math.pi / t), 2.0 * lo), 0.5 * hi)
    for _ in range(max_iter):
        f = float(bs_call(x, t, kappa)) - price
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        v = bs_vega(x, t, kappa)
        # Newton only when the step is finite and lands inside the bracket
        nx = x - f / v if v * (hi - lo) > abs(f) else math.nan
        if not (lo < nx < hi):
            nx = 0.5 * (lo + hi)
        if abs(nx - x) <= tol * nx:
            return nx
        x = nx
    if abs(bs_call(x, t, kappa) - price) < 1e-12:
        return x
    raise ImpliedVolError("implied volatility solver did not converge")
