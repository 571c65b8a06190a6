"""Short-maturity expansions of close-to-the-money call prices and ATM implied vols.

The normalized price ``Pi(t) = E(S_t - S_0 e^{kappa_t})^+ / S_0`` expands as

    Pi(t) = d1 t^{a1} + d2 t^{a2} + d31 t^{a3} + d32 t^{a4} + ...

with exponents ``(1/Y, 1, 2 - 1/Y, 2/Y)`` for the pure-jump model and
``(1/2, (3 - Y)/2, 1, 5/2 - Y)`` when a Brownian part is present. The last two
exponents cross at ``Y = 3/2``, where the two third-order terms merge.

For the pure-jump model ``d32`` has no elementary closed form. It equals
``(M + G)/2 * E[min(a, b)^2]`` for iid one-sided stable ``a, b`` with scale
``c_one``. :func:`d32_pure_mc` estimates that moment by Monte Carlo with an
exact tail, and :func:`d32_pure_quad` integrates it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _kernels
from .model import CgmyParams, MoneynessSchedule
from .montecarlo import (
    STREAM_HALF_NORMAL,
    STREAM_MINSQ,
    McConfig,
    McEstimate,
    estimate,
    run_blocks,
)
from .stable import SymStableLaw, draw_unit, e_z_plus, min_sq_moment, min_sq_tail, pdf_sym_at_zero

D32_MC_DEFAULT = McConfig(n_paths=1_000_000, seed=20_240_101)
MINSQ_CUT = 20.0  # standardized truncation point of min(a, b)


@dataclass(frozen=True)
class ExpansionCoeffs:
    model: Literal["pure_jump", "mixed"]
    d1: float
    d2: float
    d31: float
    d32: float
    exponents: tuple[float, float, float, float]
    d32_se: float = 0.0

    def terms(self, t, order: int = 3):
        """Individual terms ``d_k t^{a_k}`` kept at ``order``."""
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        t = np.asarray(t, dtype=float)
        coefs = (self.d1, self.d2, self.d31, self.d32)
        keep = {1: 1, 2: 2, 3: 4}[order]
        return [c * t**a for c, a in zip(coefs[:keep], self.exponents[:keep])]

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "d1": self.d1,
            "d2": self.d2,
            "d31": self.d31,
            "d32": self.d32,
            "exponents": list(self.exponents),
            "d32_se": self.d32_se,
        }


def pure_exponents(Y: float) -> tuple[float, float, float, float]:
    return (1.0 / Y, 1.0, 2.0 - 1.0 / Y, 2.0 / Y)


def mixed_exponents(Y: float) -> tuple[float, float, float, float]:
    return (0.5, (3.0 - Y) / 2.0, 1.0, 2.5 - Y)


# ----------------------------------------------------------------------------
# pure-jump d32


def _d32_scale(p: CgmyParams) -> float:
    return 0.5 * (p.M + p.G) * p.constants.c_one ** (2.0 / p.Y)


def d32_pure_quad(p: CgmyParams) -> float:
    """``d32`` by quadrature of ``E[min(a, b)^2]`` against the stable density."""
    _require_pure(p)
    return float(_d32_scale(p) * min_sq_moment(p.Y))


def d32_pure_mc(p: CgmyParams, mc: McConfig = D32_MC_DEFAULT, backend: str | None = None) -> McEstimate:
    """Monte Carlo ``d32`` with finite variance.

    Standardized pairs give ``min(a, b)^2`` below ``MINSQ_CUT``. The part above
    it, whose fourth moment is infinite, is added from the tail series.
    """
    _require_pure(p)
    Y = p.Y
    minsq_sums = _kernels.kernel("minsq_sums", backend)

    def fn(rng, size):
        a = draw_unit(rng, Y, size, backend)
        b = draw_unit(rng, Y, size, backend)
        return minsq_sums(a, b, MINSQ_CUT)

    s1, s2 = run_blocks(mc, STREAM_MINSQ, fn)
    body = estimate(s1, s2, mc.n_paths, mc.seed)
    k = _d32_scale(p)
    return McEstimate(float(k * (body.mean + min_sq_tail(Y, MINSQ_CUT))), float(k * body.se), mc.n_paths, mc.seed)


def g_integrand(p: CgmyParams, u, w):
    """``w (1{u >= w} - K w^{-Y})`` with ``K = C (M^Y + (G+1)^Y) / Y``."""
    K = p.C * (p.M**p.Y + (p.G + 1.0) ** p.Y) / p.Y
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    return w * ((u >= w).astype(float) - K * w ** (-p.Y))


def d32_half_normal_mc(p: CgmyParams, mc: McConfig = D32_MC_DEFAULT, corrected: bool = True) -> McEstimate:
    """``d32`` by the two-dimensional half-normal importance scheme.

    With ``U = Z^+ + m* a + g* b`` and an independent half-normal ``V``, the
    estimator averages ``-U^2 1{U <= 0} / 2 - g(U, V) / f(V)``. Its variance is
    infinite: ``g(U, V) / f(V)`` grows like ``exp(V^2/2)`` wherever the
    compensator is not cancelled. Prefer :func:`d32_pure_mc`. ``corrected=False``
    drops the compensator, and the resulting mean diverges.
    """
    _require_pure(p)
    k = p.constants
    g1 = k.c_one ** (1.0 / p.Y)

    def fn(rng, size):
        a = g1 * draw_unit(rng, p.Y, size)
        b = g1 * draw_unit(rng, p.Y, size)
        u = np.maximum(a - b, 0.0) + k.m_star * a + k.g_star * b
        neg = -0.5 * np.where(u <= 0.0, u * u, 0.0)
        v = np.abs(rng.standard_normal(size))
        f = math.sqrt(2.0 / math.pi) * np.exp(-0.5 * v * v)
        gv = g_integrand(p, u, v) if corrected else v * (u >= v)
        tail = -gv / f
        return neg.sum(), (neg * neg).sum(), tail.sum(), (tail * tail).sum()

    s1, s2, t1, t2 = run_blocks(mc, STREAM_HALF_NORMAL, fn)
    ea = estimate(s1, s2, mc.n_paths, mc.seed)
    eb = estimate(t1, t2, mc.n_paths, mc.seed)
    return McEstimate(ea.mean + eb.mean, math.hypot(ea.se, eb.se), mc.n_paths, mc.seed)


# ----------------------------------------------------------------------------
# coefficients


def _require_pure(p: CgmyParams):
    if p.sigma != 0.0:
        raise ValueError("pure-jump coefficients need sigma = 0")


def _require_mixed(p: CgmyParams):
    if not p.sigma > 0.0:
        raise ValueError("mixed coefficients need sigma > 0")


def pure_jump_coeffs(
    p: CgmyParams,
    s: MoneynessSchedule = MoneynessSchedule(),
    mc: McConfig = D32_MC_DEFAULT,
    d32_method: Literal["mc", "quad"] = "mc",
    d32_estimate: McEstimate | None = None,
) -> ExpansionCoeffs:
    """Pure-jump coefficients; ``d32_estimate`` reuses an earlier ``d32`` run."""
    _require_pure(p)
    C, G, M, Y = p.C, p.G, p.M, p.Y
    k = p.constants
    d1 = e_z_plus(p)
    d2 = 0.5 * C * k.gamma_neg_y * ((M - 1.0) ** Y - M**Y - (G + 1.0) ** Y + G**Y) - 0.5 * s.e1
    pz0 = pdf_sym_at_zero(SymStableLaw.of(p))
    d31 = 0.5 * (k.gamma_tilde - s.e1) ** 2 * pz0 - 0.5 * s.e2
    if d32_estimate is not None:
        d32, se = d32_estimate.mean, d32_estimate.se
    elif d32_method == "mc":
        est = d32_pure_mc(p, mc)
        d32, se = est.mean, est.se
    elif d32_method == "quad":
        d32, se = d32_pure_quad(p), 0.0
    else:
        raise ValueError("d32_method must be 'mc' or 'quad'")
    return ExpansionCoeffs("pure_jump", d1, d2, d31, d32, pure_exponents(Y), se)


def _mixed_abs_moment(Y: float) -> float:
    # E|W|^{2Y-2} for standard normal W
    return 2.0 ** (Y - 1.0) * math.gamma(Y - 0.5) / math.sqrt(math.pi)


def mixed_d32_alt(p: CgmyParams, e2: float = 0.0) -> float:
    """``d32`` of the mixed model via ``2 (d31' - d32') - e2/2``."""
    _require_mixed(p)
    C, Y, sig = p.C, p.Y, p.sigma
    base = C * C * math.cos(math.pi * Y / 2.0) ** 2 * p.constants.gamma_neg_y**2 * _mixed_abs_moment(Y)
    base /= math.sqrt(2.0 * math.pi) * sig ** (2.0 * Y - 1.0)
    d31p = -2.0 * Y * base
    d32p = -(2.0 * Y - 1.0) * base
    return 2.0 * (d31p - d32p) - 0.5 * e2


def mixed_coeffs(p: CgmyParams, s: MoneynessSchedule | None = None) -> ExpansionCoeffs:
    _require_mixed(p)
    s = s or MoneynessSchedule(model="mixed", Y=p.Y)
    C, G, Y, sig = p.C, p.G, p.Y, p.sigma
    k = p.constants
    d1 = sig / math.sqrt(2.0 * math.pi)
    d2 = C * 2.0 ** ((1.0 - Y) / 2.0) * sig ** (1.0 - Y) * math.gamma(1.0 - Y / 2.0) / (math.sqrt(math.pi) * Y * (Y - 1.0))
    d31 = -C * k.gamma_neg_y * ((G + 1.0) ** Y - G**Y) + 0.5 * (k.gamma_tilde - s.e1)
    d32 = (
        -sig ** (1.0 - 2.0 * Y)
        * C * C
        * math.cos(math.pi * Y / 2.0) ** 2
        * k.gamma_neg_y**2
        * 2.0 ** (Y - 0.5)
        * math.gamma(Y - 0.5)
        / math.pi
        - 0.5 * s.e2
    )
    return ExpansionCoeffs("mixed", d1, d2, d31, d32, mixed_exponents(Y), 0.0)


def coeffs_for(p: CgmyParams, s: MoneynessSchedule | None = None, mc: McConfig = D32_MC_DEFAULT,
               d32_method: Literal["mc", "quad"] = "mc") -> ExpansionCoeffs:
    """Dispatch on the model kind."""
    if p.kind == "mixed":
        return mixed_coeffs(p, s)
    return pure_jump_coeffs(p, s or MoneynessSchedule(model="pure_jump", Y=p.Y), mc, d32_method)


# ----------------------------------------------------------------------------
# evaluation


def price_expansion(coeffs: ExpansionCoeffs, t, order: int = 3):
    """Truncated price expansion; order 3 carries both third-order terms."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    out = sum(coeffs.terms(t, order))
    return out[()] if np.ndim(out) == 0 else out


def price_expansion_se(coeffs: ExpansionCoeffs, t, order: int = 3):
    """Uncertainty band from the Monte Carlo error of ``d32`` (zero below order 3)."""
    t = np.asarray(t, dtype=float)
    out = coeffs.d32_se * t ** coeffs.exponents[3] if order == 3 else np.zeros_like(t)
    return out[()] if np.ndim(out) == 0 else out


def _check_atm(s: MoneynessSchedule):
    if not s.is_atm:
        raise ValueError("implied-vol expansions need the ATM schedule e1 = e2 = 0")


def _third(coeffs: ExpansionCoeffs, Y: float) -> float:
    if Y < 1.5:
        return coeffs.d31
    if Y > 1.5:
        return coeffs.d32
    return coeffs.d31 + coeffs.d32


def iv_expansion_pure(p: CgmyParams, s: MoneynessSchedule, t, order: int = 3,
                      coeffs: ExpansionCoeffs | None = None):
    """ATM implied vol ``sqrt(2 pi) [d1 t^{1/Y-1/2} + d2 t^{1/2} + d3 t^q]``.

    ``d3`` is the dominant third-order coefficient: ``d31`` below ``Y = 3/2``,
    ``d32`` above, and their sum at ``Y = 3/2``.
    """
    _require_pure(p)
    _check_atm(s)
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    c = coeffs or pure_jump_coeffs(p, s)
    Y = p.Y
    out = c.d1 * t ** (1.0 / Y - 0.5)
    if order >= 2:
        out = out + c.d2 * t**0.5
    if order == 3:
        q = 1.5 - 1.0 / Y if Y <= 1.5 else 2.0 / Y - 0.5
        out = out + _third(c, Y) * t**q
    out = math.sqrt(2.0 * math.pi) * out
    return out[()] if np.ndim(out) == 0 else out


def iv_expansion_mixed(p: CgmyParams, s: MoneynessSchedule, t, order: int = 3,
                       coeffs: ExpansionCoeffs | None = None):
    """ATM implied vol ``sigma + sqrt(2 pi) (d2 t^{1-Y/2} + d3 t^q)``."""
    _require_mixed(p)
    _check_atm(s)
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    c = coeffs or mixed_coeffs(p, s)
    Y = p.Y
    out = math.sqrt(2.0 * math.pi) * c.d1 + 0.0 * t
    if order >= 2:
        out = out + math.sqrt(2.0 * math.pi) * c.d2 * t ** (1.0 - Y / 2.0)
    if order == 3:
        q = 0.5 if Y <= 1.5 else 2.0 - Y
        out = out + math.sqrt(2.0 * math.pi) * _third(c, Y) * t**q
    return out[()] if np.ndim(out) == 0 else out


def iv_expansion(p: CgmyParams, s: MoneynessSchedule, t, order: int = 3, coeffs: ExpansionCoeffs | None = None):
    if p.kind == "mixed":
        return iv_expansion_mixed(p, s, t, order, coeffs)
    return iv_expansion_pure(p, s, t, order, coeffs)
