"""Strictly stable laws with index ``1 < Y < 2``: densities, tails, sampling.

Two laws are needed. The symmetric law has characteristic function
``exp(-c_hat |u|^Y)``. The one-sided law is totally skewed to the right,

    exp(-c_one |u|^Y (1 - i tan(pi Y / 2) sgn u)),

and has zero mean. Both are evaluated in standardized form (scale 1) and
rescaled by ``c^{1/Y}``.

Densities and survival functions use Fourier inversion along a ray in the
complex plane rotated towards the decaying half-plane. The ray turns the
oscillatory integral into an exponentially damped one, which keeps relative
accuracy deep in the tails. Beyond the point where the second tail term is
below ``1e-8`` of the first, the two-term tail series is used instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import _kernels
from .model import CgmyParams, ParameterError

SERIES_SWITCH = 1e-8
_SMALL_X = 1.0
_QUAD_KW = dict(epsabs=0.0, epsrel=1e-12, limit=400)


class QuadratureError(RuntimeError):
    """An internal quadrature missed its tolerance."""


@dataclass(frozen=True)
class SymStableLaw:
    Y: float
    c_hat: float

    def __post_init__(self):
        _check(self.Y, self.c_hat, "c_hat")

    @property
    def beta(self) -> float:
        return 0.0

    @classmethod
    def of(cls, p: CgmyParams) -> "SymStableLaw":
        return cls(p.Y, p.constants.c_hat)


@dataclass(frozen=True)
class OneSidedStableLaw:
    Y: float
    c_one: float

    def __post_init__(self):
        _check(self.Y, self.c_one, "c_one")

    @property
    def beta(self) -> float:
        return 1.0

    @classmethod
    def of(cls, p: CgmyParams) -> "OneSidedStableLaw":
        return cls(p.Y, p.constants.c_one)


def _check(Y, c, name):
    if not 1.0 < Y < 2.0:
        raise ParameterError("1 < Y < 2", f"Y={Y} outside (1, 2)")
    if not c > 0.0:
        raise ParameterError(f"{name} > 0", f"{name}={c} must be positive")


def _scale(law) -> tuple[float, float]:
    c = law.c_hat if isinstance(law, SymStableLaw) else law.c_one
    return c, c ** (1.0 / law.Y)


# ----------------------------------------------------------------------------
# standardized laws


def _omega(Y: float, beta: float) -> complex:
    return complex(1.0, -beta * math.tan(math.pi * Y / 2.0))


def tail_coeffs(Y: float, beta: float, n: int = 2) -> np.ndarray:
    """Coefficients ``a_k`` of ``p(x) ~ sum_k a_k x^{-kY-1}`` as ``x -> +inf``.

    Standardized law (scale 1); ``beta`` is 0 (symmetric) or 1 (one-sided).
    The survival function follows as ``S(x) ~ sum_k a_k x^{-kY} / (kY)``.
    """
    k = np.arange(1, n + 1, dtype=float)
    lg = np.array([math.lgamma(kk * Y + 1.0) - math.lgamma(kk + 1.0) for kk in k])
    if beta == 0.0:
        return (-1.0) ** (k + 1) * np.exp(lg) * np.sin(k * math.pi * Y / 2.0) / math.pi
    if beta == 1.0:
        A = -1.0 / math.cos(math.pi * Y / 2.0)
        return -(A**k) * np.exp(lg) * np.sin(math.pi * k * Y) / math.pi
    raise ValueError("beta must be 0 or 1")


def series_switch_point(Y: float, beta: float) -> float:
    """Smallest standardized ``x`` where the two-term series is used.

    The second term must be below ``SERIES_SWITCH`` of the first. The third
    term is held to the same bound, which matters only when the second one
    vanishes (one-sided law at ``Y = 3/2``).
    """
    a1, a2, a3 = tail_coeffs(Y, beta, 3)
    x2 = (abs(a2 / a1) / SERIES_SWITCH) ** (1.0 / Y)
    x3 = (abs(a3 / a1) / SERIES_SWITCH) ** (1.0 / (2.0 * Y))
    return max(x2, x3)


def _ray(Y: float, beta: float, s: int) -> complex:
    """Unit direction ``e^{-i s phi}`` of the inversion ray for sign ``s`` of x."""
    theta = math.atan(beta * math.tan(math.pi * Y / 2.0))  # = -arg(omega)
    # need |arg(omega) - s Y phi| < pi/2 and 0 < phi < pi/2
    hi = (math.pi / 2.0 - s * theta) / Y
    phi = 0.5 * min(hi, math.pi / 2.0)
    return complex(math.cos(phi), -s * math.sin(phi))


def _quad(f, a, b, points=None):
    # tolerances sit near roundoff; quad's warning then carries no information
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, points=points, **_QUAD_KW, full_output=0)
    return val, err


def _std_pdf_quad(x: float, Y: float, beta: float) -> float:
    om = _omega(Y, beta)
    if abs(x) <= _SMALL_X:
        umax = (40.0 / om.real) ** (1.0 / Y)

        def f(u):
            return (np.exp(-1j * u * x - om * u**Y)).real

        val, err = _quad(f, 0.0, umax)
        return val / math.pi
    s = 1 if x > 0 else -1
    d = _ray(Y, beta, s)
    w = om * d**Y
    decay = abs(x) * (-(d * s).imag)
    vmax = 45.0 / decay

    def g(v):
        u = v * d
        return (d * np.exp(-1j * u * x) * np.expm1(-w * v**Y)).real

    val, err = _quad(g, 0.0, vmax)
    return val / math.pi


def _std_sf_quad(x: float, Y: float, beta: float) -> float:
    om = _omega(Y, beta)
    if abs(x) <= _SMALL_X:
        umax = (40.0 / om.real) ** (1.0 / Y)

        def f(u):
            if u == 0.0:
                return 0.0
            return (np.exp(-1j * u * x - om * u**Y)).imag / u

        val, err = _quad(f, 0.0, umax)
        return 0.5 + val / math.pi
    s = 1 if x > 0 else -1
    d = _ray(Y, beta, s)
    w = om * d**Y
    decay = abs(x) * (-(d * s).imag)
    vmax = 45.0 / decay

    def g(v):
        if v == 0.0:
            return 0.0
        u = v * d
        return (np.exp(-1j * u * x) * np.expm1(-w * v**Y) / v).imag

    val, err = _quad(g, 0.0, vmax)
    return val / math.pi if s > 0 else 1.0 + val / math.pi


def std_pdf(x: float, Y: float, beta: float, series: bool = True) -> float:
    """Standardized stable density at ``x``; ``series=False`` forces quadrature."""
    if beta == 0.0:
        x = abs(x)
    if series and x >= series_switch_point(Y, beta):
        a1, a2 = tail_coeffs(Y, beta, 2)
        return a1 * x ** (-Y - 1.0) + a2 * x ** (-2.0 * Y - 1.0)
    return _std_pdf_quad(x, Y, beta)


def std_sf(x: float, Y: float, beta: float, series: bool = True) -> float:
    """Standardized stable survival function ``P(X >= x)``."""
    if beta == 0.0 and x < 0.0:
        return 1.0 - std_sf(-x, Y, beta, series)
    if beta == 0.0 and x == 0.0:
        return 0.5
    if series and x >= series_switch_point(Y, beta):
        a1, a2 = tail_coeffs(Y, beta, 2)
        return a1 * x ** (-Y) / Y + a2 * x ** (-2.0 * Y) / (2.0 * Y)
    return _std_sf_quad(x, Y, beta)


def _vec(fn, z):
    z = np.asarray(z, dtype=float)
    out = np.array([fn(float(v)) for v in z.ravel()]).reshape(z.shape)
    return out[()] if out.ndim == 0 else out


# ----------------------------------------------------------------------------
# public law-level API


def pdf_sym(law: SymStableLaw, z, series: bool = True):
    """Density of the symmetric law at ``z`` (scalar or array)."""
    _, g = _scale(law)
    return _vec(lambda v: std_pdf(v / g, law.Y, 0.0, series) / g, z)


def sf_sym(law: SymStableLaw, z, series: bool = True):
    """Upper tail ``P(Z >= z)`` of the symmetric law, ``z >= 0``."""
    if np.any(np.asarray(z) < 0):
        raise ValueError("sf_sym requires z >= 0")
    _, g = _scale(law)
    return _vec(lambda v: std_sf(v / g, law.Y, 0.0, series), z)


def pdf_one_sided(law: OneSidedStableLaw, x, series: bool = True):
    _, g = _scale(law)
    return _vec(lambda v: std_pdf(v / g, law.Y, 1.0, series) / g, x)


def sf_one_sided(law: OneSidedStableLaw, x, series: bool = True):
    _, g = _scale(law)
    return _vec(lambda v: std_sf(v / g, law.Y, 1.0, series), x)


def pdf_sym_at_zero(law: SymStableLaw) -> float:
    return math.gamma(1.0 + 1.0 / law.Y) * law.c_hat ** (-1.0 / law.Y) / math.pi


def tail_constant(law) -> float:
    """Leading tail constant ``K`` in ``P(X >= x) ~ K x^{-Y}``.

    For the laws built from CGMY parameters this is ``C / Y``.
    """
    c, _ = _scale(law)
    return tail_coeffs(law.Y, law.beta, 1)[0] * c / law.Y


def char_fn_stable(law, u):
    u = np.asarray(u, dtype=float)
    c, _ = _scale(law)
    om = _omega(law.Y, law.beta)
    z = np.abs(u) ** law.Y * np.where(u >= 0, om, om.conjugate())
    return np.exp(-c * z)


# ----------------------------------------------------------------------------
# sampling


def _generator(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def draw_unit(rng: np.random.Generator, Y: float, n: int, backend: str | None = None) -> np.ndarray:
    """``n`` standardized one-sided draws from ``rng`` (two raw variates each)."""
    v = rng.uniform(-math.pi / 2.0, math.pi / 2.0, n)
    w = rng.standard_exponential(n)
    return _kernels.kernel("cms", backend)(v, w, Y)


def sample_one_sided(law: OneSidedStableLaw, n: int, seed) -> np.ndarray:
    """``n`` iid draws of the one-sided law; deterministic in ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _, g = _scale(law)
    return g * draw_unit(_generator(seed), law.Y, n)


def sample_z_pair(p: CgmyParams, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Pairs ``(up, un)``: ``up`` one-sided, ``un`` minus an independent copy.

    ``Z = up + un`` is symmetric stable and ``m* up - g* un`` is the exponent
    of the measure-change weight.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    law = OneSidedStableLaw.of(p)
    _, g = _scale(law)
    rng = _generator(seed)
    a = draw_unit(rng, law.Y, n)
    b = draw_unit(rng, law.Y, n)
    return g * a, -g * b


def e_z_plus(p: CgmyParams) -> float:
    """``E[max(Z, 0)]`` for the symmetric law of ``p``."""
    Y = p.Y
    return math.gamma(1.0 - 1.0 / Y) * p.constants.c_hat ** (1.0 / Y) / math.pi


# ----------------------------------------------------------------------------
# second moment of the minimum of two one-sided draws


@lru_cache(maxsize=32)
def min_sq_moment(Y: float) -> float:
    """``E[min(a, b)^2]`` for iid standardized one-sided draws ``a, b``.

    Computed as ``2 int x^2 p(x) S(x) dx``. Past ``x = 30`` the integrand is
    replaced by the product of the tail series of ``p`` and ``S``.
    """
    return 2.0 * _min_sq_body(Y, -math.inf)


def min_sq_tail(Y: float, cut: float) -> float:
    """``E[min(a, b)^2 ; min(a, b) > cut]`` for standardized draws, ``cut > 0``."""
    return 2.0 * _min_sq_body(Y, cut)


def _left_end(Y: float) -> float:
    # the left tail decays like exp(-k |x|^{Y/(Y-1)}); stop near roundoff level
    x = -2.0
    while x > -60.0 and x * x * std_pdf(x, Y, 1.0) > 1e-15:
        x *= 1.25
    return x


_MINSQ_SPLIT = 30.0
_MINSQ_TERMS = 12


def _min_sq_body(Y: float, lo: float) -> float:
    def f(x):
        return x * x * std_pdf(x, Y, 1.0) * std_sf(x, Y, 1.0)

    lo = max(lo, _left_end(Y))
    total = 0.0
    if lo < _MINSQ_SPLIT:
        knots = [k for k in (-_SMALL_X, 0.0, _SMALL_X, 5.0) if lo < k]
        edges = [lo, *knots, _MINSQ_SPLIT]
        for a, b in zip(edges[:-1], edges[1:]):
            v, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-11, limit=200)
            total += v
    # beyond the split, x^2 p(x) S(x) = sum_{j,k} a_j a_k / (kY) x^{1-(j+k)Y}
    start = max(lo, _MINSQ_SPLIT)
    a = tail_coeffs(Y, 1.0, _MINSQ_TERMS)
    for j in range(_MINSQ_TERMS):
        for k in range(_MINSQ_TERMS - j):
            e = (j + k + 2) * Y - 2.0
            total += a[j] * a[k] / ((k + 1) * Y) * start ** (-e) / e
    return total
