"""CGMY model parameters, derived constants and the characteristic function.

The log-return is ``X_t = L_t + sigma W_t`` where ``L`` is a CGMY process with
Levy density ``C e^{-M x} x^{-1-Y}`` on ``x > 0`` and ``C e^{G x} |x|^{-1-Y}``
on ``x < 0``. Rates are zero and ``S_0 = 1`` throughout, so ``exp(X)`` is a
martingale by the choice of the drift ``c``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Literal

import numpy as np

ModelKind = Literal["pure_jump", "mixed"]


class ParameterError(ValueError):
    """Raised when a parameter set violates a model constraint.

    ``constraint`` names the violated condition, e.g. ``"1 < Y < 2"``.
    """

    def __init__(self, constraint: str, message: str | None = None):
        self.constraint = constraint
        super().__init__(message or f"parameter constraint violated: {constraint}")


def gamma_neg(y: float) -> float:
    """``Gamma(-y)`` for ``1 < y < 2`` via the recurrence from ``Gamma(2 - y)``."""
    return math.gamma(2.0 - y) / ((-y) * (1.0 - y))


@dataclass(frozen=True)
class DerivedConstants:
    m_star: float
    g_star: float
    gamma_tilde: float
    eta: float
    c: float
    c_hat: float
    c_one: float
    gamma_neg_y: float


@dataclass(frozen=True)
class CgmyParams:
    """Validated CGMY parameters ``(C, G, M, Y, sigma)``.

    Construction raises :class:`ParameterError` on any violated constraint.
    Derived constants are computed once and cached on the instance.
    """

    C: float
    G: float
    M: float
    Y: float
    sigma: float = 0.0

    def __post_init__(self):
        for name in ("C", "G", "M", "Y", "sigma"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParameterError(f"{name} finite", f"{name} must be a finite real number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not 1.0 < self.Y < 2.0:
            raise ParameterError("1 < Y < 2", f"Y={self.Y} outside the open interval (1, 2)")
        if not self.M > 1.0:
            raise ParameterError("M > 1", f"M={self.M} must exceed 1 for the martingale condition")
        if not self.C > 0.0:
            raise ParameterError("C > 0", f"C={self.C} must be positive")
        if not self.G > 0.0:
            raise ParameterError("G > 0", f"G={self.G} must be positive")
        if not self.sigma >= 0.0:
            raise ParameterError("sigma >= 0", f"sigma={self.sigma} must be non-negative")

    @property
    def kind(self) -> ModelKind:
        return "mixed" if self.sigma > 0.0 else "pure_jump"

    @property
    def is_transition(self) -> bool:
        """True at ``Y = 3/2``, where the two third-order exponents coincide."""
        return self.Y == 1.5

    @cached_property
    def constants(self) -> DerivedConstants:
        return derived_constants(self)

    def with_sigma(self, sigma: float) -> "CgmyParams":
        return CgmyParams(self.C, self.G, self.M, self.Y, sigma)

    def as_dict(self) -> dict:
        return {"C": self.C, "G": self.G, "M": self.M, "Y": self.Y, "sigma": self.sigma}


def validate_params(C, G, M, Y, sigma=0.0) -> CgmyParams:
    """Build :class:`CgmyParams` from five raw numbers, raising on violation."""
    return CgmyParams(C, G, M, Y, sigma)


def derived_constants(p: CgmyParams) -> DerivedConstants:
    C, G, M, Y, s = p.C, p.G, p.M, p.Y, p.sigma
    gy = gamma_neg(Y)
    ms, gs = M - 1.0, G + 1.0
    jump_part = -C * gy * (ms**Y + gs**Y - M**Y - G**Y)
    c_one = C * gy * abs(math.cos(math.pi * Y / 2.0))
    return DerivedConstants(
        m_star=ms,
        g_star=gs,
        gamma_tilde=jump_part + 0.5 * s * s,
        eta=C * gy * (ms**Y + gs**Y),
        c=jump_part - 0.5 * s * s,
        c_hat=2.0 * c_one,
        c_one=c_one,
        gamma_neg_y=gy,
    )


def char_fn(p: CgmyParams, t: float, u):
    """Characteristic function ``E exp(i u X_t)``; ``u`` may be a complex array.

    Requires ``-1 <= Im(u) <= G`` so both complex powers stay on the principal
    branch with bases in the closed right half-plane.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    u = np.asarray(u, dtype=complex)
    im = u.imag
    if np.any(im < -1.0) or np.any(im > p.G):
        raise ValueError(f"u outside the analyticity strip -1 <= Im(u) <= G={p.G}")
    k = p.constants
    C, G, M, Y = p.C, p.G, p.M, p.Y
    expo = (
        1j * k.c * u
        - 0.5 * p.sigma**2 * u * u
        + C * k.gamma_neg_y * ((M - 1j * u) ** Y + (G + 1j * u) ** Y - M**Y - G**Y)
    )
    out = np.exp(t * expo)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class MoneynessSchedule:
    """Close-to-the-money log-moneyness ``kappa_t = e1 t + e2 t^b``.

    ``b = 2 - 1/Y`` for the pure-jump model and ``b = 5/2 - Y`` for the mixed one.
    """

    e1: float = 0.0
    e2: float = 0.0
    model: ModelKind = "pure_jump"
    Y: float = 1.5

    @property
    def is_atm(self) -> bool:
        return self.e1 == 0.0 and self.e2 == 0.0

    @property
    def second_exponent(self) -> float:
        return 2.0 - 1.0 / self.Y if self.model == "pure_jump" else 2.5 - self.Y


def kappa_at(s: MoneynessSchedule, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    out = s.e1 * t + s.e2 * t ** s.second_exponent
    return out[()] if out.ndim == 0 else out


def schedule_for(p: CgmyParams, e1: float = 0.0, e2: float = 0.0) -> MoneynessSchedule:
    return MoneynessSchedule(e1=e1, e2=e2, model=p.kind, Y=p.Y)


@dataclass(frozen=True)
class ModelConfig:
    params: CgmyParams
    schedule: MoneynessSchedule
    source: str | None = field(default=None, compare=False)


_REQUIRED = ("C", "G", "M", "Y", "sigma")


def parse_config(doc: dict, source: str | None = None) -> ModelConfig:
    """Parse the JSON model document ``{"C","G","M","Y","sigma","e1","e2"}``."""
    if not isinstance(doc, dict):
        raise ParameterError("object", "model config must be a JSON object")
    missing = [k for k in _REQUIRED if k not in doc]
    if missing:
        raise ParameterError("required fields", f"missing field(s): {', '.join(missing)}")
    unknown = set(doc) - set(_REQUIRED) - {"e1", "e2"}
    if unknown:
        raise ParameterError("known fields", f"unknown field(s): {', '.join(sorted(unknown))}")
    p = CgmyParams(*(doc[k] for k in _REQUIRED))
    e1, e2 = doc.get("e1", 0.0), doc.get("e2", 0.0)
    for name, v in (("e1", e1), ("e2", e2)):
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ParameterError(f"{name} finite", f"{name} must be a finite real number")
    return ModelConfig(p, schedule_for(p, float(e1), float(e2)), source)


def load_config(path: str | Path) -> ModelConfig:
    path = Path(path)
    with path.open() as fh:
        doc = json.load(fh)
    return parse_config(doc, str(path))


# Calibrated reference sets. The two "al" sets
# average the asymmetric intensities, C = (C+ + C-)/2.
PRESETS: dict[str, CgmyParams] = {
    "schoutens": CgmyParams(0.0244, 0.0765, 7.5515, 1.2945, 0.0),
    "al_pure": CgmyParams(0.0066, 0.4087, 1.932, 1.5, 0.0),
    "al_mixed": CgmyParams(0.00265, 0.4087, 1.932, 1.5, 0.1),
}
