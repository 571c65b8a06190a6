"""Monte Carlo call pricer under the stable change of measure.

Under the auxiliary measure the CGMY jump part becomes the difference of two
iid one-sided stable variables ``a_t - b_t``, and the price is

    E[ exp(-m* a_t - g* b_t - eta t) (1 - exp(kappa - a_t + b_t - gt t - sigma W_t))^+ ].

Time-``t`` draws are ``t^{1/Y}`` times unit-time draws.

Reproducibility: paths are cut into fixed blocks of ``BLOCK`` draws. Block
``i`` of stream ``s`` owns the generator seeded by ``SeedSequence(seed,
spawn_key=(s, i))``. Block sums are reduced in block order, so the estimate
depends only on ``(n_paths, seed)``. ``n_chunks`` only sets how many worker
threads share the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .model import CgmyParams
from .stable import draw_unit

BLOCK = 1 << 16
MAX_SEED = (1 << 64) - 1

STREAM_PRICE = 0
STREAM_WEIGHT = 1
STREAM_MINSQ = 2
STREAM_HALF_NORMAL = 3


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 100_000
    seed: int = 0
    n_chunks: int = 1

    def __post_init__(self):
        if not isinstance(self.n_paths, (int, np.integer)) or self.n_paths < 1000:
            raise ValueError(f"n_paths must be an integer >= 1000, got {self.n_paths!r}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed <= MAX_SEED:
            raise ValueError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if not isinstance(self.n_chunks, (int, np.integer)) or self.n_chunks < 1:
            raise ValueError(f"n_chunks must be an integer >= 1, got {self.n_chunks!r}")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    se: float
    n: int
    seed: int


def block_sizes(n: int) -> list[int]:
    full, rem = divmod(n, BLOCK)
    return [BLOCK] * full + ([rem] if rem else [])


def block_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, index))))


def run_blocks(cfg: McConfig, stream: int, fn: Callable[[np.random.Generator, int], Sequence]) -> list[np.ndarray]:
    """Apply ``fn(rng, size)`` to every block and sum the results in block order.

    ``fn`` returns a tuple of per-block sums (scalars or arrays). The result is
    the list of their totals, independent of the thread count.
    """
    sizes = block_sizes(cfg.n_paths)

    def one(i):
        return [np.asarray(v, dtype=float) for v in fn(block_rng(cfg.seed, stream, i), sizes[i])]

    if cfg.n_chunks == 1 or len(sizes) == 1:
        parts = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.n_chunks) as ex:
            parts = list(ex.map(one, range(len(sizes))))
    totals = []
    for k in range(len(parts[0])):
        acc = np.zeros_like(parts[0][k])
        for part in parts:
            acc = acc + part[k]
        totals.append(acc)
    return totals


def estimate(s1, s2, n: int, seed: int) -> McEstimate:
    mean = float(s1) / n
    var = max((float(s2) - n * mean * mean) / (n - 1), 0.0)
    return McEstimate(mean, math.sqrt(var / n), n, seed)


def _unit_pair(rng, Y, size, g, backend):
    return g * draw_unit(rng, Y, size, backend), g * draw_unit(rng, Y, size, backend)


def mc_price_grid(p: CgmyParams, ts, kappas, cfg: McConfig, backend: str | None = None) -> list[McEstimate]:
    """Normalized call prices at each ``(t, kappa)``, sharing one set of draws.

    Every point sees the same draws, so each estimate equals the one
    :func:`mc_price` returns for that point alone.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    kappas = np.broadcast_to(np.asarray(kappas, dtype=float), ts.shape).copy()
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    k = p.constants
    Y, sigma = p.Y, p.sigma
    g = k.c_one ** (1.0 / Y)
    price_sums = _kernels.kernel("price_sums", backend)

    def fn(rng, size):
        a, b = _unit_pair(rng, Y, size, g, backend)
        z = rng.standard_normal(size) if sigma > 0.0 else np.zeros(0)
        return price_sums(a, b, z, ts, kappas, k.m_star, k.g_star, k.eta, k.gamma_tilde, sigma, Y)

    s1, s2 = run_blocks(cfg, STREAM_PRICE, fn)
    return [estimate(s1[j], s2[j], cfg.n_paths, cfg.seed) for j in range(ts.shape[0])]


def mc_price(p: CgmyParams, t: float, kappa: float, cfg: McConfig, backend: str | None = None) -> McEstimate:
    """Normalized call price ``E(S_t - e^kappa)^+`` with ``S_0 = 1``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return mc_price_grid(p, [t], [kappa], cfg, backend)[0]


def mc_weight_grid(p: CgmyParams, ts, cfg: McConfig, backend: str | None = None) -> list[McEstimate]:
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    k = p.constants
    g = k.c_one ** (1.0 / p.Y)
    weight_sums = _kernels.kernel("weight_sums", backend)

    def fn(rng, size):
        a, b = _unit_pair(rng, p.Y, size, g, backend)
        return weight_sums(a, b, ts, k.m_star, k.g_star, p.Y)

    s1, s2 = run_blocks(cfg, STREAM_WEIGHT, fn)
    return [estimate(s1[j], s2[j], cfg.n_paths, cfg.seed) for j in range(ts.shape[0])]


def mc_weight_identity_check(p: CgmyParams, t: float, n: int, seed: int) -> McEstimate:
    """MC mean of the measure-change weight ``exp(-m* a_t - g* b_t)``.

    Its expectation is ``exp(eta t)``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    return mc_weight_grid(p, [t], McConfig(n, seed))[0]
