"""Reverse firework process: site i takes the rumor from a spreader in i-R_i..i-1.

The final configuration ``zeta`` is generated left to right. With ``g`` the
number of zeros after the last 1 (so the nearest spreader sits at distance
``g + 1``), site ``n`` becomes a spreader iff ``R_n >= g + 1``, i.e. iff
``U_n >= alpha_g``; this happens with probability ``1 - alpha_g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dist_catalog import RadiusDistribution, TailDataUnavailable
from .renewal_core import mu_sigma

__all__ = [
    "SURVIVES",
    "DIES",
    "ZetaPath",
    "SpreaderLaw",
    "last_one_gap",
    "simulate_rfp",
    "zeta_from_uniforms",
    "informed_sites_rfp",
    "zeta_batch",
    "spreader_counts_batch",
    "rfp_spreader_law",
    "count_spreaders",
    "lln_clt_params",
    "simulate_total_spreaders",
    "total_spreaders_batch",
    "block_lengths",
]

SURVIVES = "Survives"
DIES = "Dies"

# Stop a dying run once the chance of any further spreader is below this.
EXTINCTION_TOL = 1e-6


@dataclass(frozen=True)
class ZetaPath:
    bits: np.ndarray

    def __post_init__(self):
        if len(self.bits) == 0 or self.bits[0] != 1:
            raise ValueError("zeta_0 must be 1")

    @property
    def n(self) -> int:
        return len(self.bits) - 1


@dataclass(frozen=True)
class SpreaderLaw:
    regime: str
    geom_param: Optional[float] = None

    @property
    def mean(self) -> float:
        return math.inf if self.regime == SURVIVES else 1.0 / self.geom_param

    def pmf(self, k: int) -> float:
        if self.regime == SURVIVES:
            return 0.0
        r = self.geom_param
        return r * (1 - r) ** (k - 1) if k >= 1 else 0.0


def last_one_gap(bits: Sequence[int]) -> float:
    """Number of zeros after the last 1 (``inf`` for an all-zero word)."""
    for i, b in enumerate(reversed(bits)):
        if b == 1:
            return i
    return math.inf


def zeta_from_uniforms(alpha: np.ndarray, uniforms: Sequence[float]) -> np.ndarray:
    """``zeta_0 .. zeta_n`` from ``U_1 .. U_n`` with a running gap counter."""
    a = alpha.tolist()
    bits = bytearray(len(uniforms) + 1)
    bits[0] = 1
    g = 0
    for i, u in enumerate(uniforms.tolist() if isinstance(uniforms, np.ndarray) else uniforms, 1):
        if u >= a[g]:
            bits[i] = 1
            g = 0
        else:
            g += 1
    return np.frombuffer(bytes(bits), dtype=np.uint8)


def simulate_rfp(dist: RadiusDistribution, n: int, stream: np.random.Generator) -> ZetaPath:
    if n < 1:
        raise ValueError("n must be >= 1")
    return ZetaPath(zeta_from_uniforms(dist.alpha_array(n + 1), stream.random(n)))


def informed_sites_rfp(radii: Sequence[int], n: int) -> set[int]:
    """Stage recursion ``B_t`` on sites ``0..n``; ``radii[i]`` is used for ``i >= 1``."""
    informed = {0}
    while True:
        new = {
            i for i in range(1, n + 1)
            if i not in informed and any(j in informed for j in range(max(0, i - radii[i]), i))
        }
        if not new:
            return informed
        informed |= new


def zeta_batch(alpha: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Independent paths, one per row of ``uniforms`` (shape ``(reps, n)``).

    Returns ``zeta_1 .. zeta_n`` per row as a bool array.
    """
    reps, n = uniforms.shape
    gap = np.zeros(reps, dtype=np.int64)
    out = np.empty((reps, n), dtype=bool)
    for i in range(n):
        z = uniforms[:, i] >= alpha[gap]
        out[:, i] = z
        gap = np.where(z, 0, gap + 1)
    return out


def spreader_counts_batch(alpha: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """``N(n)`` per row, without materialising the paths."""
    reps, n = uniforms.shape
    gap = np.zeros(reps, dtype=np.int64)
    count = np.zeros(reps, dtype=np.int64)
    for i in range(n):
        z = uniforms[:, i] >= alpha[gap]
        count += z
        gap += 1
        gap[z] = 0
    return count


def block_lengths(bits: np.ndarray) -> tuple[np.ndarray, int]:
    """Distances between consecutive ones, and the length of the open last block."""
    ones = np.flatnonzero(bits)
    return np.diff(ones), len(bits) - 1 - int(ones[-1])


def rfp_spreader_law(dist: RadiusDistribution) -> SpreaderLaw:
    tail = dist.tail
    if tail is None:
        raise TailDataUnavailable(f"no tail data for {dist.spec()}")
    if tail.product_bounds[0] > 0:
        return SpreaderLaw(DIES, tail.product_limit)
    return SpreaderLaw(SURVIVES)


def count_spreaders(path: ZetaPath, n: Optional[int] = None) -> int:
    """``N(n) = zeta_1 + ... + zeta_n``; site 0 is not counted."""
    n = path.n if n is None else n
    return int(np.sum(path.bits[1:n + 1]))


def lln_clt_params(dist: RadiusDistribution, tol: float = 1e-9) -> tuple[float, Optional[float]]:
    """Limit of ``N(n)/n`` and the CLT variance ``sigma^2/mu^3`` (``None`` if undefined)."""
    st = mu_sigma(dist, tol)
    if math.isinf(st.mu):
        return 0.0, None
    s2 = st.sigma2
    if s2 is None or not (0 < s2 < math.inf):
        return 1.0 / st.mu, None
    return 1.0 / st.mu, s2 / st.mu**3


def _tail_products(dist: RadiusDistribution, n: int) -> np.ndarray:
    """``prod_{i>=g} alpha_i`` for ``g = 0..n-1``: chance of no further spreader at gap g."""
    tail = dist.tail
    a = dist.alpha_array(n)
    P = np.concatenate([[1.0], np.cumprod(a)])
    with np.errstate(divide="ignore", invalid="ignore"):
        out = tail.product_bounds[0] / P[:n]
    return np.minimum(np.nan_to_num(out, nan=1.0), 1.0)


def simulate_total_spreaders(dist: RadiusDistribution, stream: np.random.Generator,
                             cap: int = 1_000_000) -> Optional[int]:
    """Total number of spreaders ``N`` (site 0 included) in the dying regime.

    The run stops once the probability of any further spreader drops below
    ``EXTINCTION_TOL``; ``None`` is returned if ``cap`` sites pass first.
    """
    n = int(total_spreaders_batch(dist, stream, 1, cap)[0])
    return None if n < 0 else n


def total_spreaders_batch(dist: RadiusDistribution, stream: np.random.Generator,
                          reps: int, cap: int = 1_000_000) -> np.ndarray:
    """Vectorised ``simulate_total_spreaders``; ``-1`` marks runs that hit ``cap``."""
    law = rfp_spreader_law(dist)
    if law.regime != DIES:
        raise ValueError(f"{dist.spec()} survives a.s.; N is infinite")
    size = 256
    while True:
        stop = np.flatnonzero(1.0 - _tail_products(dist, size) < EXTINCTION_TOL)
        if len(stop) or size >= cap:
            break
        size *= 2
    g_stop = int(stop[0]) if len(stop) else cap
    alpha = dist.alpha_array(g_stop + 1)
    total = np.ones(reps, dtype=np.int64)
    gap = np.zeros(reps, dtype=np.int64)
    alive = np.ones(reps, dtype=bool)
    sites = 0
    while alive.any() and sites < cap:
        u = stream.random(reps)
        z = alive & (u >= alpha[np.minimum(gap, g_stop)])
        total += z
        gap = np.where(z, 0, gap + 1)
        alive &= gap < g_stop
        sites += 1
    total[alive] = -1
    return total
