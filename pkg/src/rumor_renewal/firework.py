"""Firework process: each informed site j informs every site in j..j+R_j.

The rumor range ``M`` is the rightmost informed site,
``M = min{i >= 0 : max_{j<=i} (j + R_j) <= i}``, and ``P(M > n) = u_{n+1}``.
Radii are obtained from uniforms by cdf inversion, so the same uniform
stream drives every simulator in this module.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .dist_catalog import RadiusDistribution
from .renewal_core import renewal_sequence_from_dist

__all__ = [
    "DIED",
    "ALIVE",
    "FpOutcome",
    "HPath",
    "UniformTable",
    "CouplingReport",
    "fp_tail",
    "sample_radius",
    "sample_radii",
    "LazyRadii",
    "simulate_fp",
    "simulate_fp_sets",
    "simulate_reversed_m",
    "informed_sites_fp",
    "range_from_radii",
    "fp_range_batch",
    "simulate_h_chain",
    "h_chains_batch",
    "check_monotone_coalescence",
    "coupling_violations_batch",
]

DIED = "Died"
ALIVE = "AliveAtHorizon"


@dataclass(frozen=True)
class FpOutcome:
    status: str
    M: Optional[int]
    horizon: int

    def __post_init__(self):
        if self.status == DIED and (self.M is None or self.M >= self.horizon):
            raise ValueError("a Died outcome needs M < horizon")

    @property
    def reached(self) -> int:
        """Sites ``0..reached`` are known to be informed."""
        return self.M if self.status == DIED else self.horizon


def fp_tail(dist: RadiusDistribution, n: int) -> float:
    """``P(M > n)``, equal to the renewal probability ``u_{n+1}``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return float(renewal_sequence_from_dist(dist, n + 1)[n + 1])


# ---------------------------------------------------------------------------
# radius sampling


def sample_radius(dist: RadiusDistribution, u: float) -> int:
    """Return the k with ``alpha_{k-1} <= u < alpha_k``."""
    if not 0.0 <= u < 1.0:
        raise ValueError("u must lie in [0, 1)")
    hi = 1
    while dist.alpha(hi) <= u:
        hi *= 2
        if hi > 1 << 62:
            raise OverflowError("cdf does not reach u")
    lo = -1  # alpha(lo) <= u holds with alpha(-1) = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if dist.alpha(mid) <= u:
            lo = mid
        else:
            hi = mid
    return hi


class _AlphaCache:
    """Growing float table of alpha used by vectorised inversion.

    The table stops growing at ``MAX_TABLE`` entries; the rare uniforms
    beyond it are inverted one by one with ``sample_radius``.
    """

    MAX_TABLE = 1 << 22

    def __init__(self, dist: RadiusDistribution, size: int = 1024):
        self.dist = dist
        sm = dist.support_max
        self.table = dist.alpha_array(sm + 1 if sm is not None else size)
        self.complete = sm is not None

    def search(self, u: np.ndarray) -> np.ndarray:
        r = np.searchsorted(self.table, u, side="right")
        while not self.complete and len(self.table) < self.MAX_TABLE and np.any(r >= len(self.table)):
            self.table = self.dist.alpha_array(2 * len(self.table))
            r = np.searchsorted(self.table, u, side="right")
        over = r >= len(self.table)
        if not self.complete and over.any():
            r = r.astype(np.int64)
            r[over] = [sample_radius(self.dist, float(x)) for x in u[over]]
        return r


def sample_radii(dist: RadiusDistribution, u: np.ndarray) -> np.ndarray:
    """Vectorised inversion; agrees elementwise with ``sample_radius``."""
    return _AlphaCache(dist).search(np.asarray(u, dtype=float))


class LazyRadii:
    """Radii ``R_0, R_1, ...`` drawn on demand, in site order, from ``rng``."""

    def __init__(self, dist: RadiusDistribution, rng: np.random.Generator):
        self._cache = _AlphaCache(dist)
        self._rng = rng
        self._r: list[int] = []

    def __getitem__(self, i: int) -> int:
        while len(self._r) <= i:
            u = self._rng.random(64)
            self._r.extend(int(x) for x in self._cache.search(u))
        return self._r[i]


# ---------------------------------------------------------------------------
# simulators


def simulate_fp(dist: RadiusDistribution, horizon: int, stream: np.random.Generator) -> FpOutcome:
    """Run the firework process with the frontier ``F_i = max(F_{i-1}, i + R_i)``."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    R = LazyRadii(dist, stream)
    frontier = 0
    for i in range(horizon):
        frontier = max(frontier, i + R[i])
        if frontier <= i:
            return FpOutcome(DIED, i, horizon)
    return FpOutcome(ALIVE, None, horizon)


def informed_sites_fp(radii: Sequence[int], limit: int) -> set[int]:
    """Stage recursion ``A_n`` restricted to sites ``0..limit``.

    ``radii[j]`` must exist for every informed ``j <= limit``.
    """
    informed = {0}
    stage = {0}
    while stage:
        new = set()
        for j in stage:
            for i in range(j, min(j + radii[j], limit) + 1):
                if i not in informed:
                    new.add(i)
        informed |= new
        stage = new
    return informed


def simulate_fp_sets(dist: RadiusDistribution, horizon: int, stream: np.random.Generator) -> FpOutcome:
    """Reference simulator iterating the stage sets literally.

    Reads radii from ``stream`` in the same order as ``simulate_fp`` so both
    see identical radius sequences for the same seed.
    """
    R = LazyRadii(dist, stream)
    informed = informed_sites_fp(R, horizon)
    right = max(informed)
    if right < horizon:
        return FpOutcome(DIED, right, horizon)
    return FpOutcome(ALIVE, None, horizon)


def range_from_radii(radii: Sequence[int]) -> Optional[int]:
    """Min-formula range over a finite radius prefix, ``None`` if not dead yet."""
    frontier = 0
    for i, r in enumerate(radii):
        frontier = max(frontier, i + r)
        if frontier <= i:
            return i
    return None


def fp_range_batch(dist: RadiusDistribution, uniforms: np.ndarray) -> np.ndarray:
    """Range of many independent runs, one per row of ``uniforms``.

    Returns ``M`` per row, or ``-1`` when the process is still alive at the
    last column (censored at horizon ``uniforms.shape[1]``).
    """
    R = sample_radii(dist, uniforms)
    idx = np.arange(uniforms.shape[1])
    frontier = np.maximum.accumulate(R + idx, axis=1)
    dead = frontier <= idx
    first = np.argmax(dead, axis=1)
    return np.where(dead.any(axis=1), first, -1)


def simulate_reversed_m(dist: RadiusDistribution, horizon: int, stream: np.random.Generator) -> Optional[int]:
    """Sample ``-Mbar`` where ``Mbar = max{i <= 0 : U_j < alpha_{j-i}, j = i..0}``.

    Uniforms ``U_0, U_{-1}, U_{-2}, ...`` are drawn in that order; the
    defining condition is checked literally for each candidate ``i``.
    Returns ``None`` when no ``i >= -horizon + 1`` qualifies.
    """
    a = _AlphaCache(dist)
    U: list[float] = []
    for t in range(horizon):
        U.append(float(stream.random()))  # U[s] is U_{-s}
        i = -t
        alphas = _alpha_at(a, t + 1)
        if all(U[-j] < alphas[j - i] for j in range(i, 1)):
            return t
    return None


def _alpha_at(cache: _AlphaCache, n: int) -> np.ndarray:
    if len(cache.table) < n:
        cache.table = cache.dist.alpha_array(max(n, 2 * len(cache.table)))
    if len(cache.table) < n:  # finite support: pad with ones
        return np.concatenate([cache.table, np.ones(n - len(cache.table))])
    return cache.table


# ---------------------------------------------------------------------------
# coupled house-of-cards chains


@dataclass(frozen=True)
class UniformTable:
    """Uniforms ``U_t`` for ``t = start .. start + len(values) - 1``."""

    start: int
    values: np.ndarray

    @property
    def end(self) -> int:
        return self.start + len(self.values) - 1

    def __getitem__(self, t: int) -> float:
        if not self.start <= t <= self.end:
            raise IndexError(f"U_{t} outside table [{self.start}, {self.end}]")
        return float(self.values[t - self.start])

    @classmethod
    def draw(cls, start: int, end: int, rng: np.random.Generator) -> "UniformTable":
        return cls(start, rng.random(end - start + 1))


@dataclass(frozen=True)
class HPath:
    start: int
    values: tuple[int, ...]

    def at(self, t: int) -> int:
        return self.values[t - self.start]

    @property
    def end(self) -> int:
        return self.start + len(self.values) - 1


def simulate_h_chain(dist: RadiusDistribution, m: int, n: int, table: UniformTable) -> HPath:
    """Chain started at 0 at time ``m``; ``H_t = (H_{t-1}+1) 1{U_t < alpha_{H_{t-1}}}``."""
    if m > n:
        raise ValueError("need m <= n")
    a = _alpha_at(_AlphaCache(dist), n - m + 1)
    h = 0
    vals = [0]
    for t in range(m + 1, n + 1):
        h = h + 1 if table[t] < a[h] else 0
        vals.append(h)
    return HPath(m, tuple(vals))


def h_chains_batch(dist: RadiusDistribution, uniforms: np.ndarray) -> np.ndarray:
    """All chains over a batch of shared tables.

    ``uniforms`` has shape ``(trials, T)`` and column ``c`` holds ``U_c``.
    The result ``H[trial, m, t]`` is the chain started at ``m`` (for
    ``m, t in 0..T-1``), with ``-1`` where ``t < m``.
    """
    trials, T = uniforms.shape
    a = _alpha_at(_AlphaCache(dist), T + 1)
    H = np.full((trials, T, T), -1, dtype=np.int64)
    for m in range(T):
        H[:, m, m] = 0
    for t in range(1, T):
        prev = H[:, :t, t - 1]
        up = uniforms[:, t][:, None] < a[prev]
        H[:, :t, t] = np.where(up, prev + 1, 0)
    return H


@dataclass(frozen=True)
class CouplingReport:
    passed: bool
    violations: int
    first_violation: Optional[tuple]


def coupling_violations_batch(H: np.ndarray) -> tuple[int, Optional[tuple]]:
    """Count failures of monotonicity and coalescence in ``H[trial, m, t]``.

    Monotonicity: ``H^(m)_t >= H^(k)_t`` for ``m < k <= t``.
    Coalescence: ``H^(m)_n = 0`` implies ``H^(m)_t = H^(k)_t`` for
    ``m <= k <= n <= t``.
    """
    trials, T, _ = H.shape
    count = 0
    first = None
    t_idx = np.arange(T)
    for m in range(T):
        for k in range(m + 1, T):
            hm, hk = H[:, m, k:], H[:, k, k:]
            bad = hm < hk
            # first zero time n >= k of chain m; from then on both must agree
            zero = hm == 0
            n0 = np.where(zero.any(axis=1), np.argmax(zero, axis=1), T)
            after = t_idx[None, : T - k] >= n0[:, None]
            bad |= after & (hm != hk)
            c = int(bad.sum())
            if c and first is None:
                tr, tt = np.argwhere(bad)[0]
                first = (int(tr), m, k, int(tt + k))
            count += c
    return count, first


def check_monotone_coalescence(paths: Iterable[HPath]) -> CouplingReport:
    """Check the pairwise coupling properties of chains read from one table.

    ``first_violation`` is ``(start_m, start_k, t)`` for the first failure.
    """
    paths = sorted(paths, key=lambda p: p.start)
    count = 0
    first = None
    for i, pm in enumerate(paths):
        for pk in paths[i + 1:]:
            m, k = pm.start, pk.start
            end = min(pm.end, pk.end)
            coalesced = False
            for t in range(k, end + 1):
                hm, hk = pm.at(t), pk.at(t)
                coalesced = coalesced or hm == 0
                if hm < hk or (coalesced and hm != hk):
                    count += 1
                    if first is None:
                        first = (m, k, t)
    return CouplingReport(count == 0, count, first)
