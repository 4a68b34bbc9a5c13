"""Replicated trials with deterministic seeding, estimators and fit tests.

Trials are grouped in fixed blocks of ``BLOCK_SIZE``. Block ``b`` draws from
the generator seeded by ``SeedSequence(master_seed, spawn_key=(b,))``, so the
random input of trial ``t`` is a pure function of ``(master_seed, t)`` and
results do not depend on how blocks are spread over workers.

An experiment is any picklable callable ``experiment(rng, count)`` returning
an array whose first axis has length ``count`` (one entry per trial).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from .dist_catalog import RadiusDistribution
from .firework import fp_range_batch
from .renewal_core import mu_sigma
from .reverse_firework import spreader_counts_batch, total_spreaders_batch, zeta_batch

__all__ = [
    "BLOCK_SIZE",
    "SIGNIFICANCE",
    "Estimate",
    "GofReport",
    "block_stream",
    "run_trials",
    "estimate",
    "gof_discrete",
    "gof_geometric",
    "gof_two_sample",
    "ks_standard_normal",
    "clt_experiment",
    "FpReach",
    "FpTailEvent",
    "RfpSites",
    "RfpCount",
    "RfpTotal",
    "RfpFirstBlock",
]

BLOCK_SIZE = 4096
SIGNIFICANCE = 0.01

Experiment = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    stderr: float
    reps: int
    ci95: tuple[float, float]

    @classmethod
    def bernoulli(cls, successes: int, reps: int) -> "Estimate":
        p = successes / reps
        se = math.sqrt(p * (1 - p) / reps)
        return cls(p, se, reps, (p - 1.96 * se, p + 1.96 * se))

    @classmethod
    def mean(cls, values: np.ndarray) -> "Estimate":
        values = np.asarray(values, dtype=float)
        n = len(values)
        p = float(values.mean())
        se = float(values.std(ddof=1) / math.sqrt(n))
        return cls(p, se, n, (p - 1.96 * se, p + 1.96 * se))

    def within(self, x: float, k: float = 3.0) -> bool:
        return abs(self.p_hat - x) <= k * self.stderr


@dataclass(frozen=True)
class GofReport:
    name: str
    statistic: float
    pvalue: float
    dof: int
    sample_size: int

    @property
    def passed(self) -> bool:
        return self.pvalue > SIGNIFICANCE


def block_stream(master_seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(block,)))


def _run_block(experiment: Experiment, master_seed: int, block: int, count: int) -> np.ndarray:
    return np.asarray(experiment(block_stream(master_seed, block), count))


def _blocks(reps: int, block_size: int) -> list[tuple[int, int]]:
    return [(b, min(block_size, reps - b * block_size)) for b in range(-(-reps // block_size))]


def run_trials(experiment: Experiment, reps: int, master_seed: int, workers: int = 1,
               block_size: int = BLOCK_SIZE, reduce: Optional[Callable] = None) -> np.ndarray:
    """Run ``reps`` trials and return per-trial outputs in trial order.

    With ``reduce`` each block's output is reduced before merging and the
    list of block reductions is returned instead.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    blocks = _blocks(reps, block_size)

    def finish(arr):
        return reduce(arr) if reduce is not None else arr

    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_run_block, experiment, master_seed, b, c) for b, c in blocks]
            parts = [finish(f.result()) for f in futs]
    else:
        parts = [finish(_run_block(experiment, master_seed, b, c)) for b, c in blocks]
    if reduce is not None:
        return parts
    return np.concatenate(parts)


def _sum0(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=np.int64).sum(axis=0)


def estimate(experiment: Experiment, reps: int, master_seed: int, workers: int = 1,
             block_size: int = BLOCK_SIZE):
    """Bernoulli estimates of a 0/1 experiment.

    Returns one ``Estimate`` for a 1-d output, or a list with one per column
    for a 2-d output. Block counts are merged by integer addition.
    """
    if reps < 100:
        raise ValueError("reps must be >= 100")
    parts = run_trials(experiment, reps, master_seed, workers, block_size, reduce=_sum0)
    counts = np.sum(parts, axis=0)
    if np.ndim(counts) == 0:
        return Estimate.bernoulli(int(counts), reps)
    return [Estimate.bernoulli(int(c), reps) for c in counts]


# ---------------------------------------------------------------------------
# goodness of fit


def gof_discrete(samples: np.ndarray, probs: Sequence[float], name: str = "chi2",
                 min_expected: float = 5.0) -> GofReport:
    """Chi-square test of integer samples against ``P(X = k) = probs[k]``.

    Cells with small expected counts at the upper end are merged into one
    tail cell that also absorbs every value beyond ``len(probs) - 1``.
    """
    samples = np.asarray(samples)
    n = len(samples)
    probs = np.asarray(probs, dtype=float)
    support = np.flatnonzero(probs > 0)
    if np.any(~np.isin(samples, support) & (samples < len(probs) - 1)):
        # values with zero model probability below the tail cell
        return GofReport(name, math.inf, 0.0, 0, n)
    lo = int(support[0])
    expected = n * probs
    # last cell index c such that cells lo..c-1 each have expected >= min_expected
    cells = []
    for k in range(lo, len(probs)):
        if expected[k] < min_expected:
            break
        cells.append(k)
    if len(cells) < 1:
        raise ValueError("degenerate bucketing: no cell reaches the minimum expected count")
    obs = [int(np.sum(samples == k)) for k in cells]
    exp = [expected[k] for k in cells]
    tail_p = 1.0 - float(np.sum(probs[cells]))
    tail_obs = n - sum(obs) - int(np.sum(samples < lo))
    if tail_p * n >= min_expected:
        obs.append(tail_obs)
        exp.append(tail_p * n)
    else:
        obs[-1] += tail_obs
        exp[-1] += tail_p * n
    if len(obs) < 2:
        raise ValueError("degenerate bucketing: fewer than two cells")
    obs_a, exp_a = np.asarray(obs, dtype=float), np.asarray(exp, dtype=float)
    stat = float(np.sum((obs_a - exp_a) ** 2 / exp_a))
    dof = len(obs) - 1
    return GofReport(name, stat, float(stats.chi2.sf(stat, dof)), dof, n)


def gof_geometric(samples: np.ndarray, r: float) -> GofReport:
    """Chi-square test against ``P(N = k) = r (1 - r)^(k - 1)`` on {1, 2, ...}."""
    samples = np.asarray(samples)
    if len(samples) < 10_000:
        raise ValueError("need at least 10^4 samples")
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    kmax = int(max(samples.max(), 1)) + 1
    k = np.arange(kmax + 1)
    probs = np.where(k >= 1, r * (1 - r) ** np.maximum(k - 1, 0), 0.0)
    return gof_discrete(samples, probs, name=f"geometric(r={r:g})")


def gof_two_sample(a: np.ndarray, b: np.ndarray, name: str = "two-sample",
                   min_expected: float = 5.0) -> GofReport:
    """Chi-square homogeneity test for two integer samples."""
    a, b = np.asarray(a), np.asarray(b)
    top = int(max(a.max(), b.max()))
    ca = np.bincount(a, minlength=top + 1).astype(float)
    cb = np.bincount(b, minlength=top + 1).astype(float)
    # merge the upper tail until both expected counts are large enough
    tot = ca + cb
    frac_a = len(a) / (len(a) + len(b))
    cut = top + 1
    while cut > 1 and min(frac_a, 1 - frac_a) * tot[cut - 1:].sum() < min_expected:
        cut -= 1
    ta, tb = ca[:cut].copy(), cb[:cut].copy()
    ta[-1] += ca[cut:].sum()
    tb[-1] += cb[cut:].sum()
    keep = (ta + tb) > 0
    table = np.vstack([ta[keep], tb[keep]])
    if table.shape[1] < 2:
        raise ValueError("degenerate bucketing: fewer than two cells")
    res = stats.chi2_contingency(table, correction=False)
    return GofReport(name, float(res.statistic), float(res.pvalue), int(res.dof), len(a) + len(b))


def ks_standard_normal(z: np.ndarray, name: str = "ks-normal") -> GofReport:
    """One-sample KS test against N(0, 1) with the asymptotic p-value."""
    z = np.asarray(z, dtype=float)
    res = stats.kstest(z, "norm", method="asymp")
    return GofReport(name, float(res.statistic), float(res.pvalue), 0, len(z))


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class FpReach:
    """Site-reached indicators for sites ``1..horizon`` of the firework process."""

    dist: RadiusDistribution
    horizon: int

    def __call__(self, rng: np.random.Generator, count: int) -> np.ndarray:
        M = fp_range_batch(self.dist, rng.random((count, self.horizon)))
        n = np.arange(1, self.horizon + 1)
        return (M[:, None] < 0) | (M[:, None] >= n[None, :])


@dataclass(frozen=True)
class FpTailEvent:
    """Indicator of ``{M > n}``."""

    dist: RadiusDistribution
    n: int

    def __call__(self, rng: np.random.Generator, count: int) -> np.ndarray:
        M = fp_range_batch(self.dist, rng.random((count, self.n + 1)))
        return M < 0


@dataclass(frozen=True)
class RfpSites:
    """``zeta_1..zeta_n`` of the reverse firework process."""

    dist: RadiusDistribution
    n: int

    def __call__(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return zeta_batch(self.dist.alpha_array(self.n + 1), rng.random((count, self.n)))


@dataclass(frozen=True)
class RfpCount:
    """Spreader count ``N(n)``; uniforms are drawn in column chunks."""

    dist: RadiusDistribution
    n: int
    chunk: int = 1024

    def __call__(self, rng: np.random.Generator, count: int) -> np.ndarray:
        alpha = self.dist.alpha_array(self.n + 1)
        gap = np.zeros(count, dtype=np.int64)
        total = np.zeros(count, dtype=np.int64)
        done = 0
        while done < self.n:
            w = min(self.chunk, self.n - done)
            U = rng.random((count, w))
            for i in range(w):
                z = U[:, i] >= alpha[gap]
                total += z
                gap += 1
                gap[z] = 0
            done += w
        return total


@dataclass(frozen=True)
class RfpTotal:
    """Total number of spreaders ``N`` in the dying regime (``-1`` if capped)."""

    dist: RadiusDistribution
    cap: int = 1_000_000

    def __call__(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return total_spreaders_batch(self.dist, rng, count, self.cap)


@dataclass(frozen=True)
class RfpFirstBlock:
    """Length of the first block ``0^{k-1} 1`` after site 0; 0 if none by ``horizon``."""

    dist: RadiusDistribution
    horizon: int

    def __call__(self, rng: np.random.Generator, count: int) -> np.ndarray:
        z = zeta_batch(self.dist.alpha_array(self.horizon + 1), rng.random((count, self.horizon)))
        hit = z.any(axis=1)
        return np.where(hit, np.argmax(z, axis=1) + 1, 0)


def clt_experiment(dist: RadiusDistribution, n: int, reps: int, master_seed: int,
                   workers: int = 1, mu: Optional[float] = None,
                   sigma2: Optional[float] = None) -> tuple[GofReport, np.ndarray]:
    """Standardise ``N(n)`` over replicates and KS-test against N(0, 1).

    ``mu``/``sigma2`` default to the certified values; passing a wrong ``mu``
    gives the negative control.
    """
    if n < 10_000 or reps < 1000:
        raise ValueError("the CLT experiment needs n >= 10^4 and reps >= 10^3")
    st = mu_sigma(dist)
    if st.sigma2 is None or not (0 < st.sigma2 < math.inf) or not st.certified:
        raise ValueError(
            f"CLT needs a certified finite positive variance; {dist.spec()} has "
            f"sigma2={st.sigma2}. Use the law-of-large-numbers check instead."
        )
    mu = st.mu if mu is None else mu
    sigma2 = st.sigma2 if sigma2 is None else sigma2
    counts = run_trials(RfpCount(dist, n), reps, master_seed, workers)
    z = (counts - n / mu) / math.sqrt(n * sigma2 / mu**3)
    return ks_standard_normal(z, name=f"clt(n={n})"), z
