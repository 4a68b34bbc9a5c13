"""Brute-force enumeration over radius configurations of finite-support laws.

Everything here follows the stage-set definitions of the two processes (or
the literal min-formula) and never touches the renewal machinery, so the
results serve as ground truth for it. With a rational pmf all sums are
carried out in integers over a common denominator.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Callable, Optional, Sequence, Union

from .dist_catalog import RadiusDistribution
from .firework import informed_sites_fp
from .reverse_firework import informed_sites_rfp

__all__ = [
    "MAX_CONFIGURATIONS",
    "EnumerationTooLarge",
    "ExactProbability",
    "min_formula_range",
    "enumerate_fp_tail",
    "enumerate_rfp_block",
    "enumerate_site_informed",
    "fp_definitions_agree",
]

MAX_CONFIGURATIONS = 10**8


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ExactProbability:
    value: Union[Fraction, float]

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError(f"probability out of range: {self.value}")

    @property
    def is_rational(self) -> bool:
        return isinstance(self.value, Fraction)

    @property
    def numerator(self) -> Optional[int]:
        return self.value.numerator if self.is_rational else None

    @property
    def denominator(self) -> Optional[int]:
        return self.value.denominator if self.is_rational else None

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        if self.is_rational:
            return f"{self.value.numerator}/{self.value.denominator}"
        return repr(self.value)


def _weights(dist: RadiusDistribution) -> tuple[list, Union[int, float], bool]:
    """Per-radius weights and their common scale."""
    if dist.support_max is None:
        raise ValueError(f"enumeration needs finite support, got {dist.spec()}")
    exact = dist.exact_pmf()
    if exact is not None:
        den = math.lcm(*(v.denominator for v in exact))
        return [int(v * den) for v in exact], den, True
    K = dist.support_max
    return [dist.pmf(k) for k in range(K + 1)], 1.0, False


def _guard(s: int, length: int) -> None:
    if s**length > MAX_CONFIGURATIONS:
        raise EnumerationTooLarge(f"{s}^{length} configurations exceed {MAX_CONFIGURATIONS}")


def _partial_sum(weights: list, length: int, event: Callable[[tuple], bool],
                 parts: int, part: int):
    """Sum of weights over configurations whose first radius is ``= part (mod parts)``."""
    support = [k for k, w in enumerate(weights) if w]
    total = 0
    for r0 in support[part::parts]:
        w0 = weights[r0]
        for rest in itertools.product(support, repeat=length - 1):
            config = (r0,) + rest
            if event(config):
                total += w0 * math.prod(weights[r] for r in rest)
    return total


def _enumerate(dist: RadiusDistribution, length: int, event: Callable[[tuple], bool],
               parts: int = 1, workers: int = 1) -> ExactProbability:
    if length < 1:
        raise ValueError("need at least one radius")
    weights, scale, exact = _weights(dist)
    _guard(sum(1 for w in weights if w), length)
    jobs = [partial(_partial_sum, weights, length, event, parts, p) for p in range(parts)]
    if workers > 1 and parts > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            sums = list(ex.map(_call, jobs))
    else:
        sums = [job() for job in jobs]
    total = sum(sums)
    if exact:
        return ExactProbability(Fraction(total, scale**length))
    return ExactProbability(min(1.0, max(0.0, float(total))))


def _call(job):
    return job()


def min_formula_range(radii: Sequence[int]) -> Optional[int]:
    """``min{i : R_j <= i - j for j = 0..i}`` over the given prefix, else ``None``."""
    for i in range(len(radii)):
        if all(radii[j] <= i - j for j in range(i + 1)):
            return i
    return None


def _fp_tail_event(n: int, config: tuple) -> bool:
    return min_formula_range(config) is None


def _rfp_block_event(k: int, config: tuple) -> bool:
    informed = informed_sites_rfp((0,) + config, k)
    return all((i in informed) == (i == k) for i in range(1, k + 1))


def _fp_site_event(n: int, config: tuple) -> bool:
    return n in informed_sites_fp(config + (0,), n)


def _rfp_site_event(n: int, config: tuple) -> bool:
    return n in informed_sites_rfp((0,) + config, n)


def enumerate_fp_tail(dist: RadiusDistribution, n: int, parts: int = 1, workers: int = 1) -> ExactProbability:
    """``P(M > n)`` summed over all ``(R_0, ..., R_n)``."""
    if not 0 <= n <= 12:
        raise ValueError("n must lie in 0..12")
    return _enumerate(dist, n + 1, partial(_fp_tail_event, n), parts, workers)


def enumerate_rfp_block(dist: RadiusDistribution, k: int, parts: int = 1, workers: int = 1) -> ExactProbability:
    """Probability that ``zeta_1..zeta_k`` reads ``0^{k-1} 1`` (zeta_0 = 1 always)."""
    if not 1 <= k <= 12:
        raise ValueError("k must lie in 1..12")
    return _enumerate(dist, k, partial(_rfp_block_event, k), parts, workers)


def enumerate_site_informed(dist: RadiusDistribution, n: int, model: str,
                            parts: int = 1, workers: int = 1) -> ExactProbability:
    """Probability that site ``n`` is eventually informed, by stage recursion.

    FP uses radii ``R_0..R_{n-1}``; RFP uses ``R_1..R_n``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return ExactProbability(Fraction(1) if dist.exact_pmf() is not None else 1.0)
    model = model.upper()
    if model == "FP":
        return _enumerate(dist, n, partial(_fp_site_event, n), parts, workers)
    if model == "RFP":
        return _enumerate(dist, n, partial(_rfp_site_event, n), parts, workers)
    raise ValueError(f"unknown model {model!r}")


def fp_definitions_agree(dist: RadiusDistribution, n: int) -> tuple[int, int]:
    """Compare the stage-set range with the min-formula on every configuration.

    Returns ``(configurations checked, disagreements)``.
    """
    support = [k for k in range(dist.support_max + 1) if dist.pmf(k) > 0]
    _guard(len(support), n + 1)
    checked = bad = 0
    for config in itertools.product(support, repeat=n + 1):
        m = min_formula_range(config)
        informed = informed_sites_fp(config + (0,), n + 1)
        right = max(informed)
        m_sets = right if right <= n else None
        checked += 1
        bad += m != m_sets
    return checked, bad
