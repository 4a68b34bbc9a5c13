"""The discrete renewal process induced by a radius law.

The inter-arrival law is ``q_k = (1 - alpha_{k-1}) P_{k-1}`` with
``P_j = prod_{i<j} alpha_i`` and defect ``q_inf = lim P_j``. The renewal
sequence ``u_n`` (probability of a renewal at time ``n``) solves the usual
convolution ``u_n = sum_k q_k u_{n-k}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .dist_catalog import RadiusDistribution, TailDataUnavailable, running_products

__all__ = [
    "InterArrivalLaw",
    "RenewalSequence",
    "RenewalStats",
    "BoundReport",
    "UncertifiedWarning",
    "TRANSIENT",
    "NULL_RECURRENT",
    "POSITIVE_RECURRENT",
    "inter_arrival",
    "renewal_sequence",
    "renewal_sequence_from_dist",
    "mu_sigma",
    "classify",
    "survival_probability",
    "tail_bound",
    "verify_bound",
    "HARMONIC_VERDICT_LIMIT",
]

TRANSIENT = "transient"
NULL_RECURRENT = "null_recurrent"
POSITIVE_RECURRENT = "positive_recurrent"

# Above this r the harmonic-variant exponent 2-(1+r)^2 is <= 0.
HARMONIC_VERDICT_LIMIT = math.sqrt(2.0) - 1.0

Number = Union[float, Fraction]


class UncertifiedWarning(UserWarning):
    """A series was summed to a horizon without an analytic remainder."""


@dataclass(frozen=True)
class InterArrivalLaw:
    """``q[k]`` for ``k = 0..K`` (``q[0] = 0``) plus the defect mass.

    ``q_inf_bounds`` brackets the defect when no tail data is known; it is
    ``(q_inf, q_inf)`` otherwise.
    """

    q: Union[np.ndarray, list]
    q_inf: Optional[Number]
    q_inf_bounds: tuple[Number, Number]
    horizon: int

    @property
    def exact(self) -> bool:
        return isinstance(self.q, list)

    @property
    def support_end(self) -> int:
        """Index of the last nonzero q_k within the horizon."""
        for k in range(self.horizon, 0, -1):
            if self.q[k] != 0:
                return k
        return 0


@dataclass(frozen=True)
class RenewalSequence:
    u: Union[np.ndarray, list]

    def __len__(self) -> int:
        return len(self.u)

    def __getitem__(self, n):
        return self.u[n]


@dataclass(frozen=True)
class RenewalStats:
    mu: float
    sigma2: Optional[float]
    recurrence_class: Optional[str]
    survival_prob: float
    certified: bool
    error_bound: float
    horizon: int


def inter_arrival(dist: RadiusDistribution, K: int, exact: bool = False) -> InterArrivalLaw:
    """Inter-arrival law up to horizon ``K``.

    With ``exact=True`` the law is computed in rational arithmetic; this
    requires a finite pmf with fractional entries.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if exact:
        return _inter_arrival_exact(dist, K)
    a = dist.alpha_array(K)
    P = running_products(dist, K)
    q = np.zeros(K + 1)
    q[1:] = (1.0 - a) * P[:K]
    tail = dist.tail
    if tail is not None:
        return InterArrivalLaw(q, tail.product_limit, tail.product_bounds, K)
    # mass not yet released by time K is q_inf + sum_{k>K} q_k = P_K
    return InterArrivalLaw(q, None, (0.0, float(P[K])), K)


def _inter_arrival_exact(dist: RadiusDistribution, K: int) -> InterArrivalLaw:
    if dist.exact_pmf() is None:
        raise TypeError(f"exact arithmetic needs a rational finite pmf, got {dist.spec()}")
    q = [Fraction(0)]
    prod = Fraction(1)
    for k in range(1, K + 1):
        a = dist.alpha_exact(k - 1)
        q.append((1 - a) * prod)
        prod *= a
    limit = Fraction(1)
    for k in range(dist.support_max):
        limit *= dist.alpha_exact(k)
    return InterArrivalLaw(q, limit, (limit, limit), K)


def renewal_sequence(q: InterArrivalLaw, n: int) -> RenewalSequence:
    """``u_0..u_n`` by direct convolution (no FFT)."""
    if n > q.horizon:
        raise ValueError(f"n = {n} exceeds the inter-arrival horizon {q.horizon}")
    s = q.support_end
    if q.exact:
        u = [Fraction(1)]
        for m in range(1, n + 1):
            u.append(sum((q.q[k] * u[m - k] for k in range(1, min(m, s) + 1)), Fraction(0)))
        return RenewalSequence(u)
    qq = np.asarray(q.q, dtype=float)
    u = np.zeros(n + 1)
    u[0] = 1.0
    for m in range(1, n + 1):
        lo = max(0, m - s)
        # sum_{k=1}^{min(m,s)} q_k u_{m-k}
        u[m] = np.dot(qq[m - lo:0:-1], u[lo:m])
    return RenewalSequence(u)


def renewal_sequence_from_dist(dist: RadiusDistribution, n: int, exact: bool = False) -> RenewalSequence:
    return renewal_sequence(inter_arrival(dist, max(n, 1), exact=exact), n)


def _product_terms(dist: RadiusDistribution, J: int) -> np.ndarray:
    P = dist.product_array(J)
    if P is None:
        P = running_products(dist, J)[:J]
    return P


def mu_sigma(dist: RadiusDistribution, tol: float = 1e-9, horizon: int = 10_000) -> RenewalStats:
    """Mean and variance of the inter-arrival law.

    ``mu = sum_{j>=0} P_j`` and the second moment is ``sum_{j>=0} (2j+1) P_j``
    (summation by parts of ``sum k^2 q_k``). With tail data the remainder is
    added in closed form or driven below ``tol``; without it the sums stop at
    ``horizon`` and the result is flagged uncertified.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    tail = dist.tail
    if tail is None:
        P = _product_terms(dist, horizon)
        j = np.arange(horizon)
        mu = math.fsum(P)
        second = math.fsum((2 * j + 1) * P)
        return RenewalStats(mu, second - mu * mu, None, 1.0 / mu, False, math.inf, horizon)

    if tail.product_bounds[0] > 0:
        return RenewalStats(math.inf, None, TRANSIENT, 0.0, True, 0.0, 0)

    J = 1024
    r1 = tail.remainder(J)
    if math.isinf(r1):
        return RenewalStats(math.inf, None, NULL_RECURRENT, 0.0, True, 0.0, J)
    if not tail.exact:
        while r1 > tol and J < (1 << 26):
            J *= 2
            r1 = tail.remainder(J)
    P = _product_terms(dist, J)
    j = np.arange(J)
    mu = math.fsum(P) + r1
    err = 0.0 if tail.exact else r1
    err += 4 * J * np.finfo(float).eps * mu
    certified = err <= tol

    sigma2 = None
    if tail.second_remainder is not None:
        r2 = tail.second_remainder(J)
        if math.isinf(r2):
            sigma2 = math.inf
        else:
            sigma2 = math.fsum((2 * j + 1) * P) + r2 - mu * mu
    return RenewalStats(mu, sigma2, POSITIVE_RECURRENT, 1.0 / mu, certified, err, J)


def classify(dist: RadiusDistribution) -> str:
    if dist.tail is None:
        raise TailDataUnavailable(f"cannot classify {dist.spec()} without tail data")
    return mu_sigma(dist).recurrence_class


def survival_probability(dist: RadiusDistribution, tol: float = 1e-9) -> float:
    """Probability that the firework rumor survives, ``1/mu``.

    Exactly 0 when divergence of ``mu`` is proven. Emits
    ``UncertifiedWarning`` when the value is only a horizon-limited estimate.
    """
    st = mu_sigma(dist, tol)
    if not st.certified:
        warnings.warn(f"survival probability of {dist.spec()} is not certified", UncertifiedWarning)
    return st.survival_prob


# ---------------------------------------------------------------------------
# tail bounds


def tail_bound(variant: str, params: dict, k) -> Union[float, np.ndarray]:
    """Evaluate an explicit tail-bound shape at ``k`` (scalar or array).

    exp: ``(1/C_r) (e^{C_r} r)^k`` with r in (0,1), C_r in (0, ln 1/r).
    polylog: ``(log k)^beta k^{-alpha}``, alpha > 1.
    harmonic: ``(ln k)^{3+r} / k^{2-(1+r)^2}``, r in (0,1).
    regvar: ``k^{-(1-alpha)}``, alpha in (1/2, 1).
    The last three carry an unspecified constant and are returned with C = 1.
    """
    kk = np.asarray(k, dtype=float)
    if np.any(kk < 0):
        raise ValueError("k must be >= 0")
    if variant == "exp":
        r, C = params["r"], params["C_r"]
        if not (0 < r < 1 and 0 < C < math.log(1 / r)):
            raise ValueError("exp bound needs r in (0,1) and C_r in (0, ln(1/r))")
        out = (math.exp(C) * r) ** kk / C
    elif variant == "polylog":
        a, b = params["alpha"], params.get("beta", 0.0)
        if a <= 1:
            raise ValueError("polylog bound needs alpha > 1")
        _need_log_range(kk)
        out = np.log(kk) ** b * kk ** (-a)
    elif variant == "harmonic":
        r = params["r"]
        if not 0 < r < 1:
            raise ValueError("harmonic bound needs r in (0, 1)")
        _need_log_range(kk)
        out = np.log(kk) ** (3 + r) / kk ** (2 - (1 + r) ** 2)
    elif variant == "regvar":
        a = params["alpha"]
        if not 0.5 < a < 1:
            raise ValueError("regvar bound needs alpha in (1/2, 1)")
        with np.errstate(divide="ignore"):
            out = kk ** (-(1 - a))
    else:
        raise ValueError(f"unknown bound variant {variant!r}")
    return float(out) if np.ndim(out) == 0 else out


def _need_log_range(kk: np.ndarray) -> None:
    if np.any(kk < 2):
        raise ValueError("log-type bounds need k >= 2")


@dataclass(frozen=True)
class BoundReport:
    max_ratio: float
    arg_max: int
    last_decade_nonincreasing: bool
    constant_estimate: float
    passed: bool


def verify_bound(u: Sequence[float], bound: Sequence[float], k_min: int = 1) -> BoundReport:
    """Compare ``u_k`` against a bound sequence for ``k >= k_min``.

    The verdict asks the ratio ``u_k / bound_k`` to be finite everywhere and
    nonincreasing over the last decade ``[K/10, K]`` of the computed range.
    ``constant_estimate`` is the supremum of the ratio on the range, i.e. the
    smallest constant that makes the bound hold there.
    """
    u = np.asarray(u, dtype=float)
    b = np.asarray(bound, dtype=float)
    if u.shape != b.shape:
        raise ValueError("sequences must have equal length")
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    K = len(u) - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = u[k_min:] / b[k_min:]
    finite = bool(np.all(np.isfinite(ratio)))
    i = int(np.nanargmax(ratio))
    start = max(k_min, K // 10) - k_min
    tail = ratio[start:]
    nonincreasing = bool(np.all(np.diff(tail) <= 1e-12 * np.abs(tail[:-1])))
    mx = float(ratio[i])
    return BoundReport(mx, i + k_min, nonincreasing, mx, finite and nonincreasing)
