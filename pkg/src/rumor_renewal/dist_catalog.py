"""Radius distributions on {0, 1, 2, ...}.

A radius law is described by its cdf ``alpha(k) = P(R <= k)``. Three kinds
exist: an explicit finite pmf (stored as exact fractions), a parametric
family with closed-form tail data, and a transformed law obtained from a
base law by one of the model-variant maps (sparse sites, random group size,
susceptibility).

Every distribution is immutable. Float arrays returned by ``alpha_array`` are
freshly allocated on each call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

__all__ = [
    "DistributionError",
    "TailDataUnavailable",
    "TailData",
    "RadiusDistribution",
    "FinitePmf",
    "Family",
    "Transformed",
    "CountLaw",
    "SusceptibilitySeq",
    "FAMILIES",
    "alpha",
    "pmf",
    "make_family",
    "transform_sparse",
    "transform_pgf",
    "transform_susceptible",
    "tail_remainder_bound",
    "running_products",
]

# Horizon used to bracket infinite products that have no closed form.
_PRODUCT_HORIZON = 1 << 20


class DistributionError(ValueError):
    """Invalid radius distribution or parameters."""


class TailDataUnavailable(LookupError):
    """Raised when a distribution carries no analytic tail information."""


@dataclass(frozen=True)
class TailData:
    """Analytic tail information of ``P_j = prod_{i<j} alpha_i``.

    ``remainder(J)`` bounds ``sum_{j>=J} P_j`` and returns ``math.inf`` when
    the series diverges. ``second_remainder(J)`` does the same for
    ``sum_{j>=J} (2j+1) P_j`` (used for the variance) and may be ``None``.
    When ``exact`` is set both rules return the value of the remainder, not
    only a bound.
    """

    product_limit: float
    product_bounds: tuple[float, float]
    remainder: Callable[[int], float]
    exact: bool = False
    second_remainder: Optional[Callable[[int], float]] = None

    def __post_init__(self):
        lo, hi = self.product_bounds
        if not (0.0 <= lo <= self.product_limit <= hi < 1.0):
            raise DistributionError(f"bad product bracket {self.product_bounds}")


class RadiusDistribution:
    """Base class. Subclasses implement ``alpha_array`` and ``spec``."""

    def alpha_array(self, n: int) -> np.ndarray:
        """Return ``alpha(0), ..., alpha(n-1)`` as a float array."""
        raise NotImplementedError

    def alpha(self, k: int) -> float:
        if k < 0:
            return 0.0
        return float(self.alpha_array(k + 1)[k])

    def pmf(self, k: int) -> float:
        if k < 0:
            return 0.0
        if k == 0:
            return self.alpha(0)
        a = self.alpha_array(k + 1)
        return float(a[k] - a[k - 1])

    @property
    def support_max(self) -> Optional[int]:
        """Largest radius with positive mass, ``None`` if unbounded."""
        return None

    @property
    def tail(self) -> Optional[TailData]:
        return None

    def product_array(self, n: int) -> Optional[np.ndarray]:
        """Closed-form ``P_0, ..., P_{n-1}`` when the law has one."""
        return None

    def exact_pmf(self) -> Optional[list[Fraction]]:
        return None

    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.spec()

    def _check_alpha(self, n: int = 4096) -> None:
        a = self.alpha_array(n)
        if not (0.0 < a[0] < 1.0):
            raise DistributionError(f"alpha_0 = {a[0]!r} must lie in (0, 1)")
        if np.any(np.diff(a) < 0) or np.any(a > 1.0) or np.any(~np.isfinite(a)):
            raise DistributionError("alpha must be a nondecreasing sequence in (0, 1]")


def _finite_support_tail(dist: RadiusDistribution) -> TailData:
    K = dist.support_max
    a = dist.alpha_array(K + 1)
    # math.prod of the floats; alpha_K == 1 so later factors contribute nothing.
    p = math.prod(float(x) for x in a[:K])
    return TailData(
        product_limit=p,
        product_bounds=(p, p),
        remainder=lambda J: math.inf,
        exact=True,
        second_remainder=lambda J: math.inf,
    )


# ---------------------------------------------------------------------------
# Finite pmf


@dataclass(frozen=True, eq=True)
class FinitePmf(RadiusDistribution):
    """Explicit pmf ``lambda_0, ..., lambda_K`` held as exact fractions."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if len(vals) < 2:
            raise DistributionError("finite pmf needs at least two entries")
        if any(v < 0 for v in vals):
            raise DistributionError("pmf entries must be nonnegative")
        total = sum(vals)
        if abs(total - 1) > Fraction(1, 10**12):
            raise DistributionError(f"pmf sums to {float(total)!r}, not 1")
        if total != 1:
            vals = tuple(v / total for v in vals)
        while vals[-1] == 0:
            vals = vals[:-1]
        if not (0 < vals[0] < 1):
            raise DistributionError("lambda_0 must lie in (0, 1)")
        object.__setattr__(self, "values", vals)
        cum, acc = [], Fraction(0)
        for v in vals:
            acc += v
            cum.append(acc)
        object.__setattr__(self, "_cdf", tuple(cum))

    @classmethod
    def from_values(cls, values: Sequence) -> "FinitePmf":
        """Build from floats, strings or fractions.

        Strings such as ``"0.3"`` or ``"1/3"`` are read exactly; floats are
        converted through their shortest repr so ``0.1`` becomes ``1/10``.
        """
        out = []
        for v in values:
            if isinstance(v, float):
                v = repr(v)
            out.append(Fraction(v))
        return cls(tuple(out))

    @property
    def support_max(self) -> int:
        return len(self.values) - 1

    def alpha_exact(self, k: int) -> Fraction:
        if k < 0:
            return Fraction(0)
        if k >= len(self._cdf):
            return Fraction(1)
        return self._cdf[k]

    def exact_pmf(self) -> list[Fraction]:
        return list(self.values)

    def alpha_array(self, n: int) -> np.ndarray:
        out = np.ones(n)
        m = min(n, len(self._cdf))
        out[:m] = [float(c) for c in self._cdf[:m]]
        return out

    def alpha(self, k: int) -> float:
        return float(self.alpha_exact(k))

    def pmf(self, k: int) -> float:
        if k < 0 or k >= len(self.values):
            return 0.0
        return float(self.values[k])

    @property
    def tail(self) -> TailData:
        return _finite_support_tail(self)

    def spec(self) -> str:
        return "finite:" + ",".join(_fmt_fraction(v) for v in self.values)


# ---------------------------------------------------------------------------
# Parametric families


@dataclass(frozen=True)
class _FamilyRule:
    names: tuple[str, ...]
    defaults: dict
    validate: Callable[[dict], None]
    alpha: Callable[[dict, np.ndarray], np.ndarray]
    tail: Callable[[dict], TailData]
    product: Optional[Callable[[dict, np.ndarray], np.ndarray]] = None


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DistributionError(msg)


def _lgamma_ratio_product(c: float, j: np.ndarray) -> np.ndarray:
    # prod_{i<j} (i+1)/(i+1+c) = Gamma(j+1) Gamma(1+c) / Gamma(j+1+c)
    return np.exp(special.gammaln(j + 1.0) + special.gammaln(1.0 + c) - special.gammaln(j + 1.0 + c))


def _frac_tail(p: dict) -> TailData:
    c = p["c"]
    lg = special.gammaln

    def rem1(J: int) -> float:
        if c <= 1:
            return math.inf
        return math.exp(lg(1 + c) + lg(J + 1) - lg(J + c)) / (c - 1)

    def rem2(J: int) -> float:
        if c <= 2:
            return math.inf
        # sum (2j+1) P_j = 2 sum Gamma(j+2)/Gamma(j+1+c) * Gamma(1+c) - sum P_j
        return 2.0 * math.exp(lg(1 + c) + lg(J + 2) - lg(J + c)) / (c - 2) - rem1(J)

    return TailData(0.0, (0.0, 0.0), rem1, exact=True, second_remainder=rem2)


def _powratio_tail(p: dict) -> TailData:
    a = p["a"]

    def rem1(J: int) -> float:
        if a <= 1:
            return math.inf
        return float(special.zeta(a, J + 1))

    def rem2(J: int) -> float:
        if a <= 2:
            return math.inf
        return float(2.0 * special.zeta(a - 1, J + 1) - special.zeta(a, J + 1))

    return TailData(0.0, (0.0, 0.0), rem1, exact=True, second_remainder=rem2)


def _bracketed_product(alpha: np.ndarray, tail_defect: float) -> tuple[float, tuple[float, float]]:
    # prod_{i>=K}(1 - x_i) lies in [1 - sum x_i, 1].
    head = float(np.prod(alpha))
    lo = head * max(0.0, 1.0 - tail_defect)
    return 0.5 * (lo + head), (lo, head)


def _geomdefect_tail(p: dict) -> TailData:
    C, r = p["C"], p["r"]
    K = 1
    while C * r**K / (1 - r) > 1e-17 and K < _PRODUCT_HORIZON:
        K *= 2
    k = np.arange(K)
    mid, br = _bracketed_product(1.0 - C * r**k, C * r**K / (1 - r))
    return TailData(mid, br, lambda J: math.inf, exact=True, second_remainder=lambda J: math.inf)


def _harmonic_product(p: dict, j: np.ndarray) -> np.ndarray:
    r, a0 = p["r"], p["alpha0"]
    j = np.asarray(j, dtype=float)
    out = np.ones_like(j)
    pos = j >= 1
    jp = j[pos]
    out[pos] = a0 * np.exp(special.gammaln(jp - r) - special.gammaln(1 - r) - special.gammaln(jp))
    return out


def _polylog_defect(p: dict, k: np.ndarray) -> np.ndarray:
    return p["C"] * np.log(k + math.e) ** p["b"] * (k + 1.0) ** (-p["a"])


def _polylog_tail(p: dict) -> TailData:
    C, a, b = p["C"], p["a"], p["b"]
    K = _PRODUCT_HORIZON
    k = np.arange(K, dtype=float)
    # sum_{i>=K} C (ln(i+e))^b (i+1)^-a <= C 2^(a-1) Gamma(b+1, (a-1) ln 2K) / (a-1)^(b+1)
    x = (a - 1) * math.log(2 * K)
    upper_gamma = special.gammaincc(b + 1, x) * special.gamma(b + 1)
    defect = C * 2 ** (a - 1) * upper_gamma / (a - 1) ** (b + 1)
    mid, br = _bracketed_product(1.0 - _polylog_defect(p, k), float(defect))
    return TailData(mid, br, lambda J: math.inf, exact=True, second_remainder=lambda J: math.inf)


def _validate_frac(p):
    _require(p["c"] > 0, "frac needs c > 0")


def _validate_powratio(p):
    _require(p["a"] > 0, "powratio needs a > 0")


def _validate_geomdefect(p):
    _require(0 < p["C"] < 1, "geomdefect needs C in (0, 1)")
    _require(0 < p["r"] < 1, "geomdefect needs r in (0, 1)")


def _validate_harmonic(p):
    _require(0 < p["r"] < 1, "harmonic needs r in (0, 1)")
    if p.get("alpha0") is None:
        p["alpha0"] = 1.0 - p["r"]
    _require(0 < p["alpha0"] < 1, "harmonic needs alpha0 in (0, 1)")
    _require(p["alpha0"] <= 1 - p["r"], "harmonic needs alpha0 <= 1 - r (monotone cdf)")


def _validate_polylog(p):
    _require(0 < p["C"] < 1, "polylog needs C in (0, 1)")
    _require(p["a"] > 1, "polylog needs a > 1")
    _require(0 <= p["b"] <= p["a"], "polylog needs 0 <= b <= a (monotone cdf)")


def _harmonic_alpha(p, k):
    with np.errstate(divide="ignore"):
        out = 1.0 - p["r"] / k
    return np.where(k == 0, p["alpha0"], out)


FAMILIES: dict[str, _FamilyRule] = {
    "frac": _FamilyRule(
        names=("c",),
        defaults={},
        validate=_validate_frac,
        alpha=lambda p, k: (k + 1.0) / (k + 1.0 + p["c"]),
        tail=_frac_tail,
        product=lambda p, j: _lgamma_ratio_product(p["c"], np.asarray(j, dtype=float)),
    ),
    "powratio": _FamilyRule(
        names=("a",),
        defaults={},
        validate=_validate_powratio,
        alpha=lambda p, k: ((k + 1.0) / (k + 2.0)) ** p["a"],
        tail=_powratio_tail,
        product=lambda p, j: (np.asarray(j, dtype=float) + 1.0) ** (-p["a"]),
    ),
    "geomdefect": _FamilyRule(
        names=("C", "r"),
        defaults={},
        validate=_validate_geomdefect,
        alpha=lambda p, k: 1.0 - p["C"] * p["r"] ** k,
        tail=_geomdefect_tail,
    ),
    "harmonic": _FamilyRule(
        names=("r", "alpha0"),
        defaults={"alpha0": None},
        validate=_validate_harmonic,
        alpha=_harmonic_alpha,
        tail=lambda p: TailData(0.0, (0.0, 0.0), lambda J: math.inf, exact=True,
                                second_remainder=lambda J: math.inf),
        product=_harmonic_product,
    ),
    # 1 - alpha_k = C (ln(k+e))^b (k+1)^-a: summable defect with polylog decay.
    "polylog": _FamilyRule(
        names=("C", "a", "b"),
        defaults={"b": 0.0},
        validate=_validate_polylog,
        alpha=lambda p, k: 1.0 - _polylog_defect(p, k),
        tail=_polylog_tail,
    ),
}


@dataclass(frozen=True, eq=True)
class Family(RadiusDistribution):
    family_id: str
    params: tuple[tuple[str, float], ...]
    _tail_cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    # the cached TailData holds closures; rebuild it after unpickling
    def __getstate__(self):
        return {"family_id": self.family_id, "params": self.params}

    def __setstate__(self, state):
        object.__setattr__(self, "family_id", state["family_id"])
        object.__setattr__(self, "params", state["params"])
        object.__setattr__(self, "_tail_cache", {})

    @property
    def p(self) -> dict:
        return dict(self.params)

    @property
    def rule(self) -> _FamilyRule:
        return FAMILIES[self.family_id]

    def alpha_array(self, n: int) -> np.ndarray:
        k = np.arange(n, dtype=float)
        return np.minimum(self.rule.alpha(self.p, k), 1.0)

    def alpha(self, k: int) -> float:
        if k < 0:
            return 0.0
        return float(min(self.rule.alpha(self.p, np.array([float(k)]))[0], 1.0))

    @property
    def tail(self) -> TailData:
        if "tail" not in self._tail_cache:
            self._tail_cache["tail"] = self.rule.tail(self.p)
        return self._tail_cache["tail"]

    def product_array(self, n: int) -> Optional[np.ndarray]:
        if self.rule.product is None:
            return None
        return self.rule.product(self.p, np.arange(n))

    def spec(self) -> str:
        return self.family_id + ":" + ",".join(f"{k}={_fmt_float(v)}" for k, v in self.params)


def make_family(family_id: str, **params) -> RadiusDistribution:
    """Build a parametric radius law.

    ``finite`` takes ``values=[...]``; the others take named real parameters
    (see ``FAMILIES``).
    """
    if family_id == "finite":
        return FinitePmf.from_values(params["values"])
    if family_id not in FAMILIES:
        raise DistributionError(f"unknown family {family_id!r}")
    rule = FAMILIES[family_id]
    unknown = set(params) - set(rule.names)
    if unknown:
        raise DistributionError(f"{family_id}: unknown parameters {sorted(unknown)}")
    p = dict(rule.defaults)
    p.update({k: float(v) for k, v in params.items()})
    missing = [n for n in rule.names if n not in p]
    if missing:
        raise DistributionError(f"{family_id}: missing parameters {missing}")
    rule.validate(p)
    dist = Family(family_id, tuple((n, float(p[n])) for n in rule.names))
    dist._check_alpha()
    return dist


# ---------------------------------------------------------------------------
# Transforms


@dataclass(frozen=True)
class CountLaw:
    """Law of the number of individuals at a site, supported on {1, 2, ...}."""

    kind: str
    params: tuple

    def __post_init__(self):
        k, p = self.kind, self.params
        if k == "geom1":
            _require(0 < p[0] <= 1, "geom1 needs p in (0, 1]")
        elif k == "fixed":
            _require(p[0] >= 1 and float(p[0]).is_integer(), "fixed needs an integer m >= 1")
        elif k == "poisson1":
            _require(p[0] >= 0, "poisson1 needs lam >= 0")
        elif k == "pmf":
            _require(len(p) >= 2, "pmf count law needs entries for l = 0, 1, ...")
            _require(all(x >= 0 for x in p), "count pmf entries must be nonnegative")
            _require(p[0] == 0, "count law must put no mass at 0")
            _require(abs(sum(p) - 1) <= 1e-12, "count pmf must sum to 1")
        else:
            raise DistributionError(f"unknown count law {k!r}")

    def pgf(self, s):
        """Probability generating function, vectorised over ``s`` in [0, 1]."""
        s = np.asarray(s, dtype=float)
        k, p = self.kind, self.params
        if k == "geom1":
            return p[0] * s / (1.0 - (1.0 - p[0]) * s)
        if k == "fixed":
            return s ** int(p[0])
        if k == "poisson1":
            return s * np.exp(p[0] * (s - 1.0))
        return np.polynomial.polynomial.polyval(s, np.asarray(p, dtype=float))

    def spec(self) -> str:
        k, p = self.kind, self.params
        if k == "geom1":
            return f"geom1:p={_fmt_float(p[0])}"
        if k == "fixed":
            return f"fixed:m={int(p[0])}"
        if k == "poisson1":
            return f"poisson1:lam={_fmt_float(p[0])}"
        return "pmf:" + ",".join(_fmt_float(x) for x in p)


@dataclass(frozen=True)
class SusceptibilitySeq:
    """Nonincreasing acceptance probabilities ``p_0, p_1, ...``.

    ``const`` is constant, ``recip`` is ``1/(k+1)``, ``geom`` is ``r**k`` and
    ``list`` repeats its last entry forever.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        k, p = self.kind, self.params
        if k == "const":
            _require(0 <= p[0] <= 1, "const susceptibility must lie in [0, 1]")
        elif k == "recip":
            _require(len(p) == 0, "recip takes no parameters")
        elif k == "geom":
            _require(0 < p[0] <= 1, "geom susceptibility needs r in (0, 1]")
        elif k == "list":
            _require(len(p) >= 1 and all(0 <= x <= 1 for x in p), "list entries must lie in [0, 1]")
            _require(all(a >= b for a, b in zip(p, p[1:])), "susceptibility sequence must be nonincreasing")
        else:
            raise DistributionError(f"unknown susceptibility sequence {k!r}")

    def values(self, n: int) -> np.ndarray:
        return self.at(np.arange(n))

    def at(self, k: np.ndarray) -> np.ndarray:
        """``p_k`` for an integer array ``k``."""
        kind, p = self.kind, self.params
        k = np.asarray(k)
        if kind == "const":
            return np.full(k.shape, float(p[0]))
        if kind == "recip":
            return 1.0 / (k + 1.0)
        if kind == "geom":
            return float(p[0]) ** k.astype(float)
        arr = np.asarray(p, dtype=float)
        return arr[np.minimum(k, len(arr) - 1)]

    @property
    def first_zero(self) -> Optional[int]:
        if self.kind == "const" and self.params[0] == 0:
            return 0
        if self.kind == "list" and self.params[-1] == 0:
            return self.params.index(0)
        return None

    def spec(self) -> str:
        if self.kind == "recip":
            return "recip"
        if self.kind == "geom":
            return f"geom:r={_fmt_float(self.params[0])}"
        return self.kind + ":" + ",".join(_fmt_float(x) for x in self.params)


@dataclass(frozen=True)
class Transformed(RadiusDistribution):
    """A base law pushed through the sparse, pgf or susceptibility map."""

    base: RadiusDistribution
    transform: str
    arg: object

    def _map(self, b: np.ndarray, k: np.ndarray) -> np.ndarray:
        if self.transform == "sparse":
            out = b if self.arg == 1.0 else 1.0 - self.arg * (1.0 - b)
        elif self.transform == "pgf":
            out = self.arg.pgf(b)
        else:
            p = self.arg.at(k)
            # p_k = 1 leaves alpha_k untouched bit for bit
            out = np.where(p == 1.0, b, 1.0 - p * (1.0 - b))
        out = np.where(b == 1.0, 1.0, out)
        return np.minimum(out, 1.0)

    def alpha_array(self, n: int) -> np.ndarray:
        return self._map(self.base.alpha_array(n), np.arange(n))

    def alpha(self, k: int) -> float:
        if k < 0:
            return 0.0
        return float(self._map(np.array([self.base.alpha(k)]), np.array([k]))[0])

    @property
    def support_max(self) -> Optional[int]:
        k = self.base.support_max
        if self.transform == "suscept" and self.arg.first_zero is not None:
            z = self.arg.first_zero
            k = z if k is None else min(k, z)
        return k

    @property
    def tail(self) -> Optional[TailData]:
        if self.support_max is not None:
            return _finite_support_tail(self)
        return None

    def spec(self) -> str:
        if self.transform == "sparse":
            return f"sparse(eps={_fmt_float(self.arg)};{self.base.spec()})"
        return f"{self.transform}({self.arg.spec()};{self.base.spec()})"


def transform_sparse(base: RadiusDistribution, eps: float) -> Transformed:
    """Sites are occupied independently with probability ``eps``."""
    if not (0 < eps <= 1):
        raise DistributionError("eps must lie in (0, 1]; eps = 0 makes alpha_0 = 1")
    d = Transformed(base, "sparse", float(eps))
    d._check_alpha()
    return d


def transform_pgf(base: RadiusDistribution, count_law: CountLaw) -> Transformed:
    """Each site holds ``X`` individuals; the site radius is their maximum."""
    d = Transformed(base, "pgf", count_law)
    d._check_alpha()
    return d


def transform_susceptible(base: RadiusDistribution, p_seq: SusceptibilitySeq) -> Transformed:
    """Effective radius ``min(R, L)`` with ``P(L <= k) = 1 - p_k``."""
    d = Transformed(base, "suscept", p_seq)
    d._check_alpha()
    return d


# ---------------------------------------------------------------------------
# Functional API


def alpha(dist: RadiusDistribution, k: int) -> float:
    return dist.alpha(k)


def pmf(dist: RadiusDistribution, k: int) -> float:
    return dist.pmf(k)


def tail_remainder_bound(dist: RadiusDistribution, J: int) -> float:
    """Upper bound on ``sum_{j>=J} prod_{i<j} alpha_i`` (``inf`` if divergent)."""
    if J < 1:
        raise ValueError("J must be >= 1")
    tail = dist.tail
    if tail is None:
        raise TailDataUnavailable(f"no analytic tail data for {dist.spec()}")
    return tail.remainder(J)


def running_products(dist: RadiusDistribution, n: int) -> np.ndarray:
    """``P_0, ..., P_n`` with ``P_j = prod_{i<j} alpha_i``, built multiplicatively."""
    a = dist.alpha_array(n)
    out = np.empty(n + 1)
    out[0] = 1.0
    np.cumprod(a, out=out[1:])
    return out


# ---------------------------------------------------------------------------
# number formatting shared with the grammar


def _fmt_float(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_fraction(v: Fraction) -> str:
    d = v.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{v.numerator}/{v.denominator}"
    # terminating decimal: render exactly
    digits = 0
    while (v * 10**digits).denominator != 1:
        digits += 1
    if digits == 0:
        return str(v.numerator)
    s = str(int(v * 10**digits)).rjust(digits + 1, "0")
    return s[:-digits] + "." + s[-digits:]
