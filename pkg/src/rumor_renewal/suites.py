"""Named verification suites shared by the CLI, the scripts and the tests.

Each suite returns a list of ``Verdict``. Oracle checks compare exact values
(``statistic`` is the absolute difference, ``pvalue`` is ``None``);
statistical checks carry the test statistic and p-value. Negative controls
are reported as verdicts that pass when the control is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dist_catalog import Family, RadiusDistribution
from .firework import coupling_violations_batch, h_chains_batch
from .montecarlo import (
    FpReach,
    RfpFirstBlock,
    RfpSites,
    RfpTotal,
    block_stream,
    clt_experiment,
    estimate,
    gof_discrete,
    gof_geometric,
    run_trials,
)
from .oracle import enumerate_fp_tail, enumerate_rfp_block, enumerate_site_informed
from .renewal_core import (
    HARMONIC_VERDICT_LIMIT,
    inter_arrival,
    mu_sigma,
    renewal_sequence,
    renewal_sequence_from_dist,
    tail_bound,
    verify_bound,
)
from .reverse_firework import DIES, rfp_spreader_law

__all__ = ["Verdict", "SUITES", "run_suite", "all_passed", "bound_variant_for", "bound_sweep"]


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    statistic: float = 0.0
    pvalue: Optional[float] = None
    detail: str = ""
    informational: bool = False

    def line(self) -> str:
        tag = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        p = "" if self.pvalue is None else f" pvalue={self.pvalue:.6g}"
        return f"{tag} {self.name} statistic={self.statistic:.6g}{p} {self.detail}".rstrip()


def _exact_u(dist: RadiusDistribution, n: int):
    exact = dist.exact_pmf() is not None
    return renewal_sequence(inter_arrival(dist, max(n, 1), exact=exact), n), exact


def _cmp(name: str, n: int, oracle, analytic, exact: bool) -> Verdict:
    a = analytic
    diff = abs(float(oracle.value) - float(a))
    ok = (oracle.value == a) if exact else diff <= 1e-12
    return Verdict(name, ok, diff, None, f"n={n} exact={oracle} analytic={a}")


def suite_lemma1(dist: RadiusDistribution, n: int = 8, **_) -> list[Verdict]:
    """Enumerated ``P(M > m)`` against ``u_{m+1}`` for ``m = 0..n``."""
    u, exact = _exact_u(dist, n + 1)
    return [_cmp("lemma1", m, enumerate_fp_tail(dist, m), u[m + 1], exact) for m in range(n + 1)]


def suite_lemma2(dist: RadiusDistribution, n: int = 8, reps: int = 100_000, seed: int = 42,
                 workers: int = 1, **_) -> list[Verdict]:
    """Enumerated block law against ``q_k``, then a chi-square on simulated blocks."""
    exact = dist.exact_pmf() is not None
    kmax = min(n, 12)
    law = inter_arrival(dist, max(kmax, 1), exact=exact)
    out = []
    if dist.support_max is not None:
        out += [_cmp("lemma2-block", k, enumerate_rfp_block(dist, k), law.q[k], exact)
                for k in range(1, kmax + 1)]
    horizon = max(n, 1)
    blocks = run_trials(RfpFirstBlock(dist, horizon), reps, seed, workers)
    q = inter_arrival(dist, horizon)
    probs = np.concatenate([[1.0 - float(np.sum(q.q[1:]))], q.q[1:]])
    rep = gof_discrete(blocks, probs, name="lemma2-gaps")
    out.append(Verdict(rep.name, rep.passed, rep.statistic, rep.pvalue,
                       f"blocks={reps} horizon={horizon} dof={rep.dof}"))
    return out


def suite_crossmodel(dist: RadiusDistribution, n: int = 20, reps: int = 100_000, seed: int = 42,
                     workers: int = 1, oracle_n: int = 8, **_) -> list[Verdict]:
    """Reach probability of site n in both processes against ``u_n``."""
    out = []
    u, exact = _exact_u(dist, max(n, oracle_n))
    if dist.support_max is not None:
        for m in range(1, min(oracle_n, n) + 1):
            fp = enumerate_site_informed(dist, m, "FP")
            rfp = enumerate_site_informed(dist, m, "RFP")
            ok = fp.value == rfp.value == u[m] if exact else abs(float(fp) - float(rfp)) < 1e-12
            out.append(Verdict("crossmodel-oracle", ok, abs(float(fp) - float(u[m])), None,
                               f"n={m} fp={fp} rfp={rfp} u={u[m]}"))
    fp_est = estimate(FpReach(dist, n), reps, seed, workers)
    rfp_est = estimate(RfpSites(dist, n), reps, seed + 1, workers)
    for m in range(1, n + 1):
        target = float(u[m])
        for label, est in (("fp", fp_est[m - 1]), ("rfp", rfp_est[m - 1])):
            se = est.stderr
            if se == 0:
                # no spread in the sample (p_hat 0 or 1): use the stderr under the model
                se = math.sqrt(target * (1 - target) / est.reps)
            z = abs(est.p_hat - target) / se if se > 0 else (0.0 if est.p_hat == target else math.inf)
            out.append(Verdict(f"crossmodel-{label}", z <= 3.0, z, None,
                               f"n={m} p_hat={est.p_hat:.6g} stderr={se:.2e} u={target:.6g}"))
    return out


def suite_geometric(dist: RadiusDistribution, reps: int = 100_000, seed: int = 42,
                    workers: int = 1, **_) -> list[Verdict]:
    law = rfp_spreader_law(dist)
    if law.regime != DIES:
        return [Verdict("geometric", False, detail=f"{dist.spec()} survives; N is infinite")]
    r = law.geom_param
    N = run_trials(RfpTotal(dist), max(reps, 10_000), seed, workers)
    if np.any(N < 0):
        return [Verdict("geometric", False, detail="some runs hit the site cap")]
    rep = gof_geometric(N, r)
    r_bad = r + 0.2 if r <= 0.7 else r - 0.2
    ctrl = gof_geometric(N, r_bad)
    return [
        Verdict("geometric", rep.passed, rep.statistic, rep.pvalue, f"r={r:.12g} samples={len(N)}"),
        Verdict("geometric-negative-control", not ctrl.passed, ctrl.statistic, ctrl.pvalue,
                f"wrong r={r_bad:.12g} must be rejected"),
    ]


def suite_clt(dist: RadiusDistribution, n: int = 10_000, reps: int = 2000, seed: int = 42,
              workers: int = 1, **_) -> list[Verdict]:
    rep, z = clt_experiment(dist, n, reps, seed, workers)
    mu = mu_sigma(dist).mu
    wrong = mu * 1.02
    ctrl, _ = clt_experiment(dist, n, reps, seed, workers, mu=wrong)
    return [
        Verdict("clt", rep.passed, rep.statistic, rep.pvalue, f"n={n} reps={reps}"),
        Verdict("clt-negative-control", not ctrl.passed, ctrl.statistic, ctrl.pvalue,
                f"wrong mu={wrong:.6g} must be rejected"),
    ]


def suite_hchain(dist: RadiusDistribution, n: int = 30, reps: int = 10_000, seed: int = 42,
                 batch: int = 500, **_) -> list[Verdict]:
    """Coupling properties on shared tables, and a desynchronised control."""
    T = min(n, 30) + 1
    shared_bad = ctrl_bad = 0
    first = None
    done = b = 0
    while done < reps:
        c = min(batch, reps - done)
        rng = block_stream(seed, b)
        U = rng.random((c, T))
        k, f = coupling_violations_batch(h_chains_batch(dist, U))
        shared_bad += k
        first = first or f
        # every chain gets its own table
        H = np.stack([h_chains_batch(dist, rng.random((c, T)))[:, m, :] for m in range(T)], axis=1)
        ctrl_bad += coupling_violations_batch(H)[0]
        done += c
        b += 1
    return [
        Verdict("hchain-coupling", shared_bad == 0, shared_bad, None,
                f"trials={reps} chains={T} first_violation={first}"),
        Verdict("hchain-negative-control", ctrl_bad > 0, ctrl_bad, None,
                "desynchronised tables must violate the coupling"),
    ]


def bound_variant_for(dist: RadiusDistribution) -> tuple[str, dict]:
    """The tail-bound variant whose hypothesis the family satisfies."""
    if isinstance(dist, Family):
        p = dist.p
        if dist.family_id == "geomdefect":
            r = p["r"]
            C = p["C"]
            if C >= math.log(1 / r):
                raise ValueError("geomdefect needs C < ln(1/r) for the exponential bound")
            return "exp", {"r": r, "C_r": C}
        if dist.family_id == "polylog":
            return "polylog", {"alpha": p["a"], "beta": p["b"]}
        if dist.family_id == "harmonic":
            return "harmonic", {"r": p["r"]}
        if dist.family_id == "powratio" and 0.5 < p["a"] < 1:
            return "regvar", {"alpha": p["a"]}
    raise ValueError(f"no explicit tail bound applies to {dist.spec()}")


def bound_sweep(dist: RadiusDistribution, n: int, variant: Optional[str] = None,
                params: Optional[dict] = None):
    """``(k, u_k, bound_k)`` arrays for ``k = 0..n`` (bound is nan where undefined)."""
    if variant is None:
        variant, params = bound_variant_for(dist)
    u = np.asarray(renewal_sequence_from_dist(dist, n).u, dtype=float)
    k = np.arange(n + 1)
    kmin = 0 if variant == "exp" else (1 if variant == "regvar" else 2)
    b = np.full(n + 1, np.nan)
    b[kmin:] = tail_bound(variant, params, k[kmin:])
    return k, u, b, variant, params, kmin


def suite_bounds(dist: RadiusDistribution, n: int = 10_000, variant: Optional[str] = None,
                 params: Optional[dict] = None, **_) -> list[Verdict]:
    k, u, b, variant, params, kmin = bound_sweep(dist, n, variant, params)
    rep = verify_bound(u, b, max(kmin, 1))
    if variant == "exp":
        ok = bool(np.all(u <= b))
        return [Verdict("bound-exp", ok, rep.max_ratio, None,
                        f"max u_k/bound_k={rep.max_ratio:.6g} at k={rep.arg_max}, k<={n}")]
    info = variant == "harmonic" and params["r"] >= HARMONIC_VERDICT_LIMIT
    detail = (f"max ratio={rep.max_ratio:.6g} at k={rep.arg_max}; "
              f"last decade nonincreasing={rep.last_decade_nonincreasing}; C_est={rep.constant_estimate:.6g}")
    if info:
        detail += "; shape only (exponent 2-(1+r)^2 <= 0)"
    return [Verdict(f"bound-{variant}", rep.passed, rep.max_ratio, None, detail, informational=info)]


SUITES: dict[str, Callable[..., list[Verdict]]] = {
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "crossmodel": suite_crossmodel,
    "geometric": suite_geometric,
    "clt": suite_clt,
    "hchain": suite_hchain,
    "bounds": suite_bounds,
}


def run_suite(name: str, dist: RadiusDistribution, **kw) -> list[Verdict]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](dist, **kw)


def all_passed(verdicts: list[Verdict]) -> bool:
    return all(v.passed or v.informational for v in verdicts)

