"""Command line front end.

    rumor-renewal exact   --dist frac:c=2 --n 100 --tol 1e-9 [--out table.csv]
    rumor-renewal fp-sim  --dist finite:0.5,0.3,0.2 --n 20 --reps 100000 [--out tail.csv] [--trial-log log.csv]
    rumor-renewal rfp-sim --dist frac:c=2 --n 100000 --reps 100 [--out path.csv]
    rumor-renewal verify  --suite lemma1 --dist finite:0.5,0.3,0.2 --n 8 [--out verdicts.csv]
    rumor-renewal bounds  --dist geomdefect:C=0.5,r=0.5 --n 2000 [--variant exp --params r=0.5,C_r=0.5]

Exit status: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dist_catalog import DistributionError, TailDataUnavailable
from .firework import ALIVE, DIED, fp_range_batch
from .grammar import format_dist, parse_dist
from .montecarlo import BLOCK_SIZE, Estimate, RfpCount, block_stream, run_trials
from .oracle import EnumerationTooLarge
from .renewal_core import inter_arrival, mu_sigma, renewal_sequence
from .reverse_firework import lln_clt_params, rfp_spreader_law, simulate_rfp
from .suites import SUITES, all_passed, bound_sweep, run_suite

DEFAULTS = {"n": 1000, "reps": 100_000, "tol": 1e-9, "seed": 42, "workers": 1}

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _g(x) -> str:
    """17 significant digits, the CSV number format."""
    if x is None:
        return ""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _write_csv(path: Optional[str], header: Sequence[str], rows) -> None:
    if path is None:
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


class _UsageError(Exception):
    pass


def _positive(kind):
    def conv(text):
        try:
            v = kind(float(text)) if kind is int else kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def _params(text: str) -> dict:
    out = {}
    for part in filter(None, text.split(",")):
        k, _, v = part.partition("=")
        out[k.strip()] = float(v)
    return out


def _read_config(path: str) -> dict:
    """``key=value`` lines; ``#`` starts a comment. Keys mirror the long flags."""
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"bad config line {line!r}")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rumor-renewal", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sim=False):
        sp.add_argument("--dist", help="distribution spec, e.g. finite:0.5,0.3,0.2 or frac:c=2")
        sp.add_argument("--n", type=_positive(int), help=f"horizon (default {DEFAULTS['n']})")
        sp.add_argument("--tol", type=_positive(float), help=f"series tolerance (default {DEFAULTS['tol']})")
        sp.add_argument("--out", help="CSV output path")
        sp.add_argument("--config", help="optional key=value file mirroring the flags")
        if sim:
            sp.add_argument("--reps", type=_positive(int), help=f"replicates (default {DEFAULTS['reps']})")
            sp.add_argument("--seed", type=int, help=f"master seed (default {DEFAULTS['seed']})")
            sp.add_argument("--workers", type=_positive(int), help="worker processes; results do not depend on it")

    sp = sub.add_parser("exact", help="inter-arrival law, renewal sequence, mu, sigma^2, survival")
    common(sp)
    sp = sub.add_parser("fp-sim", help="simulate the firework process")
    common(sp, sim=True)
    sp.add_argument("--trial-log", help="per-trial CSV: trial,seed_index,status,M")
    sp = sub.add_parser("rfp-sim", help="simulate the reverse firework process")
    common(sp, sim=True)
    sp.add_argument("--every", type=_positive(int), help="path summary stride (default n/1000)")
    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp, sim=True)
    sp.add_argument("--suite", choices=sorted(SUITES), help="suite name")
    sp.add_argument("--z-out", help="clt suite: CSV rep,z_value")
    sp = sub.add_parser("bounds", help="u_k against an explicit tail bound")
    common(sp)
    sp.add_argument("--variant", choices=["exp", "polylog", "harmonic", "regvar"])
    sp.add_argument("--params", type=_params, help="bound parameters, e.g. r=0.5,C_r=0.5")
    return p


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        conf = _read_config(args.config)
        for key, raw in conf.items():
            if not hasattr(args, key):
                raise _UsageError(f"unknown config key {key!r}")
            if getattr(args, key) is None:
                if key in ("n", "reps", "seed", "workers"):
                    val = int(raw)
                elif key == "tol":
                    val = float(raw)
                elif key == "params":
                    val = _params(raw)
                else:
                    val = raw
                setattr(args, key, val)
    args.given = {k for k in DEFAULTS if getattr(args, k, None) is not None}
    for key, val in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, val)
    for key in ("n", "reps", "tol", "workers"):
        if hasattr(args, key) and getattr(args, key) <= 0:
            raise _UsageError(f"--{key} must be positive")
    if not getattr(args, "dist", None):
        raise _UsageError("--dist is required")
    args.distribution = parse_dist(args.dist)
    return args


# ---------------------------------------------------------------------------
# commands


def cmd_exact(args) -> int:
    d = args.distribution
    n = args.n
    st = mu_sigma(d, args.tol)
    law = inter_arrival(d, n)
    u = renewal_sequence(law, n).u
    mu_inv = 0.0 if math.isinf(st.mu) else 1.0 / st.mu
    print(f"dist            {format_dist(d)}")
    qs = ", ".join(f"{x:.6g}" for x in law.q[1:min(n, 10) + 1])
    print(f"q_1..           {qs}{' ...' if n > 10 else ''}")
    if law.q_inf is not None:
        print(f"q_inf           {law.q_inf:.17g}")
    else:
        lo, hi = law.q_inf_bounds
        print(f"q_inf           in [{lo:.6g}, {hi:.6g}] (no tail data)")
    print(f"u_{n:<13d} {u[n]:.17g}")
    print(f"mu              {st.mu:.17g}")
    print(f"sigma2          {'undefined' if st.sigma2 is None else format(st.sigma2, '.17g')}")
    print(f"class           {st.recurrence_class or 'unknown (no tail data)'}")
    cert = "certified" if st.certified else "uncertified, horizon-limited"
    print(f"P(survival)     {st.survival_prob:.17g} ({cert}, error <= {st.error_bound:.3g})")
    rows = ((k, _g(law.q[k]), _g(u[k]), _g(mu_inv), _g(abs(u[k] - mu_inv))) for k in range(n + 1))
    _write_csv(args.out, ["n", "q_n", "u_n", "mu_inv", "abs_gap"], rows)
    return EXIT_OK


class _FpRange:
    def __init__(self, dist, horizon):
        self.dist, self.horizon = dist, horizon

    def __call__(self, rng, count):
        return fp_range_batch(self.dist, rng.random((count, self.horizon)))


def cmd_fp_sim(args) -> int:
    d, n, reps = args.distribution, args.n, args.reps
    M = run_trials(_FpRange(d, n), reps, args.seed, args.workers)
    u = renewal_sequence(inter_arrival(d, n), n).u
    rows = []
    for m in range(n):
        est = Estimate.bernoulli(int(np.sum((M < 0) | (M > m))), reps)
        rows.append((m, _g(u[m + 1]), _g(est.p_hat), _g(est.stderr)))
    alive = int(np.sum(M < 0))
    surv = mu_sigma(d, args.tol).survival_prob
    print(f"dist {format_dist(d)} reps={reps} seed={args.seed} horizon={n}")
    for m in sorted({0, 1, 2, min(5, n - 1), n - 1}):
        r = rows[m]
        print(f"P(M>{m}) exact={float(r[1]):.6f} hat={float(r[2]):.6f} +- {1.96 * float(r[3]):.6f}")
    est = Estimate.bernoulli(alive, reps)
    print(f"alive at horizon: {est.p_hat:.6f} (95% CI {est.ci95[0]:.6f}..{est.ci95[1]:.6f}); "
          f"P(survival)={surv:.6f}, censoring bias u_{n}-1/mu={u[n] - surv:.3g}")
    _write_csv(args.out, ["n", "P_exact", "P_hat", "stderr"], rows)
    if args.trial_log:
        log = ((t, t // BLOCK_SIZE, ALIVE if M[t] < 0 else DIED, "" if M[t] < 0 else int(M[t]))
               for t in range(reps))
        _write_csv(args.trial_log, ["trial", "seed_index", "status", "M"], log)
    return EXIT_OK


def cmd_rfp_sim(args) -> int:
    d, n, reps = args.distribution, args.n, args.reps
    limit, clt_var = lln_clt_params(d, args.tol)
    counts = run_trials(RfpCount(d, n), reps, args.seed, args.workers)
    ratio = counts / n
    est = Estimate.mean(ratio) if reps > 1 else None
    print(f"dist {format_dist(d)} n={n} reps={reps} seed={args.seed}")
    print(f"limit N(n)/n = {limit:.17g}; CLT variance = {'undefined' if clt_var is None else f'{clt_var:.17g}'}")
    if est is not None:
        print(f"mean N(n)/n = {est.p_hat:.6f} (95% CI {est.ci95[0]:.6f}..{est.ci95[1]:.6f})")
    try:
        law = rfp_spreader_law(d)
        print(f"N regime: {law.regime}" + (f", Geom({law.geom_param:.12g}), E[N]={law.mean:.6g}"
                                             if law.geom_param else ""))
    except TailDataUnavailable:
        print("N regime: unknown (no tail data)")
    if args.out:
        # one summary path from the first trial stream after the replicate blocks
        path = simulate_rfp(d, n, block_stream(args.seed, 1 << 30))
        every = args.every or max(1, n // 1000)
        cum = np.cumsum(path.bits[1:], dtype=np.int64)
        idx = list(range(every, n + 1, every))
        if idx[-1:] != [n]:
            idx.append(n)
        _write_csv(args.out, ["n", "N_n", "ratio"], ((i, int(cum[i - 1]), _g(cum[i - 1] / i)) for i in idx))
    return EXIT_OK


def cmd_verify(args) -> int:
    if not args.suite:
        raise _UsageError("--suite is required")
    # suites keep their own horizon and replicate defaults unless overridden
    kw = {k: getattr(args, k) for k in ("n", "reps") if k in args.given}
    kw.update(seed=args.seed, workers=args.workers)
    verdicts = run_suite(args.suite, args.distribution, **kw)
    for v in verdicts:
        print(v.line())
    _write_csv(args.out, ["name", "statistic", "pvalue", "pass", "detail"],
               ((v.name, _g(v.statistic), _g(v.pvalue), "INFO" if v.informational else str(v.passed).upper(), v.detail)
                for v in verdicts))
    if args.suite == "clt" and args.z_out:
        from .montecarlo import clt_experiment
        n = args.n if "n" in args.given else 10_000
        reps = args.reps if "reps" in args.given else 2000
        _, z = clt_experiment(args.distribution, n, reps, args.seed, args.workers)
        _write_csv(args.z_out, ["rep", "z_value"], ((i, _g(x)) for i, x in enumerate(z)))
    ok = all_passed(verdicts)
    print(("PASS" if ok else "FAIL") + f" suite {args.suite}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bounds(args) -> int:
    from .renewal_core import verify_bound

    k, u, b, variant, params, kmin = bound_sweep(args.distribution, args.n, args.variant, args.params)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = u / b
    rep = verify_bound(u, b, max(kmin, 1))
    print(f"dist {format_dist(args.distribution)} variant={variant} params={params}")
    print(f"max u_k/bound_k = {rep.max_ratio:.6g} at k={rep.arg_max}; "
          f"last decade nonincreasing: {rep.last_decade_nonincreasing}")
    _write_csv(args.out, ["k", "u_k", "bound_k", "ratio"],
               ((int(i), _g(u[i]), _g(None if np.isnan(b[i]) else b[i]),
                 _g(None if np.isnan(ratio[i]) else ratio[i])) for i in k))
    return EXIT_OK


COMMANDS = {"exact": cmd_exact, "fp-sim": cmd_fp_sim, "rfp-sim": cmd_rfp_sim,
            "verify": cmd_verify, "bounds": cmd_bounds}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        args = _resolve(args)
        return COMMANDS[args.command](args)
    except (_UsageError, DistributionError, EnumerationTooLarge, TailDataUnavailable, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
