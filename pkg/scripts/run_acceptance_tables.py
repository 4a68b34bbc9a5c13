"""Run every verification suite on its reference distribution and write the verdict tables.

    python3 scripts/run_acceptance_tables.py --out results/ --seed 42
"""

from __future__ import annotations

import argparse
import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

from rumor_renewal.grammar import parse_dist
from rumor_renewal.suites import all_passed, run_suite


@dataclass(frozen=True)
class SuiteRun:
    suite: str
    dist: str
    kwargs: dict = field(default_factory=dict)


DEFAULT_RUNS = (
    SuiteRun("lemma1", "finite:0.5,0.3,0.2", {"n": 8}),
    SuiteRun("lemma1", "finite:0.9,0.1", {"n": 8}),
    SuiteRun("lemma1", "finite:0.4,0.1,0.1,0.4", {"n": 8}),
    SuiteRun("lemma2", "finite:0.5,0.3,0.2", {"n": 8, "reps": 1_000_000}),
    SuiteRun("lemma2", "frac:c=2", {"n": 200, "reps": 1_000_000}),
    SuiteRun("crossmodel", "finite:0.5,0.3,0.2", {"n": 20, "reps": 1_000_000, "oracle_n": 8}),
    SuiteRun("geometric", "finite:0.5,0.3,0.2", {"reps": 100_000}),
    SuiteRun("geometric", "geomdefect:C=0.5,r=0.5", {"reps": 100_000}),
    SuiteRun("clt", "powratio:a=4", {"n": 10_000, "reps": 2000}),
    SuiteRun("hchain", "frac:c=2", {"n": 30, "reps": 10_000}),
    SuiteRun("bounds", "geomdefect:C=0.5,r=0.5", {"n": 2000}),
    SuiteRun("bounds", "polylog:C=0.5,a=2,b=1", {"n": 10_000}),
    SuiteRun("bounds", "harmonic:r=0.3", {"n": 10_000}),
    SuiteRun("bounds", "powratio:a=0.75", {"n": 10_000}),
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows, ok_all = [], True
    for i, r in enumerate(DEFAULT_RUNS):
        kw = dict(r.kwargs)
        if r.suite not in ("lemma1", "bounds"):
            kw.update(seed=args.seed, workers=args.workers)
        t0 = time.perf_counter()
        verdicts = run_suite(r.suite, parse_dist(r.dist), **kw)
        secs = time.perf_counter() - t0
        ok = all_passed(verdicts)
        ok_all &= ok
        print(f"{'PASS' if ok else 'FAIL'} {r.suite:<10} {r.dist:<28} {len(verdicts):3d} verdicts {secs:6.1f}s")
        for v in verdicts:
            rows.append((i, r.suite, r.dist, v.name, f"{v.statistic:.17g}",
                         "" if v.pvalue is None else f"{v.pvalue:.17g}",
                         "INFO" if v.informational else str(v.passed).upper(), v.detail))
    with open(out / "verdicts.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", "suite", "dist", "name", "statistic", "pvalue", "pass", "detail"])
        w.writerows(rows)
    print(f"wrote {out / 'verdicts.csv'}")
    return 0 if ok_all else 1


if __name__ == "__main__":
    raise SystemExit(main())
