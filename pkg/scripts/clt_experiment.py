"""Law of large numbers and central limit experiment for the spreader count N(n).

For a law with finite certified variance the standardised counts are
KS-tested against N(0, 1) and written as rep,z_value. For every law the
running density N(m)/m of one long path is written as n,N_n,ratio.

    python3 scripts/clt_experiment.py --dist powratio:a=4 --n 10000 --reps 2000
    python3 scripts/clt_experiment.py --dist frac:c=2 --n 1000000 --reps 0
"""

from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rumor_renewal.grammar import parse_dist
from rumor_renewal.montecarlo import block_stream, clt_experiment
from rumor_renewal.reverse_firework import lln_clt_params, simulate_rfp


@dataclass(frozen=True)
class CltConfig:
    dist: str = "powratio:a=4"
    n: int = 10_000
    reps: int = 2000
    seed: int = 42
    workers: int = 1
    path_points: int = 200


def run(cfg: CltConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    d = parse_dist(cfg.dist)
    limit, var = lln_clt_params(d)
    print(f"{cfg.dist}: N(n)/n -> {limit:.9f}; CLT variance {var if var is None else f'{var:.9g}'}")

    bits = simulate_rfp(d, cfg.n, block_stream(cfg.seed, 1 << 30)).bits
    cum = np.cumsum(bits[1:], dtype=np.int64)
    grid = np.unique(np.geomspace(1, cfg.n, cfg.path_points).astype(int))
    with open(out / "lln_path.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "N_n", "ratio"])
        for m in grid:
            w.writerow([int(m), int(cum[m - 1]), f"{cum[m - 1] / m:.17g}"])
    print(f"one path: N({cfg.n})/{cfg.n} = {cum[-1] / cfg.n:.6f}")

    if var is None or cfg.reps == 0:
        print("CLT skipped (variance undefined or reps=0)")
        return
    rep, z = clt_experiment(d, cfg.n, cfg.reps, cfg.seed, cfg.workers)
    with open(out / "clt_z.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rep", "z_value"])
        w.writerows((i, f"{x:.17g}") for i, x in enumerate(z))
    print(f"KS vs N(0,1): D={rep.statistic:.4f} p={rep.pvalue:.4f} -> {'PASS' if rep.passed else 'FAIL'}; "
          f"mean z={z.mean():+.4f}, var z={z.var(ddof=1):.4f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    for f in CltConfig.__dataclass_fields__.values():
        ap.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    ap.add_argument("--out", default="results/clt")
    args = vars(ap.parse_args())
    out = Path(args.pop("out"))
    run(CltConfig(**args), out)


if __name__ == "__main__":
    main()
