"""Convergence of the renewal sequence u_n to 1/mu across the catalog.

Writes one CSV per distribution with columns n,u_n,mu_inv,abs_gap on a
log-spaced grid, and prints the gap at the largest n.

    python3 scripts/renewal_convergence.py --n 10000 --out results/convergence
"""

from __future__ import annotations

import argparse
import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rumor_renewal.grammar import parse_dist
from rumor_renewal.renewal_core import mu_sigma, renewal_sequence_from_dist


@dataclass(frozen=True)
class ConvergenceConfig:
    n: int = 10_000
    points: int = 60
    dists: tuple = ("frac:c=2", "frac:c=3", "powratio:a=4", "powratio:a=2", "frac:c=1",
                    "harmonic:r=0.3", "geomdefect:C=0.5,r=0.5", "finite:0.5,0.3,0.2")


def _slug(spec: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in spec).strip("_")


def run(cfg: ConvergenceConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    grid = np.unique(np.geomspace(1, cfg.n, cfg.points).astype(int))
    for spec in cfg.dists:
        d = parse_dist(spec)
        st = mu_sigma(d)
        target = 0.0 if math.isinf(st.mu) else 1.0 / st.mu
        u = np.asarray(renewal_sequence_from_dist(d, cfg.n).u)
        with open(out / f"{_slug(spec)}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "u_n", "mu_inv", "abs_gap"])
            for k in grid:
                w.writerow([int(k), f"{u[k]:.17g}", f"{target:.17g}", f"{abs(u[k] - target):.17g}"])
        print(f"{spec:<26} {st.recurrence_class:<19} 1/mu={target:.6f} |u_n - 1/mu| at n={cfg.n}: "
              f"{abs(u[cfg.n] - target):.3e}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=ConvergenceConfig.n)
    ap.add_argument("--out", default="results/convergence")
    args = ap.parse_args()
    run(ConvergenceConfig(n=args.n), Path(args.out))


if __name__ == "__main__":
    main()
