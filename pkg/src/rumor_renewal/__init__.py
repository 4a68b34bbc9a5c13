"""Exact and simulated quantities for firework-type rumor processes on the integers >= 0."""

from .dist_catalog import (
    CountLaw,
    DistributionError,
    FinitePmf,
    RadiusDistribution,
    SusceptibilitySeq,
    TailDataUnavailable,
    alpha,
    make_family,
    pmf,
    tail_remainder_bound,
    transform_pgf,
    transform_sparse,
    transform_susceptible,
)
from .grammar import format_dist, parse_dist
from .renewal_core import (
    classify,
    inter_arrival,
    mu_sigma,
    renewal_sequence,
    survival_probability,
    tail_bound,
    verify_bound,
)

__version__ = "0.1.0"
