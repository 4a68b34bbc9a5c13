import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rumor_renewal.dist_catalog import make_family
from rumor_renewal.grammar import parse_dist
from rumor_renewal.montecarlo import (
    BLOCK_SIZE,
    Estimate,
    FpReach,
    FpTailEvent,
    GofReport,
    RfpCount,
    RfpSites,
    clt_experiment,
    estimate,
    gof_discrete,
    gof_geometric,
    gof_two_sample,
    ks_standard_normal,
    run_trials,
)
from rumor_renewal.renewal_core import renewal_sequence_from_dist


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 1000), st.integers(1, 1000))
def test_estimate_bernoulli_invariants(k, n):
    k = min(k, n)
    e = Estimate.bernoulli(k, n)
    assert e.stderr == pytest.approx(math.sqrt(e.p_hat * (1 - e.p_hat) / n))
    assert e.ci95 == pytest.approx((e.p_hat - 1.96 * e.stderr, e.p_hat + 1.96 * e.stderr))


def test_gof_report_verdict():
    assert GofReport("x", 1.0, 0.02, 1, 10).passed
    assert not GofReport("x", 1.0, 0.01, 1, 10).passed


def test_estimate_requires_100_reps(d532):
    with pytest.raises(ValueError):
        estimate(FpTailEvent(d532, 2), 99, 1)


def test_fp_tail_event_estimate(d532):
    e = estimate(FpTailEvent(d532, 2), 1_000_000, 42)
    assert e.within(0.225)


def test_rfp_site_estimate(d532):
    e = estimate(RfpSites(d532, 5), 1_000_000, 42)
    u = renewal_sequence_from_dist(d532, 5).u
    assert e[4].within(u[5])


def test_same_seed_same_result(d532):
    a = estimate(FpTailEvent(d532, 2), 1_000_000, 42)
    b = estimate(FpTailEvent(d532, 2), 1_000_000, 42)
    assert a == b
    assert estimate(FpTailEvent(d532, 2), 100_000, 43) != estimate(FpTailEvent(d532, 2), 100_000, 42)


def test_worker_count_does_not_change_results():
    d = make_family("frac", c=2)
    exp = FpReach(d, 30)
    one = run_trials(exp, 3 * BLOCK_SIZE + 17, 9, workers=1)
    two = run_trials(exp, 3 * BLOCK_SIZE + 17, 9, workers=2)
    assert np.array_equal(one, two)
    c1 = run_trials(RfpCount(d, 500), BLOCK_SIZE + 5, 9, workers=1)
    c3 = run_trials(RfpCount(d, 500), BLOCK_SIZE + 5, 9, workers=3)
    assert np.array_equal(c1, c3)


def test_trial_prefix_is_stable(d532):
    # trial t depends only on (seed, t): a longer run extends a shorter one
    short = run_trials(FpTailEvent(d532, 4), 5000, 3)
    long = run_trials(FpTailEvent(d532, 4), 9000, 3)
    assert np.array_equal(short[:BLOCK_SIZE], long[:BLOCK_SIZE])


def test_run_trials_validates(d532):
    with pytest.raises(ValueError):
        run_trials(FpTailEvent(d532, 1), 0, 1)


# -- goodness of fit --------------------------------------------------------------

def test_gof_discrete_accepts_true_law():
    rng = np.random.default_rng(0)
    x = rng.choice(4, size=50_000, p=[0.1, 0.2, 0.3, 0.4])
    assert gof_discrete(x, [0.1, 0.2, 0.3, 0.4]).passed
    assert not gof_discrete(x, [0.25] * 4).passed


def test_gof_discrete_zero_probability_value():
    rep = gof_discrete(np.array([0, 1, 1, 2] * 100), [0.5, 0.0, 0.5])
    assert not rep.passed and rep.pvalue == 0.0


def test_gof_geometric_examples():
    rng = np.random.default_rng(1)
    x = rng.geometric(0.4, size=100_000)
    assert gof_geometric(x, 0.4).passed
    assert not gof_geometric(x, 0.6).passed
    assert not gof_geometric(np.ones(20_000, dtype=np.int64), 0.4).passed
    with pytest.raises(ValueError):
        gof_geometric(x[:100], 0.4)
    with pytest.raises(ValueError):
        gof_geometric(x, 1.0)


def test_gof_two_sample():
    rng = np.random.default_rng(2)
    a, b = rng.poisson(3, 20_000), rng.poisson(3, 20_000)
    assert gof_two_sample(a, b).passed
    assert not gof_two_sample(a, rng.poisson(3.3, 20_000)).passed


def test_ks_standard_normal():
    rng = np.random.default_rng(3)
    assert ks_standard_normal(rng.standard_normal(2000)).passed
    assert not ks_standard_normal(rng.standard_normal(2000) + 0.2).passed


# -- CLT ---------------------------------------------------------------------------

def test_clt_passes_and_negative_control_fails():
    d = make_family("powratio", a=4)
    rep, z = clt_experiment(d, 10_000, 2000, 42)
    assert len(z) == 2000 and rep.passed
    bad, _ = clt_experiment(d, 10_000, 2000, 42, mu=1.02 * math.pi**4 / 90)
    assert not bad.passed


def test_clt_refuses_infinite_variance():
    with pytest.raises(ValueError, match="variance"):
        clt_experiment(make_family("frac", c=2), 10_000, 1000, 1)
    with pytest.raises(ValueError):
        clt_experiment(parse_dist("finite:0.5,0.3,0.2"), 10_000, 1000, 1)
    with pytest.raises(ValueError, match="10\\^4"):
        clt_experiment(make_family("powratio", a=4), 1000, 1000, 1)
