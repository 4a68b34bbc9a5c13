import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rumor_renewal.dist_catalog import FinitePmf
from rumor_renewal.grammar import parse_dist
from rumor_renewal.oracle import (
    EnumerationTooLarge,
    ExactProbability,
    enumerate_fp_tail,
    enumerate_rfp_block,
    enumerate_site_informed,
    fp_definitions_agree,
    min_formula_range,
)
from rumor_renewal.renewal_core import inter_arrival, renewal_sequence

from conftest import FINITE_RATIONAL


def _exact(dist, n):
    law = inter_arrival(dist, n, exact=True)
    return law, renewal_sequence(law, n).u


def test_fp_tail_examples(d532):
    p = enumerate_fp_tail(d532, 2)
    assert p.value == Fraction(9, 40)
    assert str(p) == "9/40"
    assert (p.numerator, p.denominator) == (9, 40)
    assert enumerate_fp_tail(d532, 0).value == Fraction(1, 2)
    assert enumerate_fp_tail(parse_dist("finite:0.9,0.1"), 1).value == Fraction(1, 100)


def test_rfp_block_examples(d532):
    assert [enumerate_rfp_block(d532, k).value for k in (1, 2, 3)] == [Fraction(1, 2), Fraction(1, 10), 0]


def test_site_informed_examples(d532):
    assert enumerate_site_informed(d532, 2, "FP").value == Fraction(7, 20)
    assert enumerate_site_informed(d532, 2, "rfp").value == Fraction(7, 20)
    assert enumerate_site_informed(d532, 0, "FP").value == 1
    with pytest.raises(ValueError):
        enumerate_site_informed(d532, 2, "XP")


@pytest.mark.parametrize("spec", FINITE_RATIONAL)
def test_lemma1_exact(spec):
    d = parse_dist(spec)
    _, u = _exact(d, 10)
    t0 = time.perf_counter()
    for n in range(9):
        assert enumerate_fp_tail(d, n).value == u[n + 1]
    assert time.perf_counter() - t0 < 60


@pytest.mark.parametrize("spec", FINITE_RATIONAL)
def test_block_law_exact(spec):
    d = parse_dist(spec)
    law, _ = _exact(d, 9)
    for k in range(1, 9):
        assert enumerate_rfp_block(d, k).value == law.q[k]


@pytest.mark.parametrize("spec", FINITE_RATIONAL)
def test_cross_model_exact(spec):
    d = parse_dist(spec)
    _, u = _exact(d, 8)
    for n in range(9):
        fp = enumerate_site_informed(d, n, "FP").value
        rfp = enumerate_site_informed(d, n, "RFP").value
        assert fp == rfp == u[n]


@pytest.mark.parametrize("spec", FINITE_RATIONAL)
def test_fp_definitions_agree(spec):
    checked, bad = fp_definitions_agree(parse_dist(spec), 7)
    assert checked > 0 and bad == 0


def test_partitioned_sum_is_partition_invariant():
    d = parse_dist("finite:0.4,0.1,0.1,0.4")
    ref = enumerate_fp_tail(d, 6)
    assert enumerate_fp_tail(d, 6, parts=3).value == ref.value
    assert enumerate_fp_tail(d, 6, parts=4, workers=2).value == ref.value


def test_float_pmf_path():
    d = parse_dist("sparse(eps=0.7;finite:0.5,0.3,0.2)")
    law = inter_arrival(d, 8)
    u = renewal_sequence(law, 8).u
    p = enumerate_fp_tail(d, 4)
    assert not p.is_rational and p.numerator is None
    assert float(p) == pytest.approx(u[5], abs=1e-12)
    assert float(enumerate_rfp_block(d, 2)) == pytest.approx(law.q[2], abs=1e-12)


def test_guards():
    d = parse_dist("finite:0.4,0.1,0.1,0.4")
    with pytest.raises(ValueError):
        enumerate_fp_tail(d, 13)
    with pytest.raises(ValueError):
        enumerate_rfp_block(d, 0)
    with pytest.raises(ValueError):
        enumerate_fp_tail(parse_dist("frac:c=2"), 3)
    big = FinitePmf.from_values([Fraction(1, 10)] * 10)
    with pytest.raises(EnumerationTooLarge):
        enumerate_fp_tail(big, 8)
    with pytest.raises(ValueError):
        ExactProbability(Fraction(3, 2))


def test_min_formula_literal():
    assert min_formula_range((0,)) == 0
    assert min_formula_range((1,)) is None
    assert min_formula_range((2, 0, 0)) == 2


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=2, max_size=4).filter(lambda w: w[0] > 0 and sum(w) > w[0]),
       st.integers(0, 5))
def test_lemma1_random_rational_pmfs(weights, n):
    tot = sum(weights)
    d = FinitePmf.from_values([Fraction(w, tot) for w in weights])
    _, u = _exact(d, n + 1)
    assert enumerate_fp_tail(d, n).value == u[n + 1]
    assert enumerate_site_informed(d, n, "FP").value == enumerate_site_informed(d, n, "RFP").value == u[n]
