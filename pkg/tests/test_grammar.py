from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rumor_renewal.dist_catalog import DistributionError
from rumor_renewal.grammar import SpecSyntaxError, format_dist, parse_dist

from conftest import CATALOG


@pytest.mark.parametrize("spec", CATALOG + [
    "harmonic:r=0.3,alpha0=0.7",
    "suscept(const:0.5;finite:0.5,0.3,0.2)",
    "suscept(list:1,0.5,0.25;frac:c=1)",
    "suscept(geom:r=0.9;frac:c=2)",
    "pgf(pmf:0,0.5,0.5;frac:c=2)",
    "finite:1/3,2/3",
])
def test_canonical_round_trip(spec):
    d = parse_dist(spec)
    assert format_dist(d) == spec
    assert format_dist(parse_dist(format_dist(d))) == format_dist(d)


def test_harmonic_default_alpha0():
    assert format_dist(parse_dist("harmonic:r=0.3")) == "harmonic:r=0.3,alpha0=0.7"


def test_whitespace_is_tolerated():
    assert format_dist(parse_dist(" sparse( eps=0.5 ; frac:c=2 ) ")) == "sparse(eps=0.5;frac:c=2)"


@pytest.mark.parametrize("bad", [
    "", "finite:", "finite:0.5,0.3", "finite:a,b", "frac:c", "frac:c=x", "frac:d=2",
    "sparse(eps=0.5;frac:c=2", "sparse(frac:c=2)", "sparse(eps=0;frac:c=2)", "blur(eps=0.5;frac:c=2)",
    "pgf(geom1:q=0.5;frac:c=2)", "pgf(pmf:0.5,0.5;frac:c=2)", "suscept(const:0.5,0.4;frac:c=2)",
    "suscept(list:0.5,0.7;frac:c=2)", "harmonic:r=1.5", "nosuch:x=1",
])
def test_invalid_specs_rejected(bad):
    with pytest.raises(DistributionError):
        parse_dist(bad)


def test_syntax_error_is_distribution_error():
    assert issubclass(SpecSyntaxError, DistributionError)


_base = st.one_of(
    st.floats(0.1, 6.0).map(lambda c: f"frac:c={c!r}"),
    st.floats(0.1, 6.0).map(lambda a: f"powratio:a={a!r}"),
    st.tuples(st.floats(0.05, 0.95), st.floats(0.05, 0.95)).map(lambda t: f"geomdefect:C={t[0]!r},r={t[1]!r}"),
    st.lists(st.integers(1, 9), min_size=2, max_size=5).map(
        lambda w: "finite:" + ",".join(str(Fraction(x, sum(w))) for x in w)),
)


def _wrap(inner):
    return st.one_of(
        st.tuples(st.floats(0.05, 1.0), inner).map(lambda t: f"sparse(eps={t[0]!r};{t[1]})"),
        st.tuples(st.floats(0.05, 1.0), inner).map(lambda t: f"pgf(geom1:p={t[0]!r};{t[1]})"),
        st.tuples(st.integers(1, 4), inner).map(lambda t: f"pgf(fixed:m={t[0]};{t[1]})"),
        st.tuples(st.floats(0.0, 1.0), inner).map(lambda t: f"suscept(const:{t[0]!r};{t[1]})"),
    )


_spec = st.recursive(_base, _wrap, max_leaves=4)


@settings(max_examples=150, deadline=None)
@given(_spec)
def test_round_trip_property(text):
    try:
        d = parse_dist(text)
    except DistributionError:
        return  # e.g. a transform that pushes alpha_0 to 1
    canon = format_dist(d)
    again = parse_dist(canon)
    assert format_dist(again) == canon
    assert np.array_equal(again.alpha_array(64), d.alpha_array(64))
