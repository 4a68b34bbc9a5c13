import pytest

from rumor_renewal.grammar import parse_dist
from rumor_renewal.suites import Verdict, all_passed, bound_variant_for, run_suite


def test_verdict_line_format():
    assert Verdict("x", True, 1.5, 0.2, "d").line() == "PASS x statistic=1.5 pvalue=0.2 d"
    assert Verdict("x", False).line().startswith("FAIL x")
    assert Verdict("x", False, informational=True).line().startswith("INFO")
    assert all_passed([Verdict("a", True), Verdict("b", False, informational=True)])
    assert not all_passed([Verdict("a", False)])


@pytest.mark.parametrize("name,spec,kw", [
    ("lemma1", "finite:0.4,0.1,0.1,0.4", {"n": 6}),
    ("lemma2", "finite:0.5,0.3,0.2", {"n": 8, "reps": 50_000}),
    ("lemma2", "frac:c=2", {"n": 40, "reps": 50_000}),
    ("crossmodel", "finite:0.9,0.1", {"n": 10, "reps": 50_000, "oracle_n": 6}),
    ("geometric", "finite:0.5,0.3,0.2", {"reps": 20_000}),
    ("hchain", "frac:c=2", {"n": 15, "reps": 1000}),
    ("bounds", "geomdefect:C=0.5,r=0.5", {"n": 500}),
    ("bounds", "powratio:a=0.75", {"n": 3000}),
])
def test_suites_pass(name, spec, kw):
    v = run_suite(name, parse_dist(spec), **kw)
    assert v and all_passed(v), [x.line() for x in v if not x.passed]


def test_harmonic_above_threshold_is_informational():
    v = run_suite("bounds", parse_dist("harmonic:r=0.5"), n=2000)
    assert v[0].informational and all_passed(v)


def test_bound_variant_mapping():
    assert bound_variant_for(parse_dist("geomdefect:C=0.5,r=0.5")) == ("exp", {"r": 0.5, "C_r": 0.5})
    assert bound_variant_for(parse_dist("powratio:a=0.75"))[0] == "regvar"
    assert bound_variant_for(parse_dist("polylog:C=0.5,a=2,b=1"))[0] == "polylog"
    with pytest.raises(ValueError):
        bound_variant_for(parse_dist("frac:c=2"))
    with pytest.raises(ValueError):
        bound_variant_for(parse_dist("geomdefect:C=0.9,r=0.5"))  # C >= ln 2


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nosuch", parse_dist("frac:c=2"))
