import pytest

from rumor_renewal.grammar import parse_dist

CATALOG = [
    "finite:0.5,0.3,0.2",
    "finite:0.9,0.1",
    "finite:0.4,0.1,0.1,0.4",
    "frac:c=2",
    "frac:c=1",
    "frac:c=3.5",
    "powratio:a=4",
    "powratio:a=0.75",
    "geomdefect:C=0.5,r=0.5",
    "harmonic:r=0.3,alpha0=0.7",
    "polylog:C=0.5,a=2,b=1",
    "sparse(eps=0.5;finite:0.5,0.3,0.2)",
    "pgf(geom1:p=0.5;frac:c=2)",
    "suscept(recip;powratio:a=2)",
    "pgf(poisson1:lam=1;sparse(eps=0.7;geomdefect:C=0.5,r=0.5))",
]

FINITE_RATIONAL = ["finite:0.5,0.3,0.2", "finite:0.9,0.1", "finite:0.4,0.1,0.1,0.4"]


@pytest.fixture(params=CATALOG)
def catalog_dist(request):
    return parse_dist(request.param)


@pytest.fixture
def d532():
    return parse_dist("finite:0.5,0.3,0.2")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
