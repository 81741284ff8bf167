import sys

import pytest

from prophet_thresholds import Exponential, Pareto, PiecewiseLinear, Uniform, product_distribution

CONTINUOUS = {
    "uniform": Uniform(0.0, 1.0),
    "uniform-shifted": Uniform(2.0, 5.0),
    "exponential": Exponential(1.0),
    "exponential-fast": Exponential(3.5),
    "pareto": Pareto(1.0, 2.0),
    "pareto-thin": Pareto(2.0, 4.5),
    "piecewise": PiecewiseLinear((0.0, 1.0, 3.0, 4.0), (0.0, 0.5, 0.9, 1.0)),
    "product-mixed": product_distribution([Uniform(0.0, 1.0), Exponential(1.0)]),
}

# the dominance matrix
MATRIX_DISTS = {"U(0,1)": Uniform(0.0, 1.0), "Exp(1)": Exponential(1.0), "Pareto(1,2)": Pareto(1.0, 2.0)}
MATRIX_NS = (1, 2, 5, 10, 50, 100)


@pytest.fixture(params=sorted(CONTINUOUS), ids=str)
def continuous(request):
    return CONTINUOUS[request.param]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
