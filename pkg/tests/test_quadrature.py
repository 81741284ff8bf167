import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from prophet_thresholds.quadrature import MAX_PANELS, fixed_rule, integrate, panel_edges


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (np.cos, 0.0, 1.0, math.sin(1.0)),
        (lambda t: t**-0.5, 0.0, 1.0, 2.0),
        (lambda t: -np.log(t), 0.0, 1.0, 1.0),
        (lambda t: np.exp(-t), 0.0, 30.0, -math.expm1(-30.0)),
        (lambda t: t**7, -1.0, 2.0, (2.0**8 - 1.0) / 8.0),
    ],
    ids=["cos", "rsqrt-left", "log", "exp", "poly"],
)
def test_closed_forms(f, a, b, exact):
    res = integrate(f, a, b)
    assert res.value == pytest.approx(exact, rel=1e-9)
    assert res.panels <= MAX_PANELS


def test_matches_scipy_quad_on_smooth_kernel():
    f = lambda t: np.sin(3 * t) * np.exp(-t * t)
    ref, _ = sp_integrate.quad(f, -2.0, 3.0, epsabs=1e-13, epsrel=1e-10)
    assert integrate(f, -2.0, 3.0).value == pytest.approx(ref, rel=1e-9)


def test_edges_are_graded_toward_both_ends():
    edges = panel_edges(0.0, 1.0, depth=40, splits=2)
    assert edges[0] == 0.0 and edges[-1] == 1.0
    assert np.all(np.diff(edges) > 0)
    assert edges[1] < 1e-11
    assert 1.0 - edges[-2] < 1e-11


def test_empty_interval():
    assert integrate(np.cos, 1.0, 1.0).value == 0.0


def test_fixed_rule_exact_for_high_degree_polynomials():
    # a 32-point rule integrates degree 63 exactly
    f = lambda t: t**63
    assert fixed_rule(f, np.array([0.0, 1.0])) == pytest.approx(1.0 / 64.0, rel=1e-13)
