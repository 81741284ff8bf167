import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate
from scipy.special import gammaln

from prophet_thresholds import (
    DiscreteAtoms,
    Exponential,
    Pareto,
    Schedule,
    Uniform,
    approx_factor,
    build_schedule,
    cosine_schedule,
    dp_schedule,
    expected_alg,
    expected_max,
    pointwise_ratio_curve,
    schedule_from_thresholds,
    single_threshold_schedule,
    solve_a,
    survival_alg,
)
from prophet_thresholds.errors import DiscreteNotInvertible, ScheduleMismatch

from conftest import CONTINUOUS, MATRIX_DISTS, MATRIX_NS

U = Uniform(0.0, 1.0)
ALPHA = solve_a().alpha


def survival_integral(d, s):
    """E[X_tau] = int_0^inf P(X_tau >= x) dx, integrated directly over x with scipy."""
    cuts = sorted(set([0.0, *s.thetas.tolist()]))
    hi = d.support[1]
    total = 0.0
    for lo, up in zip(cuts, cuts[1:] + [hi]):
        val, _ = sp_integrate.quad(lambda x: survival_alg(d, s, x), lo, up, epsabs=1e-13, epsrel=1e-12, limit=500)
        total += val
    return total


# ---- expected max ---------------------------------------------------------


def harmonic(n):
    return math.fsum(1.0 / k for k in range(1, n + 1))


def pareto_max(scale, shape, n):
    # E[max] = scale * n * Gamma(n) Gamma(1 - 1/shape) / Gamma(n + 1 - 1/shape)
    g = gammaln(n) + gammaln(1 - 1 / shape) - gammaln(n + 1 - 1 / shape)
    return scale * n * math.exp(g)


@pytest.mark.parametrize("n", [1, 2, 4, 10, 100, 1000])
def test_expected_max_uniform(n):
    assert expected_max(U, n) == pytest.approx(n / (n + 1), rel=1e-12)
    assert expected_max(Uniform(2.0, 5.0), n) == pytest.approx(2.0 + 3.0 * n / (n + 1), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5, 50, 1000])
def test_expected_max_exponential(n):
    assert expected_max(Exponential(1.0), n) == pytest.approx(harmonic(n), rel=1e-10)
    assert expected_max(Exponential(4.0), n) == pytest.approx(harmonic(n) / 4.0, rel=1e-10)


@pytest.mark.parametrize("shape", [2.0, 3.0, 1.5])
@pytest.mark.parametrize("n", [1, 3, 20, 500])
def test_expected_max_pareto(shape, n):
    assert expected_max(Pareto(1.0, shape), n) == pytest.approx(pareto_max(1.0, shape, n), rel=1e-9)


def test_expected_max_examples():
    assert expected_max(U, 4) == pytest.approx(0.8, abs=1e-12)
    assert expected_max(Exponential(1.0), 2) == pytest.approx(1.5, abs=1e-12)


def test_expected_max_is_mean_at_one(continuous):
    assert expected_max(continuous, 1) == pytest.approx(continuous.mean, rel=1e-10)


def test_expected_max_mixed_product():
    from prophet_thresholds import product_distribution

    d = product_distribution([U, Exponential(1.0)])
    # E[max(U, E)] = int_0^inf (1 - F_U F_E) dx = 3/2 - 1/e
    assert expected_max(d, 1) == pytest.approx(1.5 - math.exp(-1), rel=1e-12)
    # the max of n such blocks is the max of n uniforms and n exponentials
    ref, _ = sp_integrate.quad(lambda x: 1 - (min(x, 1.0) * -math.expm1(-x)) ** 5, 0, 1, epsabs=1e-14)
    tail, _ = sp_integrate.quad(lambda x: -math.expm1(5 * math.log1p(-math.exp(-x))), 1, 80, epsabs=1e-14)
    assert expected_max(d, 5) == pytest.approx(ref + tail, rel=1e-10)


def test_expected_max_rejects_discrete():
    with pytest.raises(DiscreteNotInvertible):
        expected_max(DiscreteAtoms(((0.0, 0.5), (1.0, 0.5))), 2)


# ---- expected alg ---------------------------------------------------------


def test_accept_all_single_item():
    s = schedule_from_thresholds(U, [0.0])
    assert expected_alg(U, s) == pytest.approx(0.5, abs=1e-15)


def test_dp_two_uniform():
    r = approx_factor(U, dp_schedule(U, 2))
    assert r.e_alg == pytest.approx(0.625, abs=1e-12)
    assert r.factor == pytest.approx(0.9375, abs=1e-9)


def test_cosine_two_uniform_hand_value():
    # 0.18478 + 0.7940 * 0.44585, the split of E[X_tau] by stopping position
    c1, c2 = math.cos(solve_a().a / 2), math.cos(solve_a().a)
    t1, t2 = c1, c2 / c1
    hand = (1 - t1**2) / 2 + c1 * (1 - t2**2) / 2
    assert expected_alg(U, cosine_schedule(U, 2)) == pytest.approx(hand, abs=1e-14)
    assert hand == pytest.approx(0.5388, abs=1e-4)


@pytest.mark.parametrize("kind", ["cosine", "dp", "single"])
@pytest.mark.parametrize("name", sorted(CONTINUOUS))
@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_two_route_agreement(kind, name, n):
    d = CONTINUOUS[name]
    s = build_schedule(kind, d, n)
    assert expected_alg(d, s) == pytest.approx(survival_integral(d, s), abs=1e-7, rel=1e-9)


def test_empty_schedule():
    r = approx_factor(U, Schedule.empty())
    assert (r.e_alg, r.e_opt, r.factor) == (0.0, 0.0, 1.0)
    assert expected_alg(U, Schedule.empty()) == 0.0


def test_schedule_mismatch():
    s = cosine_schedule(U, 5)
    with pytest.raises(ScheduleMismatch):
        expected_alg(Exponential(1.0), s)
    # a round trip through 12 significant digits is within tolerance
    rounded = Schedule(np.round(s.thetas, 12), np.round(s.qs, 12))
    assert expected_alg(U, rounded) == pytest.approx(expected_alg(U, s), abs=1e-10)


@pytest.mark.parametrize("n", MATRIX_NS)
@pytest.mark.parametrize("dname", sorted(MATRIX_DISTS))
@pytest.mark.parametrize("kind", ["cosine", "dp", "single"])
def test_prophet_dominance(kind, dname, n):
    d = MATRIX_DISTS[dname]
    r = approx_factor(d, build_schedule(kind, d, n))
    assert r.e_alg <= r.e_opt + 1e-9
    assert 0.0 <= r.factor <= 1.0 + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12))
def test_arbitrary_thresholds_never_beat_prophet(thetas):
    s = schedule_from_thresholds(U, thetas)
    assert expected_alg(U, s) <= expected_max(U, len(thetas)) + 1e-12
    assert expected_alg(U, s) <= expected_alg(U, dp_schedule(U, len(thetas))) + 1e-12


@pytest.mark.parametrize("n", [2, 10, 100])
def test_factor_affine_invariance(n):
    a = approx_factor(Uniform(0, 1), cosine_schedule(Uniform(0, 1), n)).factor
    b = approx_factor(Uniform(0, 10), cosine_schedule(Uniform(0, 10), n)).factor
    assert a == pytest.approx(b, abs=1e-9)


@pytest.mark.parametrize("n", [100, 1000])
def test_cosine_factor_large_n(n):
    assert approx_factor(U, cosine_schedule(U, n)).factor >= 0.738


def test_dp_one_item_factor_is_one(continuous):
    assert approx_factor(continuous, dp_schedule(continuous, 1)).factor == pytest.approx(1.0, abs=1e-10)


def test_quad_error_is_reported(continuous):
    r = approx_factor(continuous, cosine_schedule(continuous, 20))
    assert 0.0 <= r.quad_error < 1e-8
    assert set(r.to_dict()) == {"e_alg", "e_opt", "factor", "quad_error"}


# ---- survival function and ratio curve ------------------------------------


def test_survival_at_zero_is_alpha():
    for d in MATRIX_DISTS.values():
        assert survival_alg(d, cosine_schedule(d, 13), 0.0) == pytest.approx(ALPHA, abs=1e-12)


def test_survival_above_support():
    assert survival_alg(U, cosine_schedule(U, 5), 1.5) == 0.0


def test_survival_plateau(continuous):
    s = cosine_schedule(continuous, 17)
    lo = continuous.support[0]
    x = np.linspace(lo, s.thetas[-1], 11)[:-1]
    vals = survival_alg(continuous, s, x)
    assert np.ptp(vals) < 1e-12
    assert vals[0] == pytest.approx(1 - s.qs[-1], abs=1e-12)


def test_survival_telescopes_for_any_schedule():
    s = schedule_from_thresholds(Exponential(1.0), [2.0, 0.5, 1.0])
    assert survival_alg(Exponential(1.0), s, 0.1) == pytest.approx(1 - s.qs[-1], abs=1e-15)


def test_ratio_curve_large_n():
    s = cosine_schedule(U, 1000)
    curve = pointwise_ratio_curve(U, s, 1000, np.linspace(0, 1, 202)[1:-1])
    assert curve.shape == (200, 2)
    assert curve[:, 1].min() >= 0.738


def test_ratio_curve_below_last_threshold():
    s = cosine_schedule(Exponential(1.0), 8)
    u = np.linspace(1e-3, Exponential(1.0).cdf(s.thetas[-1]) * 0.999, 20)
    curve = pointwise_ratio_curve(Exponential(1.0), s, grid=u)
    assert np.all(curve[:, 1] >= ALPHA - 1e-12)
    den = 1 - Exponential(1.0).cdf(curve[:, 0]) ** 8
    np.testing.assert_allclose(curve[:, 1], ALPHA / den, rtol=1e-10)


def test_ratio_curve_accept_all():
    s = schedule_from_thresholds(U, [0.0])
    curve = pointwise_ratio_curve(U, s)
    np.testing.assert_allclose(curve[:, 1], 1.0, atol=1e-12)


def test_single_threshold_below_cosine_at_100():
    a = approx_factor(U, cosine_schedule(U, 100)).factor
    b = approx_factor(U, single_threshold_schedule(U, 100)).factor
    assert a - b > 0.05
