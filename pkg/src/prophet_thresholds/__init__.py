"""Threshold stopping rules for prophet inequalities.

Build cosine, dynamic-programming and single-threshold schedules, evaluate them
exactly on the quantile axis, simulate them with reproducible seeds, extend
them to repeated-distribution markets, and grid-certify the supporting inequalities.
"""

from .distributions import (
    DiscreteAtoms,
    Distribution,
    Exponential,
    Pareto,
    PiecewiseLinear,
    PointMass,
    Product,
    Uniform,
    cdf,
    make_distribution,
    partial_expectation,
    product_distribution,
    quantile,
    sample,
)
from .errors import *  # noqa: F401,F403
from .evaluator import EvalReport, approx_factor, expected_alg, expected_max, pointwise_ratio_curve, survival_alg
from .instances import InstanceSequence
from .schedules import (
    CosineParams,
    Schedule,
    build_schedule,
    cosine_schedule,
    dp_schedule,
    schedule_from_thresholds,
    single_threshold_schedule,
    solve_a,
)
from .simulator import DEFAULT_SEED, estimate_factor, run_policy, run_prophet

__version__ = "0.1.0"
