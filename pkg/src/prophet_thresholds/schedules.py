"""Threshold schedules for iid stopping problems.

A schedule is a threshold per position together with its survival sequence
``q_i = P(tau > i)``.  The two determine each other given the value
distribution: ``q_i = q_{i-1} F(theta_i)`` and ``theta_i = F^{-1}(q_i / q_{i-1})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .distributions import Distribution
from .errors import InvalidCount, NotDecreasing, NotNormalized


@dataclass(frozen=True)
class CosineParams:
    """The constant ``a`` solving ``cos(a) + sin(a)/a = 1`` and the factor ``alpha = 1 - cos(a)``."""

    a: float

    @property
    def alpha(self) -> float:
        return 1.0 - math.cos(self.a)

    def h(self, s):
        return np.cos(self.a * np.asarray(s, dtype=float))

    def dh(self, s):
        return -self.a * np.sin(self.a * np.asarray(s, dtype=float))

    def d2h(self, s):
        return -self.a**2 * np.cos(self.a * np.asarray(s, dtype=float))


def root_equation(a: float) -> float:
    return math.cos(a) + math.sin(a) / a - 1.0


def _root_equation_prime(a: float) -> float:
    return -math.sin(a) + math.cos(a) / a - math.sin(a) / a**2


def solve_a(tolerance: float = 1e-12) -> CosineParams:
    """Bisect ``cos(a) + sin(a)/a - 1`` on ``[1.0, 1.5]``, then take one Newton step."""
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    return _solve_a(float(tolerance))


@lru_cache(maxsize=16)
def _solve_a(tolerance: float) -> CosineParams:
    lo, hi = 1.0, 1.5
    f_lo = root_equation(lo)
    assert f_lo > 0 > root_equation(hi), "root bracket lost its sign change"
    while hi - lo >= tolerance:
        mid = 0.5 * (lo + hi)
        f_mid = root_equation(mid)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    a -= root_equation(a) / _root_equation_prime(a)
    return CosineParams(a)


@dataclass(frozen=True, eq=False)
class Schedule:
    """Thresholds ``theta_1..theta_n`` with survival probabilities ``q_0..q_n``."""

    thetas: np.ndarray
    qs: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        thetas = np.array(self.thetas, dtype=float).reshape(-1)
        qs = np.array(self.qs, dtype=float).reshape(-1)
        if len(qs) != len(thetas) + 1:
            raise ValueError(f"need n + 1 survival probabilities for n thresholds, got {len(qs)} for {len(thetas)}")
        thetas.flags.writeable = False
        qs.flags.writeable = False
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "qs", qs)

    @property
    def n(self) -> int:
        return len(self.thetas)

    @classmethod
    def empty(cls) -> "Schedule":
        return cls(np.empty(0), np.ones(1), kind="empty")

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return (
            self.kind == other.kind
            and np.array_equal(self.thetas, other.thetas)
            and np.array_equal(self.qs, other.qs)
        )

    __hash__ = None


def _check_count(n: int) -> int:
    if int(n) != n or n < 1:
        raise InvalidCount(f"item count must be a positive integer, got {n!r}")
    return int(n)


def schedule_from_h(h: Callable, d: Distribution, n: int, kind: str = "h") -> Schedule:
    """Schedule with ``q_i = h(i/n)`` and ``theta_i = F^{-1}(q_i / q_{i-1})``.

    ``h`` must be vectorised, satisfy ``h(0) = 1`` and be strictly decreasing
    on the grid ``{i/n}`` with values in ``(0, 1]``.
    """
    n = _check_count(n)
    d._require_continuous()
    qs = np.asarray(h(np.arange(n + 1) / n), dtype=float)
    if abs(qs[0] - 1.0) > 1e-12:
        raise NotNormalized(f"h(0) = {qs[0]!r}, expected 1")
    qs = qs.copy()
    qs[0] = 1.0
    steps = np.diff(qs)
    bad = np.flatnonzero(steps >= 0)
    if bad.size:
        raise NotDecreasing(int(bad[0]) + 1)
    if np.any(qs <= 0) or np.any(qs > 1):
        raise ValueError("h values must lie in (0, 1]")
    thetas = d.quantile(qs[1:] / qs[:-1])
    return Schedule(thetas, qs, kind=kind)


def cosine_schedule(d: Distribution, n: int, params: CosineParams | None = None) -> Schedule:
    """Thresholds placed so that the policy survives position ``i`` with probability ``cos(a i / n)``."""
    params = params or solve_a()
    return schedule_from_h(params.h, d, n, kind="cosine")


def thresholds_to_q(d: Distribution, thetas: Sequence[float]) -> np.ndarray:
    """Survival sequence ``q_0 = 1, q_i = q_{i-1} F(theta_i)``."""
    d._require_continuous()
    thetas = np.asarray(thetas, dtype=float).reshape(-1)
    qs = np.empty(len(thetas) + 1)
    qs[0] = 1.0
    if len(thetas):
        qs[1:] = np.cumprod(d.cdf(thetas))
    return qs


def schedule_from_thresholds(d: Distribution, thetas: Sequence[float], kind: str = "custom") -> Schedule:
    return Schedule(np.asarray(thetas, dtype=float), thresholds_to_q(d, thetas), kind=kind)


def dp_values(d: Distribution, n: int) -> np.ndarray:
    """Optimal continuation values ``V_1..V_{n+1}`` by backward induction (``V_{n+1} = 0``)."""
    n = _check_count(n)
    d._require_continuous()
    v = np.zeros(n + 1)
    for i in range(n - 1, -1, -1):
        nxt = v[i + 1]
        p = d.cdf(nxt)
        v[i] = nxt * p + d.partial_expectation(p)
    return v


def dp_schedule(d: Distribution, n: int) -> Schedule:
    """The optimal threshold policy: accept item ``i`` iff it beats the value of continuing."""
    v = dp_values(d, n)
    return schedule_from_thresholds(d, v[1:], kind="dp")


def single_threshold_schedule(d: Distribution, n: int) -> Schedule:
    """One threshold for every position, chosen so that ``n G(theta) = 1``."""
    n = _check_count(n)
    theta = d.quantile(1.0 - 1.0 / n)
    return schedule_from_thresholds(d, np.full(n, theta), kind="single")


SCHEDULE_KINDS = {
    "cosine": cosine_schedule,
    "dp": dp_schedule,
    "single": single_threshold_schedule,
}


def build_schedule(kind: str, d: Distribution, n: int) -> Schedule:
    try:
        builder = SCHEDULE_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown schedule kind {kind!r}; choose from {sorted(SCHEDULE_KINDS)}") from None
    return builder(d, n)
