"""Value distributions on the non-negative reals.

Every continuous family exposes its CDF, survival function, quantile (and the
upper-tail quantile ``F^{-1}(1 - t)``, which stays accurate for tiny ``t``),
the partial expectation ``int_p^1 F^{-1}(u) du`` and inverse-transform
sampling.  Discrete families exist for the hardness instance and for Monte
Carlo runs; any quantile-dependent call on them raises
:class:`~prophet_thresholds.errors.DiscreteNotInvertible`.

All distributions are immutable and all methods accept scalars or arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import (
    DiscreteComponent,
    DiscreteNotInvertible,
    EmptyList,
    InvalidParameters,
    OutOfRange,
    UnknownFamily,
)
from .quadrature import integrate_pieces

CONTINUOUS = "continuous"
DISCRETE = "discrete"


def _result(x, arr):
    arr = np.asarray(arr, dtype=float)
    if np.ndim(x) == 0:
        return float(arr)
    return arr


class Distribution:
    """Common interface.  Subclasses are frozen dataclasses."""

    kind: str = CONTINUOUS

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def is_continuous(self) -> bool:
        return self.kind == CONTINUOUS

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        return _result(x, self._cdf(x_arr))

    def sf(self, x):
        """Survival function ``1 - F(x)`` computed without cancellation."""
        x_arr = np.asarray(x, dtype=float)
        return _result(x, self._sf(x_arr))

    def _sf(self, x):
        return 1.0 - self._cdf(x)

    def _require_continuous(self):
        if not self.is_continuous:
            raise DiscreteNotInvertible(f"{self!r} is discrete; no quantile function")

    def quantile(self, p):
        """Inverse CDF.  ``quantile(0)`` and ``quantile(1)`` are the support endpoints."""
        self._require_continuous()
        p_arr = np.asarray(p, dtype=float)
        if np.any(np.isnan(p_arr)) or np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
            raise OutOfRange(f"probability outside [0, 1]: {p}")
        lo, hi = self.support
        if math.isinf(hi) and np.any(p_arr == 1.0):
            raise OutOfRange("quantile(1) is infinite for an unbounded support")
        with np.errstate(divide="ignore", invalid="ignore"):
            inner = self._ppf(p_arr)
        out = np.where(p_arr <= 0.0, lo, np.where(p_arr >= 1.0, hi, inner))
        return _result(p, out)

    def quantile_upper(self, t):
        """``F^{-1}(1 - t)``, accurate when the tail mass ``t`` is tiny."""
        self._require_continuous()
        t_arr = np.asarray(t, dtype=float)
        if np.any(np.isnan(t_arr)) or np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
            raise OutOfRange(f"tail probability outside [0, 1]: {t}")
        lo, hi = self.support
        if math.isinf(hi) and np.any(t_arr == 0.0):
            raise OutOfRange("quantile(1) is infinite for an unbounded support")
        with np.errstate(divide="ignore", invalid="ignore"):
            inner = self._isf(t_arr)
        out = np.where(t_arr >= 1.0, lo, np.where(t_arr <= 0.0, hi, inner))
        return _result(t, out)

    def _isf(self, t):
        return self._ppf(1.0 - t)

    def partial_expectation(self, p):
        """``int_p^1 F^{-1}(u) du``, i.e. ``E[X 1{X >= F^{-1}(p)}]``."""
        self._require_continuous()
        p_arr = np.asarray(p, dtype=float)
        if np.any(np.isnan(p_arr)) or np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
            raise OutOfRange(f"probability outside [0, 1]: {p}")
        if p_arr.ndim == 0:
            return float(self._partial_expectation(float(p_arr)))
        return np.array([self._partial_expectation(float(v)) for v in p_arr.ravel()]).reshape(p_arr.shape)

    def kinks(self) -> tuple[float, ...]:
        """Interior points of the support where the density jumps."""
        return ()

    def tail_breaks(self) -> np.ndarray:
        """Tail masses ``1 - F(x)`` at the kinks: where the upper quantile bends."""
        k = np.asarray(self.kinks(), dtype=float)
        return np.sort(self._sf(k)) if k.size else k

    def _partial_expectation(self, p: float) -> float:
        if p >= 1.0:
            return 0.0
        return integrate_pieces(self._isf, 0.0, 1.0 - p, self.tail_breaks()).value

    @property
    def mean(self) -> float:
        return self.partial_expectation(0.0)

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-transform draw(s) using ``rng``."""
        u = rng.random(size)
        return self.sample_from_uniform(u)

    def sample_from_uniform(self, u):
        """Map uniforms on ``[0, 1)`` to draws; the inverse-transform kernel of :meth:`sample`."""
        u_arr = np.asarray(u, dtype=float)
        return _result(u, self._ppf(u_arr))

    def to_spec(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi) or math.isinf(self.hi):
            raise InvalidParameters(f"uniform needs 0 <= a < b < inf, got a={self.lo}, b={self.hi}")

    @property
    def support(self):
        return (self.lo, self.hi)

    def _cdf(self, x):
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def _sf(self, x):
        return np.clip((self.hi - x) / (self.hi - self.lo), 0.0, 1.0)

    def _ppf(self, p):
        return self.lo + (self.hi - self.lo) * p

    def _isf(self, t):
        return self.hi - (self.hi - self.lo) * t

    def _partial_expectation(self, p):
        return (1.0 - p) * (self.lo + (self.hi - self.lo) * (1.0 + p) / 2.0)

    def to_spec(self):
        return {"family": "uniform", "params": [self.lo, self.hi]}


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float = 1.0

    def __post_init__(self):
        if not (self.rate > 0.0) or math.isinf(self.rate):
            raise InvalidParameters(f"exponential needs rate > 0, got {self.rate}")

    @property
    def support(self):
        return (0.0, math.inf)

    def _cdf(self, x):
        return np.where(x <= 0.0, 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)))

    def _sf(self, x):
        return np.where(x <= 0.0, 1.0, np.exp(-self.rate * np.maximum(x, 0.0)))

    def _ppf(self, p):
        return -np.log1p(-p) / self.rate

    def _isf(self, t):
        with np.errstate(divide="ignore"):
            return -np.log(t) / self.rate

    def _partial_expectation(self, p):
        if p >= 1.0:
            return 0.0
        t = -math.log1p(-p) / self.rate
        return (1.0 - p) * (t + 1.0 / self.rate)

    def to_spec(self):
        return {"family": "exponential", "params": [self.rate]}


@dataclass(frozen=True)
class Pareto(Distribution):
    """Pareto type I with ``P(X > x) = (scale / x)^shape`` for ``x >= scale``."""

    scale: float = 1.0
    shape: float = 2.0

    def __post_init__(self):
        if not (self.scale > 0.0) or math.isinf(self.scale):
            raise InvalidParameters(f"pareto needs scale > 0, got {self.scale}")
        if not (self.shape > 1.0):
            raise InvalidParameters(f"pareto needs shape > 1 for a finite mean, got {self.shape}")

    @property
    def support(self):
        return (self.scale, math.inf)

    def _cdf(self, x):
        return np.where(x <= self.scale, 0.0, -np.expm1(self.shape * np.log(self.scale / np.maximum(x, self.scale))))

    def _sf(self, x):
        return np.where(x <= self.scale, 1.0, (self.scale / np.maximum(x, self.scale)) ** self.shape)

    def _ppf(self, p):
        return self.scale * (1.0 - p) ** (-1.0 / self.shape)

    def _isf(self, t):
        with np.errstate(divide="ignore"):
            return self.scale * t ** (-1.0 / self.shape)

    def _partial_expectation(self, p):
        return self.shape / (self.shape - 1.0) * self.scale * (1.0 - p) ** (1.0 - 1.0 / self.shape)

    def to_spec(self):
        return {"family": "pareto", "params": [self.scale, self.shape]}


@dataclass(frozen=True)
class PiecewiseLinear(Distribution):
    """Continuous CDF interpolating knots ``(xs[i], ps[i])`` linearly.

    ``ps`` must rise strictly from 0 to 1 and ``xs`` must be strictly
    increasing and non-negative.  Use :meth:`from_samples` for an empirical
    CDF of data.
    """

    xs: tuple[float, ...]
    ps: tuple[float, ...]

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ps = np.asarray(self.ps, dtype=float)
        if xs.ndim != 1 or xs.shape != ps.shape or len(xs) < 2:
            raise InvalidParameters("piecewise-linear CDF needs two equal-length knot lists of length >= 2")
        if np.any(np.diff(xs) <= 0) or xs[0] < 0 or not np.all(np.isfinite(xs)):
            raise InvalidParameters("knot values must be finite, non-negative and strictly increasing")
        if np.any(np.diff(ps) <= 0) or ps[0] != 0.0 or ps[-1] != 1.0:
            raise InvalidParameters("knot probabilities must rise strictly from 0 to 1")
        object.__setattr__(self, "xs", tuple(float(v) for v in xs))
        object.__setattr__(self, "ps", tuple(float(v) for v in ps))

    @classmethod
    def from_samples(cls, data: Iterable[float]) -> "PiecewiseLinear":
        xs = np.unique(np.asarray(list(data), dtype=float))
        if len(xs) < 2:
            raise InvalidParameters("need at least two distinct samples")
        return cls(tuple(xs), tuple(np.linspace(0.0, 1.0, len(xs))))

    @property
    def support(self):
        return (self.xs[0], self.xs[-1])

    def _cdf(self, x):
        return np.interp(x, self.xs, self.ps, left=0.0, right=1.0)

    def _ppf(self, p):
        return np.interp(p, self.ps, self.xs)

    def kinks(self):
        return self.xs[1:-1]

    def _partial_expectation(self, p):
        xs, ps = np.asarray(self.xs), np.asarray(self.ps)
        lo_p = np.maximum(ps[:-1], p)
        hi_p = ps[1:]
        keep = hi_p > lo_p
        lo_x = np.interp(lo_p[keep], ps, xs)
        hi_x = xs[1:][keep]
        # the quantile is linear on each segment, so the trapezoid is exact
        return float(np.sum((hi_p[keep] - lo_p[keep]) * (lo_x + hi_x) / 2.0))

    def to_spec(self):
        return {"family": "piecewise_linear", "params": [list(self.xs), list(self.ps)]}


@dataclass(frozen=True)
class DiscreteAtoms(Distribution):
    """Finite distribution given as ``((value, probability), ...)`` pairs."""

    atoms: tuple[tuple[float, float], ...]
    kind: str = field(default=DISCRETE, init=False, repr=False)

    def __post_init__(self):
        if len(self.atoms) == 0:
            raise InvalidParameters("atom list is empty")
        merged: dict[float, float] = {}
        for pair in self.atoms:
            if len(pair) != 2:
                raise InvalidParameters(f"atoms must be (value, probability) pairs, got {pair!r}")
            v, q = float(pair[0]), float(pair[1])
            if v < 0 or not math.isfinite(v):
                raise InvalidParameters(f"atom value must be finite and non-negative, got {v}")
            if q < 0:
                raise InvalidParameters(f"atom probability must be non-negative, got {q}")
            merged[v] = merged.get(v, 0.0) + q
        total = math.fsum(merged.values())
        if abs(total - 1.0) > 1e-12:
            raise InvalidParameters(f"atom probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([q for _, q in self.atoms])

    @property
    def support(self):
        return (self.atoms[0][0], self.atoms[-1][0])

    def _cdf(self, x):
        cum = np.concatenate(([0.0], np.cumsum(self.probs)))
        cum[-1] = 1.0
        idx = np.searchsorted(self.values, x, side="right")
        return cum[idx]

    @property
    def mean(self) -> float:
        return math.fsum(v * q for v, q in self.atoms)

    def sample_from_uniform(self, u):
        u_arr = np.asarray(u, dtype=float)
        cum = np.cumsum(self.probs)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, u_arr, side="right")
        idx = np.minimum(idx, len(self.atoms) - 1)
        return _result(u, self.values[idx])

    def to_spec(self):
        return {"family": "atoms", "atoms": [[v, q] for v, q in self.atoms]}


def PointMass(value: float) -> DiscreteAtoms:
    """All mass on a single non-negative ``value``."""
    return DiscreteAtoms(((float(value), 1.0),))


_BISECT_MAX_ITER = 2200


def _bisect(fn, target, lo, hi):
    """Vectorised bisection for increasing ``fn``: smallest ``x`` with ``fn(x) >= target``."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not np.any(active):
            break
        below = fn(mid) < target
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
    return hi


@dataclass(frozen=True)
class Product(Distribution):
    """Distribution of the maximum of independent components: ``F(x) = prod F_i(x)``."""

    components: tuple[Distribution, ...]

    def __post_init__(self):
        if len(self.components) == 0:
            raise EmptyList("product of an empty list")
        for c in self.components:
            if not c.is_continuous:
                raise DiscreteComponent(f"product components must be continuous, got {c!r}")
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def _identical(self) -> bool:
        first = self.components[0]
        return all(c == first for c in self.components[1:])

    @property
    def support(self):
        return (max(c.support[0] for c in self.components), max(c.support[1] for c in self.components))

    def _cdf(self, x):
        if self._identical:
            return self.components[0]._cdf(x) ** len(self.components)
        out = np.ones_like(x, dtype=float)
        for c in self.components:
            out = out * c._cdf(x)
        return out

    def _sf(self, x):
        with np.errstate(divide="ignore"):
            if self._identical:
                logf = len(self.components) * np.log1p(-self.components[0]._sf(x))
            else:
                logf = sum(np.log1p(-c._sf(x)) for c in self.components)
        return -np.expm1(logf)

    def kinks(self):
        lo, hi = self.support
        points = set()
        for c in self.components:
            points.update(c.kinks())
            points.update(v for v in c.support if math.isfinite(v))
        return tuple(sorted(v for v in points if lo < v < hi))

    def _ppf(self, p):
        p = np.asarray(p, dtype=float)
        k = len(self.components)
        lo = np.max([c._ppf(p) for c in self.components], axis=0)
        hi = np.max([c._ppf(p ** (1.0 / k)) for c in self.components], axis=0)
        return _bisect(self._cdf, p, lo, hi)

    def _isf(self, t):
        t = np.asarray(t, dtype=float)
        k = len(self.components)
        # for t >= 1/2 the cdf carries the relative precision and 1 - t is exact
        low_tail = t >= 0.5
        out = np.empty_like(t)
        if np.any(low_tail):
            out[low_tail] = self._ppf(1.0 - t[low_tail])
        th = t[~low_tail]
        if th.size:
            lo = np.max([c._isf(th) for c in self.components], axis=0)
            hi = np.max([c._isf(th / k) for c in self.components], axis=0)
            # sf is decreasing, so bisect on -sf
            out[~low_tail] = _bisect(lambda x: -self._sf(x), -th, lo, hi)
        return out

    def to_spec(self):
        return {"family": "product", "components": [c.to_spec() for c in self.components]}


def product_distribution(ds: Sequence[Distribution]) -> Distribution:
    """Distribution of ``max`` of independent draws from ``ds``; a single factor is returned as is."""
    ds = tuple(ds)
    if len(ds) == 0:
        raise EmptyList("product of an empty list")
    for d in ds:
        if not d.is_continuous:
            raise DiscreteComponent(f"product components must be continuous, got {d!r}")
    if len(ds) == 1:
        return ds[0]
    return Product(ds)


_FAMILIES = {
    "uniform": (Uniform, 2),
    "exponential": (Exponential, 1),
    "pareto": (Pareto, 2),
}


def make_distribution(spec) -> Distribution:
    """Build a distribution from a JSON-style dict or a ``(family, *params)`` tuple.

    >>> make_distribution(("uniform", 0, 1)).cdf(0.5)
    0.5
    >>> make_distribution({"family": "exponential", "params": [2.0]}).rate
    2.0
    """
    if isinstance(spec, Distribution):
        return spec
    if isinstance(spec, (tuple, list)):
        if not spec:
            raise InvalidParameters("empty distribution spec")
        family, params = spec[0], list(spec[1:])
        spec = {"family": family, "params": params}
    if not isinstance(spec, dict) or "family" not in spec:
        raise InvalidParameters(f"distribution spec must name a family: {spec!r}")
    family = str(spec["family"]).lower()
    if family in _FAMILIES:
        cls, arity = _FAMILIES[family]
        params = spec.get("params", [])
        if len(params) != arity:
            raise InvalidParameters(f"{family} takes {arity} parameters, got {len(params)}")
        try:
            return cls(*(float(v) for v in params))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidParameters):
                raise
            raise InvalidParameters(f"bad {family} parameters {params!r}: {exc}") from None
    if family in ("piecewise_linear", "empirical"):
        params = spec.get("params")
        if "samples" in spec:
            return PiecewiseLinear.from_samples(spec["samples"])
        if not params or len(params) != 2:
            raise InvalidParameters("piecewise_linear takes [xs, ps] or 'samples'")
        return PiecewiseLinear(tuple(params[0]), tuple(params[1]))
    if family == "atoms":
        atoms = spec.get("atoms")
        if atoms is None:
            raise InvalidParameters("atoms family needs an 'atoms' list")
        return DiscreteAtoms(tuple(tuple(a) for a in atoms))
    if family in ("point_mass", "pointmass"):
        params = spec.get("params", [])
        if len(params) != 1:
            raise InvalidParameters("point_mass takes one parameter")
        return PointMass(float(params[0]))
    if family == "product":
        comps = spec.get("components")
        if comps is None:
            raise InvalidParameters("product family needs a 'components' list")
        return product_distribution([make_distribution(c) for c in comps])
    raise UnknownFamily(f"unknown distribution family {spec['family']!r}")


# free-function forms of the methods
def cdf(d: Distribution, x):
    return d.cdf(x)


def quantile(d: Distribution, p):
    return d.quantile(p)


def partial_expectation(d: Distribution, p):
    return d.partial_expectation(p)


def sample(d: Distribution, rng: np.random.Generator, size=None):
    return d.sample(rng, size)
