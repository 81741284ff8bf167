"""Grid certification of the function-level inequalities behind the cosine schedule.

Each check evaluates ``LHS - RHS`` on a grid and reports the smallest margin
and where it occurs.  A check passes when that minimum is at least
``-tolerance``.  This is numerical evidence, not a proof: a failing verdict for
a user-supplied ``h`` means "not certified on this grid".
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .quadrature import _NODES, _WEIGHTS, integrate
from .schedules import CosineParams, solve_a

DEFAULT_GRID = 10_000
EDGE_POINTS = 100
TOLERANCE = 1e-9
REFERENCE_A2_ROOTS = (0.28157, 1.24251, 2.27082)


@dataclass
class CertReport:
    property: str
    grid_size: int
    min_margin: float
    witness: float | list | None
    verdict: str
    tolerance: float = TOLERANCE
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return asdict(self)


def _report(name, margins, points, tolerance=TOLERANCE, details=None) -> CertReport:
    margins = np.asarray(margins, dtype=float).ravel()
    if np.any(np.isnan(margins)):
        i = int(np.flatnonzero(np.isnan(margins))[0])
        worst = -math.inf
    else:
        i = int(np.argmin(margins))
        worst = float(margins[i])
    witness = points[i] if points is not None else None
    if isinstance(witness, np.ndarray):
        witness = witness.tolist()
    elif witness is not None:
        witness = float(witness) if np.ndim(witness) == 0 else [float(v) for v in witness]
    verdict = "pass" if worst >= -tolerance else "fail"
    return CertReport(name, int(margins.size), worst, witness, verdict, tolerance, details or {})


def certification_grid(lo: float, hi: float, size: int = DEFAULT_GRID, edge: int = EDGE_POINTS) -> np.ndarray:
    """``size`` uniform points on ``[lo, hi]`` plus ``edge`` geometrically packed points near each end."""
    uniform = np.linspace(lo, hi, size)
    if edge <= 0:
        return uniform
    width = hi - lo
    offsets = width * np.geomspace(1e-12, 1e-2, edge)
    return np.unique(np.concatenate([uniform, lo + offsets, hi - offsets]))


@dataclass(frozen=True)
class Profile:
    """A candidate ``h`` on ``[0, 1]`` with optional analytic derivative and property-ii step."""

    name: str
    h: Callable
    dh: Callable | None = None
    delta0: Callable[[float], float] | None = None

    def derivative(self, s):
        if self.dh is not None:
            return np.asarray(self.dh(s), dtype=float)
        step = 1e-6
        s = np.asarray(s, dtype=float)
        return (np.asarray(self.h(s + step)) - np.asarray(self.h(s - step))) / (2 * step)


def cosine_profile(params: CosineParams | None = None) -> Profile:
    p = params or solve_a()
    a = p.a

    def delta0(eps):
        return eps * math.tan(a * eps) / (a * (1 - eps) / math.cos(a) ** 2)

    return Profile("cosine", p.h, p.dh, delta0)


def exp_decay_profile() -> Profile:
    return Profile("exp-decay", lambda s: np.exp(-np.asarray(s, dtype=float)), lambda s: -np.exp(-np.asarray(s, dtype=float)))


def linear_increase_profile() -> Profile:
    return Profile("linear-increase", lambda s: 1.0 + np.asarray(s, dtype=float), lambda s: np.ones_like(np.asarray(s, dtype=float)))


PROFILES = {
    "cosine": cosine_profile,
    "exp-decay": exp_decay_profile,
    "linear-increase": linear_increase_profile,
}


def _as_profile(h, dh=None) -> Profile:
    if isinstance(h, Profile):
        return h
    return Profile(getattr(h, "__name__", "h"), h, dh)


def certify_threshold_function(h, dh=None, grid_size: int = DEFAULT_GRID, delta0=None, tolerance: float = TOLERANCE) -> list[CertReport]:
    """Normalisation, range, strict decrease, midpoint concavity and the log-derivative ratio condition."""
    prof = _as_profile(h, dh)
    if delta0 is not None:
        prof = Profile(prof.name, prof.h, prof.dh, delta0)
    s = certification_grid(0.0, 1.0, grid_size)
    hs = np.asarray(prof.h(s), dtype=float)
    reports = [
        _report("threshold-normalized", [-abs(float(prof.h(0.0)) - 1.0)], [0.0], tolerance),
        _report("threshold-range", np.minimum(hs, 1.0 - hs), s, tolerance),
        _report("threshold-decreasing", hs[:-1] - hs[1:], s[:-1], tolerance),
    ]

    # midpoint test over pairs (x_i - d, x_i + d) at dyadic spacings of a uniform grid
    u = np.linspace(0.0, 1.0, grid_size)
    hu = np.asarray(prof.h(u), dtype=float)
    margins, points = [], []
    step = 1
    while 2 * step < grid_size:
        mid = np.arange(step, grid_size - step)
        hm = np.asarray(prof.h(0.5 * (u[mid - step] + u[mid + step])), dtype=float)
        margins.append(hm - 0.5 * (hu[mid - step] + hu[mid + step]))
        points.append(np.column_stack([u[mid - step], u[mid + step]]))
        step *= 2
    reports.append(_report("threshold-concave", np.concatenate(margins), np.concatenate(points), tolerance))

    margins, points = [], []
    for eps in (0.1, 0.05, 0.01):
        d0 = prof.delta0(eps) if prof.delta0 is not None else eps / 10.0
        d0 = min(d0, eps)
        for delta in (d0, d0 / 2, d0 / 10):
            ss = np.linspace(eps + delta, 1.0, max(grid_size // 10, 10))
            left = prof.derivative(ss - delta) / np.asarray(prof.h(ss - delta), dtype=float)
            right = (1 - eps) * prof.derivative(ss) / np.asarray(prof.h(ss), dtype=float)
            margins.append(right - left)
            points.append(np.column_stack([np.full_like(ss, eps), np.full_like(ss, delta), ss]))
    reports.append(
        _report(
            "threshold-ratio",
            np.concatenate(margins),
            np.concatenate(points),
            tolerance,
            details={"delta0_rule": "analytic" if prof.delta0 is not None else "eps/10"},
        )
    )
    return reports


def _tail_integrals(h: Callable, s: np.ndarray) -> np.ndarray:
    """``int_{s_i}^1 h`` for a sorted grid ending at 1, by Gauss-Legendre on each gap."""
    pts = np.concatenate([s, [1.0]]) if s[-1] < 1.0 else s
    lo, hi = pts[:-1], pts[1:]
    half = 0.5 * (hi - lo)
    x = (lo + half)[:, None] + half[:, None] * _NODES[None, :]
    pieces = half * (np.asarray(h(x.ravel()), dtype=float).reshape(x.shape) @ _WEIGHTS)
    tails = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    return tails[: len(s)]


def alpha_strong_margin(prof: Profile, alpha: float, s: np.ndarray) -> np.ndarray:
    """``1 - h - (h'/h) int_s^1 h - alpha (1 - exp(h'/h))`` at each ``s``."""
    hs = np.asarray(prof.h(s), dtype=float)
    ratio = prof.derivative(s) / hs
    return 1.0 - hs - ratio * _tail_integrals(prof.h, s) - alpha * (-np.expm1(ratio))


def certify_alpha_strong(h, dh=None, alpha: float | None = None, grid_size: int = DEFAULT_GRID, tolerance: float = TOLERANCE) -> list[CertReport]:
    """The three alpha-strong properties; ``alpha`` defaults to ``1 - cos(a)``."""
    prof = _as_profile(h, dh)
    if alpha is None:
        alpha = solve_a().alpha
    h1 = float(prof.h(1.0))
    area = integrate(lambda r: np.asarray(prof.h(r), dtype=float), 0.0, 1.0, rtol=1e-13)
    s = certification_grid(0.0, 1.0, grid_size)
    return [
        _report("alpha-strong-i", [(1.0 - alpha) - h1], [1.0], tolerance, {"h(1)": h1, "alpha": alpha}),
        _report("alpha-strong-ii", [area.value - alpha], [None], tolerance, {"integral": area.value, "quad_error": area.error, "alpha": alpha}),
        _report("alpha-strong-iii", alpha_strong_margin(prof, alpha, s), s, tolerance, {"alpha": alpha}),
    ]


class AFunction:
    """``A(w) = (1 - alpha + alpha a w + alpha e^{-a w})^2 - 1 - w^2`` and its first three derivatives."""

    def __init__(self, params: CosineParams | None = None):
        p = params or solve_a()
        self.a, self.alpha = p.a, p.alpha

    def __call__(self, w):
        a, al = self.a, self.alpha
        w = np.asarray(w, dtype=float)
        return (1 - al + al * a * w + al * np.exp(-a * w)) ** 2 - 1 - w**2

    def d1(self, w):
        a, al = self.a, self.alpha
        w = np.asarray(w, dtype=float)
        return 2 * al * a * (-np.expm1(-a * w)) * (1 - al + al * a * w + al * np.exp(-a * w)) - 2 * w

    def d2(self, w):
        a, al = self.a, self.alpha
        w = np.asarray(w, dtype=float)
        e = np.exp(-a * w)
        return 2 * al * a**2 * e * (1 - 3 * al + al * a * w + 2 * al * e) + 2 * (al**2 * a**2 - 1)

    def d3(self, w):
        a, al = self.a, self.alpha
        w = np.asarray(w, dtype=float)
        e = np.exp(-a * w)
        return -2 * al * a**3 * e * (1 - 4 * al + al * a * w + 4 * al * e)


def _sign_change_roots(f, df, lo, hi, size=100_000) -> list[float]:
    w = np.linspace(lo, hi, size + 1)
    v = f(w)
    idx = np.flatnonzero(np.signbit(v[:-1]) != np.signbit(v[1:]))
    roots = []
    for i in idx:
        left, right = float(w[i]), float(w[i + 1])
        f_left = float(f(left))
        while right - left > 1e-15 * max(1.0, abs(left)):
            mid = 0.5 * (left + right)
            if mid in (left, right):
                break
            f_mid = float(f(mid))
            if np.signbit(f_mid) == np.signbit(f_left):
                left, f_left = mid, f_mid
            else:
                right = mid
        r = 0.5 * (left + right)
        d = float(df(r))
        if d != 0.0:
            polished = r - float(f(r)) / d
            if abs(float(f(polished))) <= abs(float(f(r))):
                r = polished
        roots.append(r)
    return roots


def certify_A(grid_size: int = DEFAULT_GRID, params: CosineParams | None = None, tolerance: float = TOLERANCE) -> tuple[CertReport, dict]:
    """Non-negativity of ``A`` on ``[0, tan(a)]`` plus the derivative facts the sign argument uses."""
    A = AFunction(params)
    w_hi = math.tan(A.a)
    w = certification_grid(0.0, w_hi, grid_size)
    report = _report("A-nonnegative", A(w), w, tolerance)
    fine = certification_grid(0.0, w_hi, 4 * grid_size)
    fine_min = float(np.min(A(fine)))
    roots = _sign_change_roots(A.d2, A.d3, 0.0, w_hi)
    roots_report = {
        "A2_roots": roots,
        "A2_at_roots": [float(A.d2(r)) for r in roots],
        "A1_at_roots": [float(A.d1(r)) for r in roots],
        "reference_roots": list(REFERENCE_A2_ROOTS),
        "root_deviation": [abs(r - p) for r, p in zip(roots, REFERENCE_A2_ROOTS)] if len(roots) == 3 else None,
        "A1_at_0": float(A.d1(0.0)),
        "A2_at_0": float(A.d2(0.0)),
        "A_at_0": float(A(0.0)),
        "A_at_tan_a": float(A(w_hi)),
        "tan_a": w_hi,
        "refined_min": fine_min,
        "refinement_change": abs(fine_min - report.min_margin),
    }
    report.details = dict(roots_report)
    return report, roots_report


def certify_auxiliary(z_grid=None, t_grid=None, tolerance: float = 1e-12) -> CertReport:
    """``(1 - e^{z t}) / (1 - e^{z}) <= t`` for ``z < 0`` and ``t >= 1``."""
    z = np.asarray(z_grid if z_grid is not None else -np.geomspace(1e-8, 50.0, 10_000), dtype=float)
    t = np.asarray(t_grid if t_grid is not None else np.concatenate([[1.0], np.geomspace(1.0 + 1e-9, 1e3, 999)]), dtype=float)
    if np.any(z >= 0) or np.any(t < 1):
        raise ValueError("need z < 0 and t >= 1")
    worst, witness = math.inf, None
    for tv in t:
        margin = tv - np.expm1(z * tv) / np.expm1(z)
        i = int(np.argmin(margin))
        if margin[i] < worst:
            worst, witness = float(margin[i]), [float(z[i]), float(tv)]
    verdict = "pass" if worst >= -tolerance else "fail"
    return CertReport("auxiliary", int(z.size * t.size), worst, witness, verdict, tolerance)


def opt_upperbound_margins(n: int, z: np.ndarray):
    """Margins of ``1-(1-z)^n <= 1-exp(-nz/(1-z))`` and of the two-case ratio bound, plus the ratios."""
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        e_a = -np.expm1(-n * z / (1.0 - z))
        e_b = -np.expm1(-n * z)
        exact = -np.expm1(n * np.log1p(-z))
        chain = e_a - exact
        ratio = np.where(z > 0, e_a / e_b, 1.0)
    ln_n = math.log(n)
    bound = np.where(z >= ln_n / n, 1.0 / (1.0 - 1.0 / n), 1.0 / (1.0 - 2.0 * ln_n / n + ln_n**2 / n**2))
    return chain, bound - ratio, ratio


def certify_opt_upperbound(n_grid=None, z_grid=None, tolerance: float = 1e-12) -> list[CertReport]:
    n_values = [int(v) for v in (n_grid if n_grid is not None else [2, 3, 5, 10, 20, 50, 100, 1000, 10_000, 100_000])]
    if any(v < 2 for v in n_values):
        raise ValueError("n must be at least 2")
    if z_grid is None:
        z = np.unique(np.concatenate([[0.0], np.geomspace(1e-9, 1.0 - 1e-9, 10_000)]))
    else:
        z = np.asarray(z_grid, dtype=float)
    chain_m, ratio_m, pts, worst_ratio = [], [], [], {}
    for n in n_values:
        chain, margin, ratio = opt_upperbound_margins(n, z)
        chain_m.append(chain)
        ratio_m.append(margin)
        pts.append(np.column_stack([np.full_like(z, n), z]))
        worst_ratio[n] = float(np.max(ratio))
    pts = np.concatenate(pts)
    return [
        _report("opt-upperbound-chain", np.concatenate(chain_m), pts, tolerance),
        _report("opt-upperbound-ratio", np.concatenate(ratio_m), pts, tolerance, {"worst_ratio": {str(k): v for k, v in worst_ratio.items()}}),
    ]


def certify_all(profile: Profile | None = None, grid_size: int = DEFAULT_GRID) -> list[CertReport]:
    """Default suite for the CLI: threshold and alpha-strong checks for ``profile`` plus the ``A`` and supporting inequality grids."""
    prof = profile or cosine_profile()
    reports = certify_threshold_function(prof, grid_size=grid_size)
    reports += certify_alpha_strong(prof, grid_size=grid_size)
    if prof.name == "cosine":
        reports.append(certify_A(grid_size)[0])
        reports.append(certify_auxiliary())
        reports += certify_opt_upperbound()
    return reports
