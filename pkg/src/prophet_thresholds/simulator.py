"""Seeded Monte Carlo runs of threshold policies on arbitrary item sequences.

Trials are grouped into fixed-size blocks.  Block ``b`` draws from its own
Philox stream keyed by ``(seed, b)``, so results are bit-identical for a given
``(seed, trials)`` whatever the number of workers; per-block statistics are
merged in block order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import LengthMismatch
from .instances import InstanceSequence

DEFAULT_SEED = 0x5EED
BLOCK_TRIALS = 1 << 14


@dataclass
class SimReport:
    mean: float
    stderr: float
    trials: int
    seed: int
    stops: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FactorEstimate:
    factor: float
    stderr: float
    alg: SimReport
    prophet: SimReport

    def __iter__(self):
        return iter((self.factor, self.stderr))


class _Moments:
    """Streaming first and second moments of paired samples, merged in call order."""

    def __init__(self, dim: int):
        self.count = 0
        self.mean = np.zeros(dim)
        self.comoment = np.zeros((dim, dim))

    def add(self, data: np.ndarray):
        """``data`` has shape ``(trials, dim)``."""
        m = len(data)
        if m == 0:
            return
        mu = data.mean(axis=0)
        centered = data - mu
        c = centered.T @ centered
        if self.count == 0:
            self.count, self.mean, self.comoment = m, mu, c
            return
        total = self.count + m
        delta = mu - self.mean
        self.comoment = self.comoment + c + np.outer(delta, delta) * self.count * m / total
        self.mean = self.mean + delta * m / total
        self.count = total

    def cov(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.comoment)
        return self.comoment / (self.count - 1)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(block),))))


def _blocks(trials: int):
    nblocks = -(-trials // BLOCK_TRIALS)
    for b in range(nblocks):
        yield b, min(BLOCK_TRIALS, trials - b * BLOCK_TRIALS)


def draw_values(seq: InstanceSequence, rng: np.random.Generator, trials: int) -> np.ndarray:
    """A ``(trials, n)`` array of independent item values."""
    u = rng.random((trials, len(seq)))
    out = np.empty_like(u)
    by_type: dict = {}
    for i, t in enumerate(seq.type_ids):
        by_type.setdefault(t, []).append(i)
    for t, cols in by_type.items():
        d = seq.items[cols[0]]
        out[:, cols] = d.sample_from_uniform(u[:, cols])
    return out


def stopping_payoff(values: np.ndarray, thetas: np.ndarray, active: np.ndarray | None = None):
    """Payoff and stopping index (1-based, ``n + 1`` for no pick) of the threshold rule per row.

    Ties ``X_i == theta_i`` accept.  ``active`` masks out items that are treated
    as absent.
    """
    accept = values >= thetas
    if active is not None:
        accept &= active
    picked = accept.any(axis=1)
    first = np.argmax(accept, axis=1)
    payoff = np.where(picked, values[np.arange(len(values)), first], 0.0)
    tau = np.where(picked, first + 1, values.shape[1] + 1)
    return payoff, tau


def _map_blocks(fn, trials: int, workers: int):
    blocks = list(_blocks(trials))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda bt: fn(*bt), blocks))
    return [fn(b, t) for b, t in blocks]


def _check(seq: InstanceSequence, thetas, trials: int) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=float).reshape(-1)
    if len(thetas) != len(seq):
        raise LengthMismatch(f"{len(thetas)} thresholds for {len(seq)} items")
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    return thetas


def _report(moments: _Moments, col: int, trials: int, seed: int, stops=None) -> SimReport:
    var = float(moments.cov()[col, col])
    return SimReport(
        mean=float(moments.mean[col]),
        stderr=math.sqrt(max(var, 0.0) / trials),
        trials=int(trials),
        seed=int(seed),
        stops=[] if stops is None else [int(v) for v in stops],
    )


def run_policy(seq: InstanceSequence, thetas: Sequence[float], trials: int, seed: int = DEFAULT_SEED, workers: int = 1) -> SimReport:
    """Simulate the rule "take the first ``X_i >= theta_i``" and summarise ``X_tau``."""
    thetas = _check(seq, thetas, trials)
    n = len(seq)

    def one(block, count):
        vals = draw_values(seq, block_rng(seed, block), count)
        payoff, tau = stopping_payoff(vals, thetas)
        return payoff, np.bincount(tau - 1, minlength=n + 1)

    moments = _Moments(1)
    stops = np.zeros(n + 1, dtype=np.int64)
    for payoff, hist in _map_blocks(one, trials, workers):
        moments.add(payoff[:, None])
        stops += hist
    return _report(moments, 0, trials, seed, stops)


def run_prophet(seq: InstanceSequence, trials: int, seed: int = DEFAULT_SEED, workers: int = 1) -> SimReport:
    """Simulate ``max_i X_i``."""
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")

    def one(block, count):
        return draw_values(seq, block_rng(seed, block), count).max(axis=1)

    moments = _Moments(1)
    for best in _map_blocks(one, trials, workers):
        moments.add(best[:, None])
    return _report(moments, 0, trials, seed)


def ratio_stderr(mean_a: float, mean_b: float, cov: np.ndarray, trials: int) -> float:
    """Delta-method standard error of ``mean_a / mean_b``."""
    r = mean_a / mean_b
    var = (cov[0, 0] - 2.0 * r * cov[0, 1] + r * r * cov[1, 1]) / mean_b**2
    return math.sqrt(max(var, 0.0) / trials)


def estimate_factor(
    seq: InstanceSequence,
    thetas: Sequence[float],
    trials: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    coupled: bool = True,
) -> FactorEstimate:
    """Ratio of simulated ``E[X_tau]`` to simulated ``E[max]``.

    With ``coupled`` (the default) both use the same draws in every trial.
    Otherwise the prophet side uses an independent stream and the covariance
    term drops out of the error estimate.
    """
    thetas = _check(seq, thetas, trials)
    n = len(seq)
    prophet_seed = seed if coupled else (int(seed) ^ 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF

    def one(block, count):
        vals = draw_values(seq, block_rng(seed, block), count)
        payoff, tau = stopping_payoff(vals, thetas)
        if coupled:
            best = vals.max(axis=1)
        else:
            best = draw_values(seq, block_rng(prophet_seed, block), count).max(axis=1)
        return np.column_stack([payoff, best]), np.bincount(tau - 1, minlength=n + 1)

    moments = _Moments(2)
    stops = np.zeros(n + 1, dtype=np.int64)
    for data, hist in _map_blocks(one, trials, workers):
        moments.add(data)
        stops += hist
    cov = moments.cov()
    if not coupled:
        cov = np.diag(np.diag(cov))
    mean_a, mean_b = moments.mean
    factor = mean_a / mean_b if mean_b > 0 else 1.0
    stderr = ratio_stderr(mean_a, mean_b, cov, trials) if mean_b > 0 else 0.0
    return FactorEstimate(
        float(factor),
        stderr,
        _report(moments, 0, trials, seed, stops),
        _report(moments, 1, trials, prophet_seed),
    )
