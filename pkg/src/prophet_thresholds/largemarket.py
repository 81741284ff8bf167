"""Non-iid instances in which every distribution repeats many times.

Covers frequency analysis, grouping a multiset into identical blocks (best
order), block thresholds computed from the product distribution of one block,
the random-order pipeline that rebalances a random permutation into blocks,
the discard inequality and the worst-order hardness instance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .distributions import DiscreteAtoms, Distribution, PointMass, product_distribution
from .errors import (
    DiscreteComponent,
    EmptyInstance,
    InvalidEps,
    NotPartitioned,
    SubsetMissingType,
    TooFewCopies,
)
from .instances import InstanceSequence
from .schedules import CosineParams, cosine_schedule
from .simulator import DEFAULT_SEED, _Moments, block_rng, draw_values, run_prophet, stopping_payoff

__all__ = [
    "InstanceSequence",
    "frequency",
    "build_partitioned",
    "block_distribution",
    "partitioned_thresholds",
    "random_order_experiment",
    "RandomOrderReport",
    "union_bound",
    "discard_check",
    "DiscardCheck",
    "hardness_instance",
    "HardnessInstance",
    "hardness_summary",
    "discrete_dp_value",
    "discrete_expected_max",
    "enumerate_expected_max",
]


def frequency(seq: InstanceSequence) -> int:
    """Smallest number of copies of any type: the largest ``m`` for which ``seq`` is m-frequent."""
    if len(seq) == 0:
        raise EmptyInstance("instance has no items")
    return min(seq.counts().values())


def _ordered_types(seq: InstanceSequence) -> list:
    return sorted(seq.types(), key=lambda t: (not isinstance(t, (int, float)), t if isinstance(t, (int, float)) else str(t)))


def build_partitioned(multiset: InstanceSequence, s: int) -> tuple[InstanceSequence, int]:
    """Group the items into ``s`` identical blocks, dropping the copies that do not divide evenly.

    Each block holds ``floor(m_t / s)`` copies of type ``t`` in ascending type
    order.  Returns the partitioned sequence and the number of dropped items.
    """
    if int(s) != s or s < 1:
        raise ValueError(f"block count must be a positive integer, got {s!r}")
    s = int(s)
    if len(multiset) == 0:
        raise EmptyInstance("instance has no items")
    counts = multiset.counts()
    short = {t: c for t, c in counts.items() if c < s}
    if short:
        raise TooFewCopies(f"types with fewer than {s} copies: {short}")
    types = multiset.types()
    block_ids: list = []
    for t in _ordered_types(multiset):
        block_ids.extend([t] * (counts[t] // s))
    ids = tuple(block_ids) * s
    items = tuple(types[t] for t in ids)
    discarded = len(multiset) - len(ids)
    return InstanceSequence(items, ids, partition=(len(block_ids), s)), discarded


def block_distribution(seq: InstanceSequence) -> Distribution:
    if seq.partition is None:
        raise NotPartitioned("sequence carries no partition metadata")
    k, _ = seq.partition
    block = seq.items[:k]
    for d in block:
        if not d.is_continuous:
            raise DiscreteComponent(f"block distributions must be continuous, got {d!r}")
    return product_distribution(block)


def partitioned_thresholds(seq: InstanceSequence, params: CosineParams | None = None) -> np.ndarray:
    """Per-item thresholds: the cosine schedule for ``m`` iid draws of one block's maximum, repeated ``k`` times."""
    dist = block_distribution(seq)
    k, m = seq.partition
    sched = cosine_schedule(dist, m, params)
    return np.repeat(sched.thetas, k)


def union_bound(s: int, n: int, m: int, delta: float) -> float:
    """``3 s (n/m) exp(-delta^2 m / (3 s))``: chance that some type is short in some block."""
    return 3.0 * s * (n / m) * math.exp(-(delta**2) * m / (3.0 * s))


@dataclass
class RandomOrderReport:
    trials: int
    seed: int
    s: int
    delta: float
    failure_frequency: float
    union_bound: float
    balanced_trials: int
    mean_payoff: float
    mean_payoff_stderr: float
    prophet_mean: float
    prophet_stderr: float
    ratio: float
    per_block_kept: dict

    def to_dict(self) -> dict:
        out = asdict(self)
        out["per_block_kept"] = {str(k): v for k, v in self.per_block_kept.items()}
        return out


def random_order_experiment(
    multiset: InstanceSequence,
    s: int,
    delta: float,
    trials: int,
    seed: int = DEFAULT_SEED,
    params: CosineParams | None = None,
) -> RandomOrderReport:
    """Random arrival order: rebalance each permutation into ``s`` blocks and run the block thresholds.

    Per trial a uniform permutation is cut into ``s`` consecutive blocks.  The
    trial is balanced when every type ``t`` has at least ``(1 - delta) m_t / s``
    copies in every block; then only the first ``floor((1 - delta) m_t / s)``
    copies per block are kept and the threshold rule runs on the survivors in
    arrival order.  The prophet value is the maximum over the full multiset on
    the same draws.
    """
    if int(s) != s or s < 1:
        raise ValueError(f"block count must be a positive integer, got {s!r}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    n = len(multiset)
    if n == 0:
        raise EmptyInstance("instance has no items")
    s, trials = int(s), int(trials)
    types = _ordered_types(multiset)
    counts = multiset.counts()
    dists = multiset.types()
    keep = {t: math.floor((1.0 - delta) * counts[t] / s) for t in types}
    need = {t: (1.0 - delta) * counts[t] / s for t in types}
    if any(v < 1 for v in keep.values()):
        raise TooFewCopies(f"(1 - delta) m_t / s < 1 for some type: {keep}")

    kept_ids = [t for t in types for _ in range(keep[t])]
    kept_block = InstanceSequence(tuple(dists[t] for t in kept_ids) * s, tuple(kept_ids) * s, partition=(len(kept_ids), s))
    block_thetas = cosine_schedule(block_distribution(kept_block), s, params).thetas

    code = {t: j for j, t in enumerate(types)}
    labels = np.array([code[t] for t in multiset.type_ids])
    block_of = np.minimum((np.arange(n) * s) // n, s - 1)
    need_arr = np.array([need[t] for t in types])
    keep_arr = np.array([keep[t] for t in types])
    ntypes = len(types)

    rng = block_rng(seed, 0)
    chunk = max(1, min(trials, (1 << 22) // max(n * ntypes, 1)))
    failures = 0
    alg = _Moments(1)
    prophet = _Moments(1)
    done = 0
    while done < trials:
        count = min(chunk, trials - done)
        perm = rng.permuted(np.tile(np.arange(n), (count, 1)), axis=1)
        lab = labels[perm]
        onehot = lab[:, :, None] == np.arange(ntypes)[None, None, :]
        per_block = np.zeros((count, s, ntypes), dtype=np.int64)
        for b in range(s):
            per_block[:, b, :] = onehot[:, block_of == b, :].sum(axis=1)
        balanced = np.all(per_block >= need_arr[None, None, :] - 1e-12, axis=(1, 2))
        failures += int(count - balanced.sum())

        # running count of each type within its block decides who is kept
        rank = np.zeros((count, n), dtype=np.int64)
        for b in range(s):
            cols = block_of == b
            cum = np.cumsum(onehot[:, cols, :], axis=1)
            rank[:, cols] = np.take_along_axis(cum, lab[:, cols, None], axis=2)[:, :, 0]
        active = rank <= keep_arr[lab]

        vals_by_item = draw_values(multiset, rng, count)
        vals = np.take_along_axis(vals_by_item, perm, axis=1)
        thetas = block_thetas[block_of]
        payoff, _ = stopping_payoff(vals, thetas, active)
        prophet.add(vals.max(axis=1)[:, None])
        alg.add(payoff[balanced][:, None])
        done += count

    balanced_trials = trials - failures
    alg_var = float(alg.cov()[0, 0]) if balanced_trials > 1 else 0.0
    mean_payoff = float(alg.mean[0]) if balanced_trials else 0.0
    prophet_mean = float(prophet.mean[0])
    return RandomOrderReport(
        trials=trials,
        seed=int(seed),
        s=s,
        delta=float(delta),
        failure_frequency=failures / trials,
        union_bound=union_bound(s, n, min(counts.values()), delta),
        balanced_trials=balanced_trials,
        mean_payoff=mean_payoff,
        mean_payoff_stderr=math.sqrt(alg_var / balanced_trials) if balanced_trials else 0.0,
        prophet_mean=prophet_mean,
        prophet_stderr=math.sqrt(float(prophet.cov()[0, 0]) / trials),
        ratio=mean_payoff / prophet_mean if prophet_mean > 0 else 1.0,
        per_block_kept={t: keep[t] for t in types},
    )


@dataclass
class DiscardCheck:
    lhs: float
    rhs: float
    stderr: float
    passed: bool
    p: int
    k: int

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.passed))


def discard_check(multiset: InstanceSequence, subset: Sequence[int], trials: int, seed: int = DEFAULT_SEED) -> DiscardCheck:
    """Monte Carlo check of ``E[max over subset] >= (p/k) E[max over all]``.

    ``subset`` lists item indices; it must contain every type.  ``p`` and ``k``
    are the frequencies of the subset and of the full multiset.  Both sides use
    the same draws; the check passes when ``lhs >= rhs - 4 * stderr`` of the
    paired difference.
    """
    idx = np.asarray(sorted(set(int(i) for i in subset)), dtype=int)
    if idx.size == 0 or idx.min() < 0 or idx.max() >= len(multiset):
        raise ValueError("subset indices out of range")
    sub_types = {multiset.type_ids[i] for i in idx}
    missing = set(multiset.counts()) - sub_types
    if missing:
        raise SubsetMissingType(f"subset misses types {sorted(map(str, missing))}")
    k = frequency(multiset)
    sub = InstanceSequence(tuple(multiset.items[i] for i in idx), tuple(multiset.type_ids[i] for i in idx))
    p = frequency(sub)
    ratio = p / k
    moments = _Moments(2)
    done, block = 0, 0
    while done < trials:
        count = min(1 << 14, trials - done)
        vals = draw_values(multiset, block_rng(seed, block), count)
        full = vals.max(axis=1)
        part = vals[:, idx].max(axis=1)
        moments.add(np.column_stack([part, ratio * full]))
        done += count
        block += 1
    cov = moments.cov()
    lhs, rhs = (float(v) for v in moments.mean)
    stderr = math.sqrt(max(cov[0, 0] - 2 * cov[0, 1] + cov[1, 1], 0.0) / trials)
    return DiscardCheck(lhs, rhs, stderr, lhs >= rhs - 4.0 * stderr, p, k)


def discrete_dp_value(seq: InstanceSequence) -> float:
    """Optimal online value by backward induction: ``V_i = E[max(X_i, V_{i+1})]``."""
    v = 0.0
    for d in reversed(seq.items):
        if isinstance(d, DiscreteAtoms):
            v = math.fsum(q * max(x, v) for x, q in d.atoms)
        else:
            p = d.cdf(v)
            v = v * p + d.partial_expectation(p)
    return v


def discrete_expected_max(seq: InstanceSequence) -> float:
    """Exact ``E[max]`` for independent finite distributions via ``P(max <= x) = prod F_i(x)``."""
    support = sorted({x for d in seq.items for x, _ in _atoms(d)})
    below = 0.0
    total = []
    for x in support:
        at_most = 1.0
        for d in seq.items:
            at_most *= float(d.cdf(x))
        total.append(x * (at_most - below))
        below = at_most
    return math.fsum(total)


def enumerate_expected_max(seq: InstanceSequence, limit: int = 10**6) -> float:
    """Brute-force ``E[max]`` over every atom combination (at most ``limit`` of them)."""
    import itertools

    atom_lists = [_atoms(d) for d in seq.items]
    combos = math.prod(len(a) for a in atom_lists)
    if combos > limit:
        raise ValueError(f"{combos} atom combinations exceed the enumeration limit {limit}")
    total = []
    for combo in itertools.product(*atom_lists):
        prob = math.prod(q for _, q in combo)
        total.append(prob * max(x for x, _ in combo))
    return math.fsum(total)


def _atoms(d: Distribution):
    if not isinstance(d, DiscreteAtoms):
        raise TypeError(f"expected a finite distribution, got {d!r}")
    return d.atoms


@dataclass
class HardnessInstance:
    sequence: InstanceSequence
    exact_opt: float
    online_bound: float
    m: int
    eps: float

    @property
    def ratio_bound(self) -> float:
        return self.online_bound / self.exact_opt

    def __iter__(self):
        return iter((self.sequence, self.exact_opt, self.online_bound))


def hardness_instance(m: int, eps: float) -> HardnessInstance:
    """``m`` sure ones followed by ``m`` items worth ``1/eps`` with probability ``1 - (1 - eps)^(1/m)``.

    The prophet earns ``2 - eps`` while no online rule beats 1.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if not 0.0 < eps < 1.0:
        raise InvalidEps(f"eps must lie in (0, 1), got {eps!r}")
    m = int(m)
    zero_prob = (1.0 - eps) ** (1.0 / m)
    risky = DiscreteAtoms(((0.0, zero_prob), (1.0 / eps, 1.0 - zero_prob)))
    items = (PointMass(1.0),) * m + (risky,) * m
    seq = InstanceSequence(items, ("sure",) * m + ("risky",) * m)
    return HardnessInstance(seq, exact_opt=2.0 - eps, online_bound=1.0, m=m, eps=float(eps))


def hardness_summary(m: int, eps: float, trials: int = 10**6, seed: int = DEFAULT_SEED) -> dict:
    inst = hardness_instance(m, eps)
    sim = run_prophet(inst.sequence, trials, seed)
    return {
        "m": inst.m,
        "eps": inst.eps,
        "exact_opt": inst.exact_opt,
        "exact_opt_computed": discrete_expected_max(inst.sequence),
        "simulated_prophet": sim.mean,
        "simulated_prophet_stderr": sim.stderr,
        "online_dp_value": discrete_dp_value(inst.sequence),
        "online_bound": inst.online_bound,
        "ratio_bound": inst.ratio_bound,
        "trials": trials,
        "seed": seed,
    }
