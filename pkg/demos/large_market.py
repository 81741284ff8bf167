"""Large markets: partitioned sequences in best order and random arrival order.

A block {U(0,1), Exp(1)} repeated m = 200 times receives one threshold per block
from the cosine schedule of the block maximum. Then 200 copies of each type
arrive in random order and are split into s = 4 blocks.
"""

from prophet_thresholds import Exponential, InstanceSequence, Uniform, estimate_factor, expected_max
from prophet_thresholds.largemarket import block_distribution, partitioned_thresholds, random_order_experiment

U, E = Uniform(0.0, 1.0), Exponential(1.0)
m = 200
seq = InstanceSequence((U, E) * m, partition=(2, m))
thetas = partitioned_thresholds(seq)
est = estimate_factor(seq, thetas, 200_000, seed=1, workers=4)
print(f"best order, m={m}: exact E[max] {expected_max(block_distribution(seq), m):.5f}, "
      f"simulated {est.prophet.mean:.5f}; factor {est.factor:.4f} +- {est.stderr:.4f}")

ms = InstanceSequence((U,) * 200 + (E,) * 200, ("U",) * 200 + ("E",) * 200)
rep = random_order_experiment(ms, s=4, delta=1 / 3, trials=10_000, seed=2)
print(f"random order: imbalance frequency {rep.failure_frequency:.4f} "
      f"(union bound {rep.union_bound:.3f}), ratio {rep.ratio:.4f}, kept per block {rep.per_block_kept}")
