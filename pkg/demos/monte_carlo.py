"""Simulated cosine rule checked against its exact value.

Draws 10^6 sequences of ten U(0,1) values with a fixed seed and compares the
sample mean and the no-pick frequency with their exact counterparts.
"""

import math

from prophet_thresholds import InstanceSequence, Uniform, cosine_schedule, expected_alg, run_policy, solve_a

U = Uniform(0.0, 1.0)
s = cosine_schedule(U, 10)
r = run_policy(InstanceSequence.iid(U, 10), s.thetas, 10**6, seed=0x5EED, workers=4)

exact = expected_alg(U, s)
print(f"simulated E[X_tau] = {r.mean:.6f} +- {r.stderr:.6f}")
print(f"exact     E[X_tau] = {exact:.6f}  (z = {(r.mean - exact) / r.stderr:+.2f})")

cos_a = math.cos(solve_a().a)
print(f"P[no pick] simulated {r.stops[-1] / r.trials:.5f}, exact cos(a) = {cos_a:.5f}")
print("stops by position:", r.stops)
