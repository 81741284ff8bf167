"""Worst-order hardness: m sure values of 1 followed by m risky values.

Any online rule earns at most 1 while the prophet earns 2 - eps, so the ratio
is near 1/2 regardless of how many copies there are.
"""

from prophet_thresholds.largemarket import hardness_summary

for m, eps in ((1, 0.5), (10, 0.1), (50, 0.05)):
    s = hardness_summary(m, eps, trials=200_000, seed=3)
    print(f"m={m:>3} eps={eps}: OPT {s['exact_opt']:.4f}, simulated {s['simulated_prophet']:.4f}, "
          f"online DP {s['online_dp_value']:.4f}, ratio {s['ratio_bound']:.4f}")
