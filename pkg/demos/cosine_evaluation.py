"""Exact evaluation of the cosine threshold rule against the optimal and single-threshold rules.

For each n the three schedules are built on U(0,1) and Exp(1) and their
approximation factors E[X_tau] / E[max X_i] are computed by quadrature.
"""

from prophet_thresholds import Exponential, Uniform, approx_factor, build_schedule, solve_a

p = solve_a()
print(f"a = {p.a:.12f}, alpha = {p.alpha:.12f}\n")

for name, d in (("U(0,1)", Uniform(0.0, 1.0)), ("Exp(1)", Exponential(1.0))):
    print(name)
    print(f"{'n':>6} {'dp':>10} {'cosine':>10} {'single':>10}")
    for n in (1, 2, 5, 10, 100, 1000):
        row = [approx_factor(d, build_schedule(k, d, n)).factor for k in ("dp", "cosine", "single")]
        print(f"{n:>6} " + " ".join(f"{v:10.6f}" for v in row))
    print()

# the cosine rule stays above alpha as n grows, the single threshold drifts towards 1 - 1/e
