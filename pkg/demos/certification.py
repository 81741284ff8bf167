"""Grid certification of the inequalities behind the cosine rule.

Prints one line per property with its smallest margin. The exponential profile
is included as a negative control that fails the first alpha-strong property.
"""

from prophet_thresholds.certify import certify_A, certify_all, exp_decay_profile

for label, reports in (("cos(a s)", certify_all()), ("exp(-s)", certify_all(exp_decay_profile()))):
    print(label)
    for r in reports:
        print(f"  {r.property:<24} {r.verdict:<5} min margin {r.min_margin: .3e}")

_, facts = certify_A()
print("roots of A'':", ", ".join(f"{w:.6f}" for w in facts["A2_roots"]))
