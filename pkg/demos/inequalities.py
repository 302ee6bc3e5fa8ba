"""
The two functional inequalities behind the bounds
==================================================

Check the Poincare-type and trace inequalities on random profiles and
see how much room the constants leave.
"""

import numpy as np

from beamdecay.stability import poincare_check, random_spline_profile, trace_check

rng = np.random.default_rng(42)
length = 0.502

ratios, trace_ratios = [], []
for _ in range(1000):
    u = random_spline_profile(rng, length)
    p = poincare_check(u, length)
    t = trace_check(u, length)
    assert p.holds and t.holds
    ratios.append(p.lhs / p.rhs)
    trace_ratios.append(max(t.left, t.right) / t.rhs)

print(f"poincare: worst lhs/rhs = {max(ratios):.4f} over 1000 profiles")
print(f"trace:    worst lhs/rhs = {max(trace_ratios):.4f}")

# the half sine is the extremal shape for the hinged beam: lhs/rhs = 4/pi^4
x = np.linspace(0, length, 2001)
p = poincare_check(np.sin(np.pi * x / length), length)
print(f"half sine: {p.lhs / p.rhs:.5f} (4/pi^4 = {4 / np.pi**4:.5f})")
