"""Szego transfer matrices: polynomial growth on the spectrum, exponential growth in a gap."""

import math

from fibcmv.opuc import design_for_max_invariant, invariant_on_circle
from fibcmv.spectrum import b_infinity_approx
from fibcmv.transfer import (
    empirical_growth_exponent,
    fib_block_half_traces,
    growth_exponent_bound,
    point_mass_divergence_check,
)

pair = design_for_max_invariant(4)
theta = math.pi  # the centre of a level-12 band; its trace orbit is periodic
inv = float(invariant_on_circle(pair, theta))
r, gamma = growth_exponent_bound(inv)
fit = empirical_growth_exponent(pair, theta, 10**4)
print(f"I = {inv:.4f}, block growth rate r = {r:.6f}, exponent bound {gamma:.3f}")
print(f"fitted log-log slope over Fibonacci n <= 1e4: {fit.slope:.4f} (r^2 {fit.r_squared:.3f})")
print("largest half trace over 25 blocks:", max(fib_block_half_traces(pair, theta, 25)), "<= 1 + sqrt(I) =", 1 + math.sqrt(inv))

chk = point_mass_divergence_check(pair, theta)
print(f"min pair norm {chk.min_pair_norm:.4f}, trace bound {chk.trace_bound:.4f}")
for n, s in chk.partial_sums.items():
    print(f"  sum_{{k <= {n}}} |phi_k|^2 = {s:.4g}")

# In the middle of the largest gap the norms grow exponentially, so the slope in log n is large.
lo, hi = max(b_infinity_approx(pair, 10).gaps(), key=lambda g: g[1] - g[0])
mid = (0.5 * (lo + hi)) % (2 * math.pi)  # the gap may wrap through theta = 0
gap_fit = empirical_growth_exponent(pair, mid, 10**4)
print(f"slope at theta = {mid:.4f}, the centre of the largest gap: {gap_fit.slope:.1f}")
