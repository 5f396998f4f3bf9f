"""Local box-counting dimension near theta = pi against the closed-form brackets.

The last part is a stability diagnostic: nudging beta by 1e-3 should barely move
the estimate, since the dimension varies continuously with the invariant.
"""

import math

from fibcmv.dimension import bracket_from_invariant, box_counting_dimension, local_dimension, small_invariant_trend
from fibcmv.opuc import VerblunskyPair, design_for_max_invariant
from fibcmv.spectrum import b_infinity_approx

for M in (16, 24, 100):
    print(f"I = {M:>3}: bracket {bracket_from_invariant(M)}")

for M in (0.5, 4, 24):
    est = local_dimension(design_for_max_invariant(M), math.pi, 0.3, 14)
    print(f"M = {M:>4}: estimate {est.value:.4f}, r^2 {est.r_squared:.4f}, bracket {est.bracket}")

fit = small_invariant_trend([design_for_max_invariant(M) for M in (0.05, 0.1, 0.2, 0.4)], level=18)
print("1 - dim:", [round(c, 4) for c in fit.codims], "fitted constant", round(fit.constant, 4))

base = design_for_max_invariant(24)
nudged = VerblunskyPair(base.alpha, base.beta - 1e-3)
for label, p in (("beta", base), ("beta - 1e-3", nudged)):
    est = box_counting_dimension(b_infinity_approx(p, 12))
    print(f"global level-12 estimate with {label}: {est.value:.4f}")
