"""The trace-map invariant along the curve of initial traces, and how to design a pair for it."""

import numpy as np

from fibcmv.opuc import VerblunskyPair, design_for_max_invariant, gamma_curve, invariant_extremes, invariant_on_circle

pair = VerblunskyPair(0.3, 0.6j)
print(pair, "rho", pair.rho, "sigma", pair.sigma, "z0", pair.z0)
for t in np.linspace(0, np.pi, 5):
    print(f"theta = {t:.3f}  start = {tuple(round(v, 4) for v in gamma_curve(pair, t))}  I = {invariant_on_circle(pair, t):+.5f}")

# I is affine in cos(theta), so the extremes sit at theta = 0 and theta = pi.
print("I(0), I(pi) =", invariant_extremes(pair))

# alpha = 0 and beta^2 = M / (M + 1) put I between 0 and exactly M.
for M in (0.05, 4, 24):
    p = design_for_max_invariant(M)
    print(f"M = {M:>5}: beta = {p.beta.real:.6f}, extremes {invariant_extremes(p)}")

# When |Re(conj(alpha) beta)| < |alpha beta| the invariant dips below zero at theta = 0.
print("I(0) for (0.3, 0.3i):", invariant_on_circle(VerblunskyPair(0.3, 0.3j), 0.0))
