"""CMV truncations and the zeros of para-orthogonal polynomials."""

import numpy as np

from fibcmv.cmv import build_cmv, fibonacci_coefficients, paraorthogonal_zeros, unitarity_defect
from fibcmv.opuc import VerblunskyPair
from fibcmv.words import fib_number
from fibcmv.spectrum import band_set

pair = VerblunskyPair(0.3, 0.6j)
m = build_cmv(fibonacci_coefficients(pair, 200), 200, source="fixed-point prefix")
print(m.to_dict(), "interior unitarity defect", unitarity_defect(m))

# With all coefficients zero the zeros are the n-th roots of conj(lambda).
print(np.round(paraorthogonal_zeros(np.zeros(6)) / np.pi, 12), "(units of pi)")

for level in (8, 10, 12):
    n = fib_number(level)
    zeros = paraorthogonal_zeros(pair, n)
    bands = band_set(pair, level).union(band_set(pair, level + 1))
    print(f"n = {n:3d}: {zeros.size} zeros, {bands.contains(zeros).mean():.3f} inside sigma_{level} u sigma_{level + 1}")
