"""Band approximations of the spectrum shrinking towards a Cantor set."""

from fibcmv.opuc import design_for_max_invariant
from fibcmv.spectrum import b_infinity_approx, band_set

pair = design_for_max_invariant(24)
print(" n  arcs(sigma_n)  measure(sigma_n u sigma_n+1)")
for n in range(1, 15):
    union = band_set(pair, n).union(band_set(pair, n + 1))
    print(f"{n:2d}  {len(band_set(pair, n)):12d}  {union.measure():.6f}")

prev = b_infinity_approx(pair, 6)
for n in (8, 10, 12, 14):
    cur = b_infinity_approx(pair, n)
    print(f"Hausdorff distance between levels {n - 2} and {n}: {prev.hausdorff_distance(cur):.3e}")
    prev = cur
