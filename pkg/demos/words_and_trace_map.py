"""Substitution words and the trace map they induce.

Run with ``python3 demos/words_and_trace_map.py``.
"""

from fibcmv.tracemap import apply_T, fricke_vogt_invariant, iterate, orbit_classify, semiconjugacy_F
from fibcmv.words import fib_number, fixed_point_prefix, zeckendorf

# The fixed point of A -> AB, B -> A starts with the Fibonacci words.
for n in range(1, 7):
    print(f"f_{n} = {fib_number(n):2d}  {fixed_point_prefix(fib_number(n))}")

# Any length splits greedily into non-adjacent Fibonacci numbers.
for n in (100, 10**6):
    print(n, "=", " + ".join(map(str, zeckendorf(n).terms)))

# The trace map keeps the invariant I = x^2 + y^2 + z^2 - 2xyz - 1 fixed.
p = (0.4, -1.1, 0.9)
for k in range(4):
    q = iterate(p, k)
    print(f"T^{k}{p} = ({q.x:+.4f}, {q.y:+.4f}, {q.z:+.4f})  I = {fricke_vogt_invariant(q):.12f}")

# On the Cayley cubic (I = 0) the map is conjugate to a torus automorphism.
print("T(F(0.1, 0.2)) =", apply_T(semiconjugacy_F(0.1, 0.2)))
print("F(0.3, 0.1)    =", semiconjugacy_F(0.3, 0.1))

# Points far from the bounded core escape with a certificate.
print(orbit_classify((1.5, 1.6, 0.2), horizon=60, C=1.0))
