"""Fibonacci-modulated orthogonal polynomials on the unit circle.

Substitution words, the Fibonacci trace map, Szego transfer matrices, band
approximants of the essential spectrum, box-counting dimension estimates and
CMV truncations for Verblunsky coefficients taking two values along the
Fibonacci fixed point.
"""

__version__ = "0.1.0"

from .arcs import ArcSet, arcset_algebra, circular_distance
from .cmv import (
    CmvMatrix,
    build_cmv,
    fibonacci_coefficients,
    paraorthogonal_zeros,
    periodic_coefficients,
    unitarity_defect,
)
from .dimension import (
    DimensionEstimate,
    box_counting_dimension,
    bracket_from_invariant,
    local_dimension,
    small_invariant_trend,
)
from .errors import InputError, NumericalFailure, NumericalRangeError, ResourceError
from .opuc import (
    VerblunskyPair,
    circle_point,
    design_for_max_invariant,
    gamma_curve,
    invariant_extremes,
    invariant_on_circle,
)
from .spectrum import b_infinity_approx, band_set, invariant_nonnegativity_check, window_constant
from .tracemap import (
    OrbitKind,
    OrbitVerdict,
    Point3,
    apply_T,
    apply_T_inverse,
    fricke_vogt_invariant,
    iterate,
    orbit_classify,
    period_two_point,
    semiconjugacy_F,
    symmetry,
)
from .transfer import (
    empirical_growth_exponent,
    growth_exponent_bound,
    normalized_fib_trace,
    point_mass_divergence_check,
    trace_sequence,
    transfer_norm_fast,
    transfer_product,
)
from .words import FibWord, fib_number, fixed_point_prefix, is_cyclic_permutation, zeckendorf
