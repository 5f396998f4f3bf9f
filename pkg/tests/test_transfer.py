import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fibcmv.errors import InputError
from fibcmv.opuc import VerblunskyPair, design_for_max_invariant, invariant_on_circle
from fibcmv.spectrum import b_infinity_approx, band_set
from fibcmv.transfer import (
    GOLDEN,
    empirical_growth_exponent,
    fib_block_half_traces,
    fib_block_matrices,
    fib_block_norms,
    growth_exponent_bound,
    log_transfer_norm_fast,
    normalized_fib_trace,
    one_step_matrix,
    opnorm,
    point_mass_divergence_check,
    polynomials_at,
    trace_sequence,
    transfer_norm_fast,
    transfer_product,
)
from fibcmv.words import fib_number, fixed_point_prefix

rng = np.random.default_rng(11)

PAIRS = [
    VerblunskyPair(0, 0.6),
    VerblunskyPair(0.3, 0.6j),
    VerblunskyPair(0.5, -0.5),
    VerblunskyPair(-0.2 + 0.4j, 0.7),
    design_for_max_invariant(4),
]


def direct_product(pair, theta, n, lam=1.0):
    """Plain left-multiplication over the word read from its string form."""
    word = str(fixed_point_prefix(n))
    m = np.eye(2, dtype=complex)
    for c in word:
        a = lam * (pair.alpha if c == "A" else pair.beta)
        m = one_step_matrix(a, theta) @ m
    return m


def bisect_root(a):
    """Largest root of x^3 - a x - 1 by plain bisection on [max(1, sqrt a), 2 + a]."""
    f = lambda x: x**3 - a * x - 1
    lo, hi = max(1.0, math.sqrt(a)), 2.0 + a
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_one_step_examples():
    theta = 0.7
    w = cmath.exp(1j * theta)
    assert np.allclose(one_step_matrix(0, theta), np.diag([w, 1]))
    assert np.allclose(one_step_matrix(0.6, 0), np.array([[1, -0.6], [-0.6, 1]]) / 0.8)
    for _ in range(100):
        a = 0.95 * rng.uniform() * cmath.exp(2j * math.pi * rng.uniform())
        t = rng.uniform(0, 2 * math.pi)
        assert abs(np.linalg.det(one_step_matrix(a, t)) - cmath.exp(1j * t)) < 1e-14 / (1 - abs(a) ** 2)
    with pytest.raises(InputError):
        one_step_matrix(1.0, 0)


def test_opnorm_matches_svd():
    for _ in range(200):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert math.isclose(opnorm(m), np.linalg.svd(m, compute_uv=False)[0], rel_tol=1e-12)
        assert math.isclose(opnorm(1e200 * m), 1e200 * opnorm(m), rel_tol=1e-12)
        assert math.isclose(opnorm(1e-200 * m), 1e-200 * opnorm(m), rel_tol=1e-12)


def test_transfer_product_examples():
    p = VerblunskyPair(0.3, 0.6j)
    t = 1.1
    assert np.array_equal(transfer_product(p, t, 0), np.eye(2))
    assert np.allclose(transfer_product(p, t, 1), one_step_matrix(p.alpha, t), rtol=0, atol=1e-15)
    assert np.allclose(transfer_product(p, t, 2), one_step_matrix(p.beta, t) @ one_step_matrix(p.alpha, t), rtol=0, atol=1e-15)


def test_transfer_product_matches_direct_product_with_rotation():
    lam = cmath.exp(0.9j)
    for p in PAIRS:
        for n in (5, 17, 40):
            assert np.allclose(transfer_product(p, 2.3, n, lam), direct_product(p, 2.3, n, lam), rtol=1e-12, atol=1e-12)


def test_determinant_is_w_power():
    for p in PAIRS:
        for n in (1, 13, 77, 200):
            for lam in (1.0, cmath.exp(2.0j)):
                t = rng.uniform(0, 2 * math.pi)
                m = transfer_product(p, t, n, lam)
                # det is a difference of products of size ||T_n||^2, so that is its rounding scale
                scale = max(1.0, opnorm(m) ** 2)
                assert abs(np.linalg.det(m) - cmath.exp(1j * n * t)) <= 1e-10 * scale


def test_normalized_trace_examples():
    p = VerblunskyPair(0.3, 0.6j)
    for t in (0.0, 1.0, 4.0):
        assert math.isclose(normalized_fib_trace(p, t, 1), math.cos(t / 2) / p.rho, abs_tol=1e-14)
    assert math.isclose(normalized_fib_trace(VerblunskyPair(0, 0.6), 0.0, 2), 1.25, rel_tol=1e-14)
    with pytest.raises(InputError):
        normalized_fib_trace(p, 0.0, 21)


def test_trace_sequence_examples():
    s = trace_sequence(VerblunskyPair(0, 0.6), 0.0, 5)
    assert s.x(-1) == 1.25 and s.x(0) == 1.25 and s.x(1) == 1.0
    assert s.x(2) == 2 * 1 * 1.25 - 1.25
    s = trace_sequence(VerblunskyPair(0.3, 0.6j), math.pi, 5)
    assert abs(s.x(0)) < 1e-15 and abs(s.x(1)) < 1e-15
    assert math.isclose(s.x(2), -s.x(-1), rel_tol=1e-14)


def test_trace_sequence_saturates_with_flag():
    s = trace_sequence(design_for_max_invariant(24), 2.1, 1000)
    assert s.saturated
    assert all(abs(v) <= 1e100 for v in s.values)


def test_trace_recursion_and_invariant():
    for p in PAIRS:
        for t in rng.uniform(0, 2 * math.pi, size=10):
            s = trace_sequence(p, t, 60)
            v = s.values
            I = invariant_on_circle(p, t)
            for k in range(2, len(v)):
                assert v[k] == 2.0 * v[k - 1] * v[k - 2] - v[k - 3] if k >= 3 else True
                if max(abs(v[k]), abs(v[k - 1]), abs(v[k - 2])) < 1e6:
                    inv = v[k] ** 2 + v[k - 1] ** 2 + v[k - 2] ** 2 - 2 * v[k] * v[k - 1] * v[k - 2] - 1
                    assert abs(inv - I) <= 1e-9 * (1 + abs(I)) * max(1.0, v[k] ** 2)


def test_recursion_agrees_with_direct_products():
    thetas = np.linspace(0, 2 * math.pi, 100, endpoint=False) + 0.01
    for p in PAIRS:
        for t in thetas:
            s = trace_sequence(p, t, 12)
            for k in range(1, 13):
                x = s.x(k)
                assert abs(x - normalized_fib_trace(p, t, k)) <= 1e-8 * (1 + abs(x))


def test_traces_are_real_relative_to_their_size():
    # the absolute residue grows with |x_k|; relative to it the traces are real to rounding
    for p in PAIRS:
        for t in rng.uniform(0, 2 * math.pi, size=20):
            for k in range(1, 13):
                z = normalized_fib_trace(p, t, k, return_complex=True)
                assert abs(z.imag) <= 1e-9 * (1 + abs(z.real))


def test_polynomials_examples():
    phi, star = polynomials_at(VerblunskyPair(0, 0.6), 0.0, 1)
    assert np.allclose((phi, star), (1, 1))
    phi, star = polynomials_at(VerblunskyPair(0.6, 0), 0.0, 1)
    assert np.allclose((phi, star), (0.5, 0.5))
    with pytest.raises(InputError):
        polynomials_at(VerblunskyPair(0.6, 0), 0.0, 0)


def test_polynomial_star_has_equal_modulus():
    for p in PAIRS:
        for n in (1, 8, 50, 144):
            t = rng.uniform(0, 2 * math.pi)
            phi, star = polynomials_at(p, t, n)
            assert abs(abs(phi) - abs(star)) <= 1e-10 * abs(phi)
            # phi_n^* = w^n conj(phi_n) on the circle
            assert abs(star - cmath.exp(1j * n * t) * phi.conjugate()) <= 1e-10 * abs(phi)


def test_growth_bound_examples():
    r, _ = growth_exponent_bound(0)
    assert abs(r - GOLDEN) <= 1e-12
    r16, g16 = growth_exponent_bound(16)
    assert abs(r16**3 - 10 * r16 - 1) < 1e-12
    assert math.isclose(g16, math.log(math.sqrt(21) * 11 * r16) / math.log(GOLDEN), rel_tol=1e-14)
    r4, _ = growth_exponent_bound(4)
    assert abs(r4**3 - 6 * r4 - 1) < 1e-12
    with pytest.raises(InputError):
        growth_exponent_bound(-1)


@pytest.mark.parametrize("I", [0, 1, 4, 16, 100, 1e4])
def test_cubic_root_matches_bisection(I):
    r, _ = growth_exponent_bound(I)
    assert abs(r - bisect_root(2 + 2 * math.sqrt(I))) <= 1e-10


def test_block_norms_match_direct_products():
    for p in PAIRS:
        t = rng.uniform(0, 2 * math.pi)
        norms = fib_block_norms(p, t, 6)
        for k in range(1, 7):
            direct = opnorm(transfer_product(p, t, fib_number(k)))
            assert math.isclose(norms[k - 1], direct, rel_tol=1e-8)


def test_block_matrices_are_normalised_products():
    p = VerblunskyPair(0.3, 0.6j)
    t = 0.4
    for k, m in enumerate(fib_block_matrices(p, t, 8), start=1):
        f = fib_number(k)
        expected = cmath.exp(-0.5j * f * t) * transfer_product(p, t, f)
        assert np.allclose(m, expected, rtol=1e-10, atol=1e-12)
        assert math.isclose(opnorm(m), opnorm(np.linalg.inv(m)), rel_tol=1e-8)


def test_free_blocks_are_unitary():
    norms = fib_block_norms(VerblunskyPair(0, 1e-9), 1.3, 1)
    assert math.isclose(norms[0], 1.0, rel_tol=1e-12)


def test_half_traces_are_bounded_near_the_spectrum():
    # centres of B_16 track the spectrum for about 13 Fibonacci levels; beyond that they escape
    pair = design_for_max_invariant(4)
    for t in b_infinity_approx(pair, 16).centers():
        bound = 1 + math.sqrt(max(invariant_on_circle(pair, t), 0.0)) + 1e-6
        assert max(fib_block_half_traces(pair, t, 13)) <= bound


def test_half_traces_at_symmetric_band_centre():
    # theta = pi is the centre of a sigma_12 arc and lies in the spectrum (its orbit is periodic)
    pair = design_for_max_invariant(4)
    assert band_set(pair, 12).contains(math.pi)
    assert max(fib_block_half_traces(pair, math.pi, 25)) <= 1 + math.sqrt(4) + 1e-6


def test_fast_norm_examples():
    p = VerblunskyPair(0.3, 0.6j)
    t = 2.0
    norms = fib_block_norms(p, t, 15)
    for k in range(1, 16):
        assert math.isclose(transfer_norm_fast(p, t, fib_number(k)), norms[k - 1], rel_tol=1e-10)
    assert math.isclose(transfer_norm_fast(p, t, 100), opnorm(direct_product(p, t, 100)), rel_tol=1e-10)
    assert math.isclose(transfer_norm_fast(p, t, 1), opnorm(one_step_matrix(p.alpha, t)), rel_tol=1e-12)


def log_norm_direct(pair, theta, n):
    """Direct left-multiplication with the running scale split off into a log."""
    m = np.eye(2, dtype=complex)
    log_scale = 0.0
    for c in str(fixed_point_prefix(n)):
        m = one_step_matrix(pair.alpha if c == "A" else pair.beta, theta) @ m
        s = np.abs(m).max()
        m /= s
        log_scale += math.log(s)
    return log_scale + math.log(np.linalg.svd(m, compute_uv=False)[0])


def test_fast_norm_random_lengths():
    p = VerblunskyPair(-0.2 + 0.4j, 0.7)
    for n in rng.integers(1, 1001, size=50):
        t = rng.uniform(0, 2 * math.pi)
        direct = log_norm_direct(p, t, int(n))
        assert abs(log_transfer_norm_fast(p, t, int(n)) - direct) <= 1e-8 * max(1.0, direct)


def test_empirical_growth_examples():
    p = VerblunskyPair(0, 0.6)
    fit = empirical_growth_exponent(p, math.pi, 10**4)
    _, gamma = growth_exponent_bound(invariant_on_circle(p, math.pi))
    assert 0 <= fit.slope <= gamma + 0.5
    assert 0 <= fit.r_squared <= 1
    fit = empirical_growth_exponent(VerblunskyPair(0, 1e-6), 1.0, 10**4)
    assert fit.slope <= 0.05


def test_growth_off_spectrum_is_exponential():
    # at a gap point the norm grows exponentially in n, so log-log slope is large
    pair = design_for_max_invariant(24)
    fit = empirical_growth_exponent(pair, 2.1, 10**4)
    assert fit.slope > 10


def test_divergence_check_examples():
    pair = design_for_max_invariant(24)
    centers = band_set(pair, 12).centers()
    theta = centers[np.argmin(np.abs(centers - math.pi))]
    I = invariant_on_circle(pair, theta)
    C = 2 * (1 + math.sqrt(I)) + 1e-6
    d = point_mass_divergence_check(pair, theta, 1.0, 20)
    assert d.trace_bound <= C
    assert d.min_pair_norm >= 1 / (2 * C * math.sqrt(2))
    assert d.min_pair_norm >= 1 / (2 * d.trace_bound * math.sqrt(2))
    sums = [d.partial_sums[N] for N in (100, 1000, 10000)]
    assert sums[0] < sums[1] < sums[2]
    assert sums[2] / sums[0] >= 5


def test_divergence_check_validation():
    p = VerblunskyPair(0, 0.6)
    with pytest.raises(InputError):
        point_mass_divergence_check(p, 0.0, k_max=26)
    with pytest.raises(InputError):
        point_mass_divergence_check(p, 0.0, lam=2.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2 * math.pi), st.integers(1, 300))
def test_fast_norm_property(theta, n):
    p = VerblunskyPair(0.3, 0.6j)
    assert math.isclose(transfer_norm_fast(p, theta, n), opnorm(transfer_product(p, theta, n)), rel_tol=1e-8)
