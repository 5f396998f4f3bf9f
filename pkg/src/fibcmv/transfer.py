"""Szego transfer matrices along the Fibonacci word and their growth.

``A(a, w) = (1 - |a|^2)^(-1/2) [[w, -conj(a)], [-a w, 1]]`` advances
``(phi_n, phi_n^*)`` by one site; ``T_n`` is the ordered product over the first
``n`` letters with site 0 as the rightmost factor.  The normalised Fibonacci
blocks ``M_k = exp(-i f_k theta / 2) T_{f_k}`` are unimodular and satisfy
``M_k = M_{k-2} M_{k-1}``; half their traces are the trace-map orbit ``x_k``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, NumericalRangeError
from .opuc import VerblunskyPair, gamma_curve_arrays
from .words import fib_number, fib_numbers_upto, fixed_point_letters, zeckendorf

OVERFLOW_BOUND = 1e150
SATURATION = 1e100
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def _w(theta: float) -> complex:
    return cmath.exp(1j * theta)


def one_step_matrix(alpha: complex, theta: float) -> np.ndarray:
    alpha = complex(alpha)
    if not abs(alpha) < 1.0:
        raise InputError(f"|alpha| must be < 1, got {abs(alpha)}")
    w = _w(theta)
    r = math.sqrt(1.0 - abs(alpha) ** 2)
    return np.array([[w, -alpha.conjugate()], [-alpha * w, 1.0]], dtype=complex) / r


def opnorm(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix, from its Gram invariants."""
    scale = float(np.abs(m).max())
    if scale == 0.0 or not math.isfinite(scale):
        return scale
    m = m / scale  # keeps the squared invariants inside the float range
    fro2 = float(np.sum(np.abs(m) ** 2))
    det = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    disc = max(fro2 * fro2 - 4.0 * det * det, 0.0)
    return scale * math.sqrt((fro2 + math.sqrt(disc)) / 2.0)


def _site_coefficients(pair: VerblunskyPair, n: int, lam: complex = 1.0) -> np.ndarray:
    letters = fixed_point_letters(n)
    return np.where(letters == 0, lam * pair.alpha, lam * pair.beta)


def transfer_product(pair: VerblunskyPair, theta: float, n: int, lam: complex = 1.0) -> np.ndarray:
    """``T_n(w)`` for the (Aleksandrov-rotated) Fibonacci coefficients ``lam * alpha_j``."""
    if n < 0:
        raise InputError("n must be non-negative")
    if abs(abs(lam) - 1.0) > 1e-12:
        raise InputError("lambda must lie on the unit circle")
    out = np.eye(2, dtype=complex)
    coeffs = _site_coefficients(pair, n, lam)
    # fixed-point words only take two values; cache both one-step matrices
    cache = {}
    for j, a in enumerate(coeffs):
        m = cache.get(a)
        if m is None:
            m = cache[a] = one_step_matrix(a, theta)
        out = m @ out
        if np.abs(out).max() > OVERFLOW_BOUND:
            raise NumericalRangeError(f"transfer matrix entries exceeded {OVERFLOW_BOUND:g}", step=j + 1)
    return out


def normalized_fib_trace(pair: VerblunskyPair, theta: float, n: int, return_complex: bool = False):
    """``x_n = 1/2 exp(-i f_n theta/2) Tr T_{f_n}`` from the direct product (``1 <= n <= 20``).

    The value is real in exact arithmetic; ``return_complex=True`` exposes the
    rounding residue in the imaginary part.
    """
    if not 1 <= n <= 20:
        raise InputError("direct traces are supported for 1 <= n <= 20")
    f = fib_number(n)
    t = transfer_product(pair, theta, f)
    val = 0.5 * cmath.exp(-0.5j * f * (theta % (2 * math.pi))) * (t[0, 0] + t[1, 1])
    return val if return_complex else val.real


@dataclass
class TraceSequence:
    """``values[k + 1] = x_k`` for ``k = -1 .. n``; ``saturated`` marks truncation at 1e100."""

    values: list
    pair: VerblunskyPair
    theta: float
    saturated: bool = False

    def x(self, k: int) -> float:
        return self.values[k + 1]

    @property
    def n_max(self) -> int:
        return len(self.values) - 2


def trace_sequence(pair: VerblunskyPair, theta: float, n_max: int) -> TraceSequence:
    if not 1 <= n_max <= 1000:
        raise InputError("n_max must be in [1, 1000]")
    x1, x0, xm1 = (float(v[0]) for v in gamma_curve_arrays(pair, [theta]))
    vals = [xm1, x0, x1]
    saturated = False
    for _ in range(n_max - 1):
        nxt = 2.0 * vals[-1] * vals[-2] - vals[-3]
        if abs(nxt) > SATURATION:
            saturated = True
            break
        vals.append(nxt)
    return TraceSequence(vals, pair, float(theta), saturated)


def traces_at_level(pair: VerblunskyPair, thetas, k: int, clip: float = SATURATION) -> np.ndarray:
    """Vectorised ``x_k(theta)`` (``k >= -1``) through the trace recursion.

    Magnitudes are clipped at ``clip`` with the sign kept; clipped values only
    occur on orbits that have already escaped.
    """
    x1, x0, xm1 = gamma_curve_arrays(pair, thetas)
    if k == -1:
        return xm1
    if k == 0:
        return x0
    a, b, c = x1, x0, xm1  # x_j, x_{j-1}, x_{j-2} with j = 1
    for _ in range(k - 1):
        a, b, c = np.clip(2.0 * a * b - c, -clip, clip), a, b
    return a


def polynomials_at(pair: VerblunskyPair, theta: float, n: int, lam: complex = 1.0) -> tuple[complex, complex]:
    """``(phi_n, phi_n^*)`` at ``w = exp(i theta)`` for the Aleksandrov measure ``mu_lam``."""
    if n < 1:
        raise InputError("n must be >= 1 (phi_0 = phi_0^* = 1 for every measure)")
    t = transfer_product(pair, theta, n)
    v = t @ np.array([1.0, complex(lam).conjugate()])
    return complex(v[0]), complex(v[1])


def _largest_cubic_root(a: float) -> float:
    """Largest real root of ``x^3 - a x - 1`` for ``a >= 0``."""
    f = lambda x: x * x * x - a * x - 1.0
    lo = max(1.0, math.sqrt(a))  # f(lo) < 0 there
    hi = 1.0 + a  # f(1 + a) = (1 + a)((1 + a)^2 - a) - 1 > 0
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def growth_exponent_bound(I: float) -> tuple[float, float]:
    """``(r, gamma)``: the norm growth rate of Fibonacci blocks and the polynomial exponent bound.

    ``r`` is the largest root of ``x^3 - (2 + 2 sqrt(I)) x - 1`` and
    ``gamma = log(sqrt(5 + 4 sqrt(I)) (3 + 2 sqrt(I)) r) / log(golden ratio)``.
    """
    if I < 0:
        raise InputError("the growth bound needs I >= 0")
    s = math.sqrt(I)
    r = _largest_cubic_root(2.0 + 2.0 * s)
    gamma = math.log(math.sqrt(5.0 + 4.0 * s) * (3.0 + 2.0 * s) * r) / math.log(GOLDEN)
    return r, gamma


class _Scaled(NamedTuple):
    """``exp(log_scale) * mat`` with ``mat`` of unit operator norm."""

    mat: np.ndarray
    log_scale: float

    @classmethod
    def of(cls, m: np.ndarray, log_scale: float = 0.0) -> "_Scaled":
        nrm = opnorm(m)
        return cls(m / nrm, log_scale + math.log(nrm))

    def __matmul__(self, other: "_Scaled") -> "_Scaled":
        return _Scaled.of(self.mat @ other.mat, self.log_scale + other.log_scale)

    @property
    def log_norm(self) -> float:
        return self.log_scale


def _fib_blocks(pair: VerblunskyPair, theta: float, n_max: int) -> list:
    """Scaled ``M_0 .. M_{n_max}`` via ``M_k = M_{k-2} M_{k-1}``.

    ``M_0 = exp(-i theta/2) A(beta)`` and ``M_1 = exp(-i theta/2) A(alpha)``.
    """
    half = cmath.exp(-0.5j * (theta % (2 * math.pi)))
    blocks = [_Scaled.of(half * one_step_matrix(pair.beta, theta)), _Scaled.of(half * one_step_matrix(pair.alpha, theta))]
    for k in range(2, n_max + 1):
        blocks.append(blocks[k - 2] @ blocks[k - 1])
    return blocks


def fib_block_matrices(pair: VerblunskyPair, theta: float, n_max: int) -> list:
    """Unscaled ``M_1 .. M_{n_max}`` (raises once an entry passes 1e150)."""
    out = []
    for k, b in enumerate(_fib_blocks(pair, theta, n_max)[1:], start=1):
        if b.log_scale > math.log(OVERFLOW_BOUND):
            raise NumericalRangeError(f"block M_{k} norm exceeded {OVERFLOW_BOUND:g}", step=k)
        out.append(b.mat * math.exp(b.log_scale))
    return out


def fib_block_norms(pair: VerblunskyPair, theta: float, n_max: int) -> list:
    """``||M_k||`` for ``k = 1 .. n_max`` from the block recursion."""
    if not 1 <= n_max <= 30:
        raise InputError("n_max must be in [1, 30]")
    return [opnorm(m) for m in fib_block_matrices(pair, theta, n_max)]


def fib_block_half_traces(pair: VerblunskyPair, theta: float, n_max: int) -> list:
    """``1/2 |Tr M_k|`` for ``k = 1 .. n_max``."""
    return [0.5 * abs(m[0, 0] + m[1, 1]) for m in fib_block_matrices(pair, theta, n_max)]


def log_transfer_norm_fast(pair: VerblunskyPair, theta: float, n: int) -> float:
    """``log ||T_n||`` as a product of Zeckendorf blocks, largest block rightmost."""
    if n == 0:
        return 0.0
    if not 1 <= n <= 10**6:
        raise InputError("n must be in [1, 10^6]")
    idx = zeckendorf(n).indices
    blocks = _fib_blocks(pair, theta, idx[0])
    prod = blocks[idx[0]]
    for i in idx[1:]:
        prod = blocks[i] @ prod
    return prod.log_norm


def transfer_norm_fast(pair: VerblunskyPair, theta: float, n: int) -> float:
    """``||T_n||``; ``inf`` once the norm leaves the float range (see :func:`log_transfer_norm_fast`)."""
    lg = log_transfer_norm_fast(pair, theta, n)
    return math.exp(lg) if lg < 700.0 else math.inf


class GrowthFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


def growth_checkpoints(pair: VerblunskyPair, theta: float, n_max: int):
    """Fibonacci checkpoints ``n <= n_max`` and ``log ||T_n||`` at each."""
    if not 1 <= n_max <= 10**5:
        raise InputError("n_max must be in [1, 10^5]")
    ns = fib_numbers_upto(n_max)
    blocks = _fib_blocks(pair, theta, len(ns))
    return np.array(ns, dtype=float), np.array([b.log_norm for b in blocks[1:]])


def linear_fit(x, y) -> GrowthFit:
    """Least-squares line with the coefficient of determination."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot <= 1e-300 else min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    return GrowthFit(float(slope), float(intercept), r2)


def empirical_growth_exponent(pair: VerblunskyPair, theta: float, n_max: int) -> GrowthFit:
    """Slope of ``log ||T_n||`` against ``log n`` over Fibonacci ``n <= n_max``.

    ``exp(intercept)`` is the empirical prefactor in ``||T_n|| ~ C n^slope``.
    """
    ns, logs = growth_checkpoints(pair, theta, n_max)
    if ns.size < 2:
        raise InputError("need at least two Fibonacci checkpoints (n_max >= 2)")
    return linear_fit(np.log(ns), logs)


class DivergenceCheck(NamedTuple):
    min_pair_norm: float
    partial_sums: dict
    trace_bound: float


def point_mass_divergence_check(
    pair: VerblunskyPair,
    theta: float,
    lam: complex = 1.0,
    k_max: int = 20,
    checkpoints=(100, 1000, 10000),
) -> DivergenceCheck:
    """Numerical probe of non-square-summability of ``phi_n`` at ``theta``.

    For ``k = 1 .. k_max`` takes ``max(||(phi, phi^*)_{f_k}||, ||(phi, phi^*)_{2 f_k}||)``
    and returns its minimum over ``k``, the partial sums ``sum_{n <= N} |phi_n|^2``
    at the checkpoints, and ``trace_bound = max_k |Tr M_k|``.  Because
    ``T_{2 f_k} = M_k^2`` up to a phase, Cayley-Hamilton gives
    ``min_pair_norm >= sqrt 2 / (C + 1) >= 1/(2 C sqrt 2)`` for any bound
    ``C >= 1`` on the traces.
    """
    if not 1 <= k_max <= 25:
        raise InputError("k_max must be in [1, 25]")
    if abs(abs(lam) - 1.0) > 1e-12:
        raise InputError("lambda must lie on the unit circle")
    fks = [fib_number(k) for k in range(1, k_max + 1)]
    marks = set(fks) | {2 * f for f in fks}
    n_end = max(max(marks), max(checkpoints))
    letters = fixed_point_letters(n_end)
    w = _w(theta)
    steps = {}
    for a in (pair.alpha, pair.beta):
        r = math.sqrt(1.0 - abs(a) ** 2)
        steps[a] = (w / r, -a.conjugate() / r, -a * w / r, 1.0 / r)
    coeff = (pair.alpha, pair.beta)

    p, q = 1.0 + 0j, complex(lam).conjugate()
    norms = {}
    sums = {}
    total = abs(p) ** 2  # phi_0 = 1
    for n in range(1, n_end + 1):
        a, b, c, d = steps[coeff[letters[n - 1]]]
        p, q = a * p + b * q, c * p + d * q
        total += abs(p) ** 2
        if n in marks:
            norms[n] = math.hypot(abs(p), abs(q))
        if n in checkpoints:
            sums[n] = total
        if abs(p) > OVERFLOW_BOUND:
            raise NumericalRangeError("orthogonal polynomial values exceeded 1e150", step=n)
    pair_max = [max(norms[f], norms[2 * f]) for f in fks]
    traces = [2.0 * t for t in fib_block_half_traces(pair, theta, k_max)]
    return DivergenceCheck(min(pair_max), {N: sums[N] for N in sorted(checkpoints)}, float(max(traces)))
