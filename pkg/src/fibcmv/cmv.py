"""Finite CMV truncations and para-orthogonal zeros.

The CMV matrix of coefficients ``alpha_0, alpha_1, ...`` is the product
``L M`` with ``L = Theta_0 + Theta_2 + ...`` and ``M = 1 + Theta_1 + Theta_3 + ...``
(direct sums of 2x2 blocks), where ``Theta_j = [[conj(a_j), rho_j], [rho_j, -a_j]]``.
Its first row reads ``conj(a_0), conj(a_1) rho_0, rho_1 rho_0, 0, ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .arcs import TWO_PI, ArcSet
from .errors import InputError, NumericalFailure
from .opuc import VerblunskyPair
from .words import fib_number, fixed_point_letters

MAX_SIZE = 4096
MAX_ZERO_DEGREE = 233  # f_12


@dataclass(frozen=True)
class CmvMatrix:
    matrix: sp.csr_matrix
    source: str

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def to_dict(self) -> dict:
        return {"size": self.size, "nonzeros": int(self.matrix.nnz), "coefficient_source": self.source}


def _coefficients(coeffs) -> np.ndarray:
    a = np.asarray(coeffs, dtype=complex).ravel()
    if a.size and np.any(np.abs(a) >= 1.0):
        bad = int(np.argmax(np.abs(a) >= 1.0))
        raise InputError(f"coefficient {bad} has modulus {abs(a[bad])} >= 1")
    return a


def _theta_blocks(a: np.ndarray, parity: int, n: int) -> sp.csr_matrix:
    """Direct sum of ``Theta_j`` for ``j = parity, parity + 2, ...`` on ``n`` rows.

    For ``parity = 1`` the sum starts with a 1x1 identity block.
    """
    rho = np.sqrt(1.0 - np.abs(a) ** 2)
    rows, cols, vals = [], [], []
    if parity == 1:
        rows.append(0)
        cols.append(0)
        vals.append(1.0)
    for j in range(parity, n, 2):
        i = j if parity == 0 else j
        block = ((0, 0, np.conj(a[j])), (0, 1, rho[j]), (1, 0, rho[j]), (1, 1, -a[j]))
        for r, c, v in block:
            if i + r < n and i + c < n:
                rows.append(i + r)
                cols.append(i + c)
                vals.append(v)
    return sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(n, n))


def build_cmv(coeffs: Sequence[complex], size: int, source: str = "custom list") -> CmvMatrix:
    """Top-left ``size x size`` block of the CMV matrix of ``coeffs``.

    Needs ``size <= len(coeffs)``.  The extra row and column used while
    multiplying out ``L M`` are padded with a zero coefficient and cropped.
    """
    a = _coefficients(coeffs)
    if size < 1:
        raise InputError("size must be >= 1")
    if size > MAX_SIZE:
        raise InputError(f"size {size} exceeds the maximum {MAX_SIZE}")
    if size > a.size:
        raise InputError(f"size {size} needs at least {size} coefficients, got {a.size}")
    n = size + 2
    padded = np.zeros(n, dtype=complex)
    m = min(a.size, n)
    padded[:m] = a[:m]
    prod = (_theta_blocks(padded, 0, n) @ _theta_blocks(padded, 1, n)).tocsr()
    out = prod[:size, :size].tocsr()
    out.eliminate_zeros()
    return CmvMatrix(out, source)


def unitarity_defect(m: CmvMatrix) -> float:
    """``max |<col_i, col_j> - delta_ij|`` over interior columns ``2 .. size-3``."""
    if m.size < 8:
        raise InputError("unitarity check needs size >= 8")
    cols = m.matrix[:, 2 : m.size - 2]
    gram = (cols.conj().T @ cols).tocoo()
    dev = gram.data - (gram.row == gram.col)
    diag_present = np.zeros(cols.shape[1], dtype=bool)
    diag_present[gram.row[gram.row == gram.col]] = True
    worst = float(np.max(np.abs(dev))) if dev.size else 0.0
    if not diag_present.all():  # a zero column would have norm 0, defect 1
        worst = max(worst, 1.0)
    return worst


def fibonacci_coefficients(pair: VerblunskyPair, n: int) -> np.ndarray:
    """``alpha_0 .. alpha_{n-1}`` along the fixed point (A -> alpha, B -> beta)."""
    letters = fixed_point_letters(n)
    return np.where(letters == 0, pair.alpha, pair.beta).astype(complex)


def periodic_coefficients(pair: VerblunskyPair, k: int, copies: int) -> list:
    """The length-``f_k`` prefix of the fixed point, repeated ``copies`` times."""
    if not 1 <= k <= 20:
        raise InputError("period index k must lie in 1..20")
    if copies < 1:
        raise InputError("copies must be >= 1")
    block = fibonacci_coefficients(pair, fib_number(k))
    return list(np.tile(block, copies))


def lifted_phase(a: np.ndarray, thetas) -> np.ndarray:
    """Continuous argument of ``b_n = phi_n / phi_n^*`` on the circle.

    Writing ``u = w b_k`` the Szego recursion gives
    ``b_{k+1} = (u - conj(a_k)) / (1 - a_k u)``, a disc automorphism, whose
    argument is ``arg u - 2 arg(1 - a_k u)``.  The last argument has positive
    real part, so no branch choice is needed and the lift is exact:
    ``Phi(2 pi) - Phi(0) = 2 pi n`` and ``Phi`` increases.  Iterating the
    unimodular ``b_k`` avoids the loss of accuracy of ``phi_n`` and
    ``phi_n^*`` themselves, whose norms grow along the recursion.
    """
    t = np.asarray(thetas, dtype=float)
    phase = np.zeros_like(t)
    for alpha in a:
        u = np.exp(1j * (t + phase))
        phase = phase + t - 2.0 * np.angle(1.0 - alpha * u)
    return phase


def paraorthogonal_zeros(
    coeffs_or_pair,
    n: Optional[int] = None,
    lam: complex = 1.0,
    grid: Optional[int] = None,
    tol: float = 1e-10,
) -> np.ndarray:
    """Zeros of ``phi_n - conj(lam) phi_n^*`` on the circle, sorted in ``[0, 2 pi)``.

    These are the points where ``b_n = phi_n / phi_n^* = conj(lam)``, i.e. where
    the lifted phase of :func:`lifted_phase` crosses ``arg conj(lam) + 2 pi k``.
    The phase is sampled on ``grid >= 16 n`` angles to bracket every crossing,
    and each bracket is bisected to ``tol``.  A sampled phase that is not
    monotone (so the crossings cannot number exactly ``n``) raises
    :class:`NumericalFailure`.

    ``coeffs_or_pair`` is either a :class:`VerblunskyPair` (Fibonacci
    coefficients) or an explicit coefficient list, whose length is ``n`` by default.
    """
    if isinstance(coeffs_or_pair, VerblunskyPair):
        if n is None:
            raise InputError("n is required with a pair")
        if not 1 <= n <= MAX_ZERO_DEGREE:
            raise InputError(f"n must lie in 1..{MAX_ZERO_DEGREE}")
        a = fibonacci_coefficients(coeffs_or_pair, n)
    else:
        a = _coefficients(coeffs_or_pair)
        n = a.size if n is None else n
        if not 1 <= n <= a.size:
            raise InputError("need 1 <= n <= number of coefficients")
        a = a[:n]
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise InputError("lambda must be unimodular")
    grid = 16 * n if grid is None else int(grid)
    if grid < 16 * n:
        raise InputError(f"grid must be >= 16 n = {16 * n}")

    # Half-cell offset: symmetric coefficient sequences often put a zero, and
    # with it a near-vertical phase jump, exactly at theta = 0.  The closing
    # sample uses the exact periodicity Phi(theta + 2 pi) = Phi(theta) + 2 pi n.
    thetas = (np.arange(grid + 1) + 0.5) * (TWO_PI / grid)
    phase = lifted_phase(a, thetas[:-1])
    phase = np.append(phase, phase[0] + TWO_PI * n)
    if np.any(np.diff(phase) < -1e-9):
        raise NumericalFailure(f"sampled phase is not monotone over the {grid}-point grid; its winding does not match n = {n}")

    target0 = math.atan2(-lam.imag, lam.real)
    first = phase[0] + (target0 - phase[0]) % TWO_PI
    targets = first + TWO_PI * np.arange(n)
    cell = np.clip(np.searchsorted(phase, targets, side="right") - 1, 0, grid - 1)
    lo = thetas[cell].copy()
    hi = thetas[cell + 1].copy()
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = lifted_phase(a, mid) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= tol * 1e-3):
            break
    zeros = np.mod(0.5 * (lo + hi), TWO_PI)
    zeros[TWO_PI - zeros < tol] = 0.0
    return np.sort(zeros)


def zeros_to_csv(zeros: np.ndarray, bands: Optional[ArcSet] = None) -> str:
    """CSV with columns ``theta,in_band_flag`` (flag empty without ``bands``)."""
    lines = ["theta,in_band_flag"]
    flags = bands.contains(zeros) if bands is not None else [None] * len(zeros)
    for t, f in zip(zeros, flags):
        lines.append(f"{float(t)!r}," + ("" if f is None else str(int(bool(f)))))
    return "\n".join(lines) + "\n"
