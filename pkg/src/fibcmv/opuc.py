"""Verblunsky pairs, the curve of initial conditions and the invariant on the circle.

Spectral parameters are angles: ``w = exp(i theta)`` with ``theta`` reduced to
``[0, 2 pi)``, and ``w**(1/2)`` is taken on the branch ``theta/2 in [0, pi)``
so that ``w**(1/2) + w**(-1/2) = 2 cos(theta/2)`` is real.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .tracemap import Point3

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class VerblunskyPair:
    """Two distinct coefficients in the open unit disc.

    ``alpha`` sits on the ``A`` sites of the Fibonacci word, ``beta`` on the
    ``B`` sites.
    """

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        for name, v in (("alpha", a), ("beta", b)):
            if not (cmath.isfinite(v) and abs(v) < 1.0):
                raise InputError(f"{name} must lie in the open unit disc, got {v}")
        if a == b:
            raise InputError("alpha equals beta: constant coefficients are excluded")

    @property
    def rho(self) -> float:
        return math.sqrt(1.0 - abs(self.alpha) ** 2)

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 - abs(self.beta) ** 2)

    @property
    def K(self) -> float:
        return 2.0 * (1.0 - (self.alpha.conjugate() * self.beta).real)

    @property
    def z0(self) -> float:
        """The constant third coordinate ``K / (2 rho sigma)`` of the initial curve."""
        return self.K / (2.0 * self.rho * self.sigma)

    def to_dict(self) -> dict:
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "beta": [self.beta.real, self.beta.imag],
        }


class CirclePoint(NamedTuple):
    theta: float
    half_angle_cos: float


def circle_point(theta: float) -> CirclePoint:
    t = float(theta) % TWO_PI
    return CirclePoint(t, math.cos(t / 2.0))


def gamma_curve(pair: VerblunskyPair, theta: float) -> Point3:
    """``(x_1, x_0, x_-1) = (cos(theta/2)/rho, cos(theta/2)/sigma, K/(2 rho sigma))``."""
    c = circle_point(theta).half_angle_cos
    return Point3(c / pair.rho, c / pair.sigma, pair.z0)


def gamma_curve_arrays(pair: VerblunskyPair, thetas):
    """Vectorised :func:`gamma_curve`; returns three arrays."""
    c = np.cos(np.mod(np.asarray(thetas, dtype=float), TWO_PI) / 2.0)
    return c / pair.rho, c / pair.sigma, np.full_like(c, pair.z0)


def invariant_coefficients(pair: VerblunskyPair) -> tuple[float, float]:
    """``(slope, offset)`` with ``I(theta) = slope * cos(theta) + offset``."""
    r2, s2, K = pair.rho**2, pair.sigma**2, pair.K
    slope = 1.0 / (2 * r2) + 1.0 / (2 * s2) - K / (2 * r2 * s2)
    offset = (K * K - 2 * K) / (4 * r2 * s2) + 1.0 / (2 * s2) + 1.0 / (2 * r2) - 1.0
    return slope, offset


def invariant_on_circle(pair: VerblunskyPair, theta):
    """Fricke-Vogt invariant along the initial curve, in closed form (affine in cos theta).

    Accepts a scalar or an array of angles.
    """
    slope, offset = invariant_coefficients(pair)
    if np.ndim(theta):
        return slope * np.cos(np.asarray(theta, dtype=float)) + offset
    return slope * math.cos(theta) + offset


def invariant_extremes(pair: VerblunskyPair) -> tuple[float, float]:
    """Invariant at ``w = 1`` and ``w = -1``; these bracket its range on the circle."""
    slope, offset = invariant_coefficients(pair)
    return offset + slope, offset - slope


def invariant_range(pair: VerblunskyPair) -> tuple[float, float]:
    lo, hi = sorted(invariant_extremes(pair))
    return lo, hi


def design_for_max_invariant(M: float) -> VerblunskyPair:
    """Pair with ``alpha = 0`` whose invariant on the circle ranges over ``[0, M]``.

    With ``alpha = 0`` the invariant is ``(1/sigma^2 - 1)(1 - cos theta)/2``, so
    ``beta = sqrt(M / (M + 1))`` puts the maximum ``M`` at ``w = -1``.
    """
    if not M >= 1e-12:
        raise InputError(f"M must be at least 1e-12 (M -> 0 gives alpha = beta = 0), got {M}")
    return VerblunskyPair(0.0, math.sqrt(M / (M + 1.0)))
