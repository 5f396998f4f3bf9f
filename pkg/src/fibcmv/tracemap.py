"""The Fibonacci trace map ``T(x, y, z) = (2xy - z, x, y)`` on R^3.

Besides forward/backward iteration this module carries the Fricke-Vogt
invariant, the Cayley-cubic singularities, the period-two curve through
``(1, 1, 1)``, the torus semiconjugacy and the rigid (reversing) symmetries,
plus a numerical orbit classifier that returns an escape certificate when one
of the known sufficient conditions for unboundedness fires.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import InputError, NumericalRangeError

OVERFLOW_BOUND = 1e150
ESCAPE_MAGNITUDE = 1e8
DEFAULT_HORIZON = 60


class Point3(NamedTuple):
    x: float
    y: float
    z: float

    @classmethod
    def of(cls, x, y, z) -> "Point3":
        """Validated constructor: rejects NaN and infinite coordinates."""
        p = cls(float(x), float(y), float(z))
        if not all(math.isfinite(c) for c in p):
            raise InputError(f"non-finite phase-space point {p}")
        return p


P1 = Point3(1.0, 1.0, 1.0)
P2 = Point3(-1.0, -1.0, 1.0)
P3 = Point3(1.0, -1.0, -1.0)
P4 = Point3(-1.0, 1.0, -1.0)
SINGULARITIES = (P1, P2, P3, P4)


def _checked(p: Point3, step=None) -> Point3:
    if not all(abs(c) <= OVERFLOW_BOUND for c in p):
        raise NumericalRangeError(f"trace-map coordinate exceeded {OVERFLOW_BOUND:g}: {p}", step=step)
    return p


def apply_T(p) -> Point3:
    x, y, z = p
    return _checked(Point3(2.0 * x * y - z, x, y))


def apply_T_inverse(p) -> Point3:
    x, y, z = p
    return _checked(Point3(y, z, 2.0 * y * z - x))


def iterate(p, k: int) -> Point3:
    """``T^k(p)``; negative ``k`` iterates the inverse."""
    if abs(k) > 10**4:
        raise InputError("iteration count limited to |k| <= 10^4")
    step = apply_T if k >= 0 else apply_T_inverse
    q = Point3(*map(float, p))
    for i in range(abs(k)):
        try:
            q = step(q)
        except NumericalRangeError as exc:
            raise NumericalRangeError(str(exc), step=i + 1) from None
    return q


def fricke_vogt_invariant(p) -> float:
    x, y, z = p
    return x * x + y * y + z * z - 2.0 * x * y * z - 1.0


def fricke_vogt_array(x, y, z):
    """Vectorised invariant for coordinate arrays."""
    return x * x + y * y + z * z - 2.0 * x * y * z - 1.0


def period_two_point(x: float) -> Point3:
    """Point of the period-two curve ``(x, x/(2x-1), x)`` through ``P1``."""
    if x == 0.5:
        raise InputError("the period-two curve has a pole at x = 1/2")
    return Point3(float(x), x / (2.0 * x - 1.0), float(x))


def semiconjugacy_F(theta: float, phi: float) -> Point3:
    """Torus-to-Cayley-cubic map; ``T(F(t, p)) = F(t + p, t)``."""
    tau = 2.0 * math.pi
    return Point3(math.cos(tau * ((theta + phi) % 1.0)), math.cos(tau * (theta % 1.0)), math.cos(tau * (phi % 1.0)))


_SYMMETRIES = {
    "reverse": lambda x, y, z: (z, y, x),
    "s2": lambda x, y, z: (-x, -y, z),
    "s3": lambda x, y, z: (x, -y, -z),
    "s4": lambda x, y, z: (-x, y, -z),
}


def symmetry(p, which: str) -> Point3:
    """Apply the reversing symmetry ``reverse`` or one of ``s2``, ``s3``, ``s4``."""
    try:
        f = _SYMMETRIES[which]
    except KeyError:
        raise InputError(f"unknown symmetry {which!r}; expected one of {sorted(_SYMMETRIES)}") from None
    return Point3(*f(*p))


class OrbitKind(str, enum.Enum):
    BOUNDED_UP_TO_HORIZON = "BoundedUpToHorizon"
    ESCAPED = "Escaped"


class EscapeCertificate(str, enum.Enum):
    PRODUCT_RULE = "ProductRule"
    Z_WINDOW_RULE = "ZWindowRule"
    MAGNITUDE_OVERFLOW = "MagnitudeOverflow"


@dataclass(frozen=True)
class OrbitVerdict:
    kind: OrbitKind
    steps_used: int
    certificate: Optional[EscapeCertificate]
    final_point: Point3

    def __post_init__(self):
        if (self.kind is OrbitKind.ESCAPED) != (self.certificate is not None):
            raise ValueError("an escape verdict carries a certificate and only an escape verdict does")

    @property
    def escaped(self) -> bool:
        return self.kind is OrbitKind.ESCAPED

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "steps_used": self.steps_used,
            "certificate": None if self.certificate is None else self.certificate.value,
            "final_point": list(self.final_point),
        }


def _escape_rule(p: Point3, C: float) -> Optional[EscapeCertificate]:
    ax, ay, az = abs(p.x), abs(p.y), abs(p.z)
    # the product rule is checked first: with C >= 1 it subsumes the z-window rule
    if ax > 1.0 and ay > 1.0 and ax * ay >= az:
        return EscapeCertificate.PRODUCT_RULE
    if az <= C and ax > C and ay > C:
        return EscapeCertificate.Z_WINDOW_RULE
    if max(ax, ay, az) >= ESCAPE_MAGNITUDE:
        return EscapeCertificate.MAGNITUDE_OVERFLOW
    return None


def orbit_classify(p, horizon: int = DEFAULT_HORIZON, C: float = 1.0) -> OrbitVerdict:
    """Iterate ``T`` for up to ``horizon`` steps looking for an escape certificate.

    Step ``k`` tests the point ``T^k(p)``, starting with ``k = 0``.  A point
    without a certificate after ``horizon`` steps is reported as bounded up to
    that horizon, which is all a finite computation can say.
    """
    if horizon < 1:
        raise InputError("horizon must be at least 1")
    if C < 1.0:
        raise InputError("the window constant C must be >= 1")
    q = Point3.of(*p)
    if abs(q.z) > C:
        raise InputError(f"orbit classification needs |z| <= C, got z={q.z} with C={C}")
    for k in range(horizon + 1):
        cert = _escape_rule(q, C)
        if cert is not None:
            return OrbitVerdict(OrbitKind.ESCAPED, k, cert, q)
        if k == horizon:
            break
        q = Point3(2.0 * q.x * q.y - q.z, q.x, q.y)
    return OrbitVerdict(OrbitKind.BOUNDED_UP_TO_HORIZON, horizon, None, q)


def orbit_array(x, y, z, steps: int, clip: float = 1e100):
    """Vectorised forward orbit; returns the list of third coordinates ``pi(T^k p)``, k = 0..steps.

    Coordinates are clipped to ``+-clip`` (sign preserved) so escaping orbits
    stay finite; clipping only ever happens deep inside the escape regime.
    """
    x = np.array(x, dtype=float, copy=True)
    y = np.array(y, dtype=float, copy=True)
    z = np.array(z, dtype=float, copy=True)
    out = [z.copy()]
    for _ in range(steps):
        x, y, z = np.clip(2.0 * x * y - z, -clip, clip), x, y
        out.append(z.copy())
    return out
