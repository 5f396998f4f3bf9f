"""Box-counting dimension of band approximants and the invariant-based brackets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .arcs import TWO_PI, ArcSet
from .errors import InputError
from .opuc import VerblunskyPair, invariant_on_circle
from .spectrum import DEFAULT_GRID, b_infinity_approx
from .transfer import linear_fit

LOG_SILVER = math.log(1.0 + math.sqrt(2.0))
DEFAULT_SCALES = 16


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    window: Optional[tuple]  # (theta_center, epsilon), None for a whole set
    level: Optional[int]
    scales_used: list = field(default_factory=list)
    r_squared: float = 0.0
    bracket: Optional[tuple] = None  # (lower, upper); either may be None
    invariant: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"dimension estimate {self.value} outside [0, 1]")
        if self.bracket is not None:
            lo, hi = self.bracket
            if lo is not None and hi is not None and lo > hi:
                raise ValueError("bracket lower bound exceeds upper bound")

    def to_dict(self) -> dict:
        center, eps = self.window if self.window is not None else (None, None)
        bracket = None
        if self.bracket is not None:
            bracket = {"lower": self.bracket[0], "upper": self.bracket[1]}
        return {
            "theta_center": center,
            "epsilon": eps,
            "level": self.level,
            "invariant": self.invariant,
            "estimate": self.value,
            "r_squared": self.r_squared,
            "bracket": bracket,
        }


def _relative_pieces(s: ArcSet, origin: float) -> np.ndarray:
    """Pieces shifted so that ``origin`` maps to 0, sorted, as ``(k, 2)`` on ``[0, 2 pi]``."""
    p = s.pieces
    lo = np.mod(p[:, 0] - origin, TWO_PI)
    hi = lo + (p[:, 1] - p[:, 0])
    order = np.argsort(lo, kind="stable")
    return np.column_stack([lo[order], hi[order]])


def box_count(pieces: np.ndarray, eps: float) -> int:
    """Number of boxes ``[j eps, (j+1) eps)`` meeting a sorted union of disjoint intervals."""
    if pieces.size == 0:
        return 0
    s = np.floor(pieces[:, 0] / eps).astype(np.int64)
    e = np.floor(pieces[:, 1] / eps).astype(np.int64)
    # disjoint sorted intervals can share at most their boundary box with the next one
    shared = np.count_nonzero(s[1:] == e[:-1])
    return int(np.sum(e - s + 1) - shared)


def _default_ladder(pieces: np.ndarray, span: float):
    lengths = pieces[:, 1] - pieces[:, 0]
    gaps = pieces[1:, 0] - pieces[:-1, 1]
    gaps = gaps[gaps > 0]
    eps_max = float(gaps.max()) if gaps.size else span / 64.0
    eps_max = min(eps_max, span / 2.0)
    # the outermost pieces of a window may be clipped slivers, not resolved arcs
    inner = lengths[1:-1] if lengths.size > 2 else lengths
    finest = float(inner[inner > 0].min()) if np.any(inner > 0) else 0.0
    eps_min = 4.0 * finest if finest > 0 else eps_max * 1e-4
    if eps_min >= eps_max:
        eps_min = eps_max * 1e-3
    return eps_max, eps_min


def box_counting_dimension(
    s: ArcSet,
    eps_max: Optional[float] = None,
    eps_min: Optional[float] = None,
    levels: int = DEFAULT_SCALES,
    origin: float = 0.0,
    span: float = TWO_PI,
) -> DimensionEstimate:
    """Slope of ``log N(eps)`` against ``log(1/eps)`` over a geometric ladder of scales.

    Boxes are aligned at ``origin``.  Without explicit scales the ladder runs
    from the largest gap of the set down to four times its shortest arc.
    """
    if s.is_empty:
        raise InputError("box counting needs a nonempty set")
    if levels < 2:
        raise InputError("need at least two scales")
    pieces = _relative_pieces(s, origin)
    auto_max, auto_min = _default_ladder(pieces, span)
    eps_max = auto_max if eps_max is None else float(eps_max)
    eps_min = auto_min if eps_min is None else float(eps_min)
    if not 0.0 < eps_min < eps_max:
        raise InputError("need 0 < eps_min < eps_max")
    scales = np.geomspace(eps_max, eps_min, levels)
    counts = np.array([box_count(pieces, e) for e in scales], dtype=float)
    fit = linear_fit(np.log(1.0 / scales), np.log(counts))
    value = min(max(fit.slope, 0.0), 1.0)
    return DimensionEstimate(value, None, s.level, [float(e) for e in scales], fit.r_squared)


def bracket_from_invariant(I: float):
    """``(lower, upper)`` bounds on the local dimension from the invariant value.

    ``lower`` needs ``I > 4`` and ``upper`` needs ``I >= 16``; a missing bound
    is ``None``, and ``None`` is returned when neither applies.
    """
    if I < 0:
        raise InputError("the invariant must be nonnegative")
    root = math.sqrt(I)
    lower = upper = None
    if I > 4.0:
        lower = LOG_SILVER / math.log(4.0 * root + 22.0)
    if I >= 16.0:
        a = 2.0 * root - 4.0
        s_l = 0.5 * (a + math.sqrt(a * a - 12.0))
        upper = LOG_SILVER / math.log(s_l)
    if lower is None and upper is None:
        return None
    return (lower, upper)


def local_dimension(
    pair: VerblunskyPair,
    theta0: float,
    epsilon: float,
    level: int,
    grid: int = DEFAULT_GRID,
    levels: int = DEFAULT_SCALES,
    workers: Optional[int] = None,
) -> DimensionEstimate:
    """Box-counting dimension of ``b_infinity_approx(level)`` inside ``[theta0 - eps, theta0 + eps]``."""
    if not 0.0 < epsilon < math.pi:
        raise InputError("epsilon must lie in (0, pi)")
    approx = b_infinity_approx(pair, level, grid=grid, workers=workers)
    local = approx.window(theta0, epsilon)
    if local.is_empty:
        raise InputError(f"window around theta={theta0} misses the level-{level} approximation")
    est = box_counting_dimension(local, levels=levels, origin=theta0 - epsilon, span=2.0 * epsilon)
    inv = float(invariant_on_circle(pair, theta0))
    return DimensionEstimate(
        est.value,
        (float(theta0), float(epsilon)),
        level,
        est.scales_used,
        est.r_squared,
        bracket_from_invariant(max(inv, 0.0)),
        inv,
    )


@dataclass(frozen=True)
class TrendFit:
    constant: float
    residuals: list
    codims: list
    root_invariants: list
    degenerate: bool

    @property
    def strictly_increasing(self) -> bool:
        order = np.argsort(self.root_invariants)
        c = np.asarray(self.codims)[order]
        return bool(np.all(np.diff(c) > 0))


def small_invariant_trend(
    pairs: Sequence[VerblunskyPair],
    level: int = 18,
    theta0: float = math.pi,
    epsilon: float = 0.3,
    grid: int = DEFAULT_GRID,
) -> TrendFit:
    """Fit ``1 - dim(theta0) = c sqrt(I(theta0))`` through the origin over a family of pairs.

    Only the ordering of ``1 - dim`` is meaningful; the constant is reported
    for inspection.  A single pair gives a degenerate fit with no residuals.
    """
    if not pairs:
        raise InputError("empty pair family")
    roots, codims = [], []
    for p in pairs:
        inv = float(invariant_on_circle(p, theta0))
        if inv <= 0.0:
            raise InputError("the trend needs a positive invariant at theta0 (M = 0 is excluded)")
        est = local_dimension(p, theta0, epsilon, level, grid=grid)
        roots.append(math.sqrt(inv))
        codims.append(1.0 - est.value)
    r = np.array(roots)
    d = np.array(codims)
    c = float(np.dot(r, d) / np.dot(r, r))
    if len(pairs) == 1:
        return TrendFit(c, [], codims, roots, True)
    return TrendFit(c, [float(v) for v in d - c * r], codims, roots, False)
