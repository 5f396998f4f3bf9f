"""Finite unions of closed arcs on the circle, parameterised by angle.

Internally an :class:`ArcSet` keeps sorted, pairwise disjoint closed pieces of
``[0, 2 pi]``; an arc crossing angle 0 is stored as two pieces ``[lo, 2 pi]``
and ``[0, hi]`` and reported as the single wrapped arc ``(lo, hi)`` with
``lo > hi`` by :attr:`ArcSet.arcs`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError

TWO_PI = 2.0 * math.pi


def _merge(pieces: np.ndarray) -> np.ndarray:
    if pieces.size == 0:
        return np.zeros((0, 2))
    pieces = pieces[np.argsort(pieces[:, 0], kind="stable")]
    out = [list(pieces[0])]
    for lo, hi in pieces[1:]:
        if lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return np.array(out, dtype=float)


def _normalise(intervals) -> np.ndarray:
    rows = []
    for lo, hi in intervals:
        lo, hi = float(lo), float(hi)
        if hi < lo:  # wrapped arc written as (lo, hi) with lo > hi
            hi += TWO_PI
        if hi - lo >= TWO_PI:
            return np.array([[0.0, TWO_PI]])
        start = lo % TWO_PI
        end = start + (hi - lo)
        if end > TWO_PI:
            rows.append((start, TWO_PI))
            rows.append((0.0, end - TWO_PI))
        else:
            rows.append((start, end))
    return _merge(np.array(rows, dtype=float).reshape(-1, 2))


def circular_distance(a, b):
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % TWO_PI
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class ArcSet:
    pieces: np.ndarray = field(repr=False)
    level: Optional[int] = None
    C_used: Optional[float] = None

    @classmethod
    def from_intervals(cls, intervals, level=None, C_used=None) -> "ArcSet":
        return cls(_normalise(intervals), level, C_used)

    @classmethod
    def empty(cls, level=None, C_used=None) -> "ArcSet":
        return cls(np.zeros((0, 2)), level, C_used)

    @classmethod
    def full(cls, level=None, C_used=None) -> "ArcSet":
        return cls(np.array([[0.0, TWO_PI]]), level, C_used)

    def with_meta(self, level=None, C_used=None) -> "ArcSet":
        return ArcSet(self.pieces, level, C_used)

    # -- views -----------------------------------------------------------

    @property
    def arcs(self) -> list:
        """Circular arcs ``(lo, hi)``; a wrapped arc has ``lo > hi``."""
        p = [tuple(map(float, row)) for row in self.pieces]
        if len(p) >= 2 and p[0][0] == 0.0 and p[-1][1] == TWO_PI:
            wrapped = (p[-1][0], p[0][1])
            return [wrapped] + p[1:-1] if wrapped[0] > wrapped[1] else p
        return p

    def __len__(self) -> int:
        return len(self.arcs)

    @property
    def is_empty(self) -> bool:
        return self.pieces.shape[0] == 0

    @property
    def is_full(self) -> bool:
        return self.pieces.shape[0] == 1 and self.pieces[0, 0] == 0.0 and self.pieces[0, 1] == TWO_PI

    def measure(self) -> float:
        return float(np.sum(self.pieces[:, 1] - self.pieces[:, 0]))

    def lengths(self) -> np.ndarray:
        return np.array([(hi - lo) % TWO_PI if hi != lo + TWO_PI else TWO_PI for lo, hi in self.arcs])

    def centers(self) -> np.ndarray:
        out = []
        for lo, hi in self.arcs:
            span = hi - lo if hi >= lo else hi + TWO_PI - lo
            out.append((lo + span / 2.0) % TWO_PI)
        return np.array(out)

    def contains(self, theta) -> np.ndarray:
        t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        if self.is_empty:
            return np.zeros(t.shape, dtype=bool)
        i = np.searchsorted(self.pieces[:, 0], t, side="right") - 1
        ok = i >= 0
        out = np.zeros(t.shape, dtype=bool)
        out[ok] = t[ok] <= self.pieces[i[ok], 1]
        # angle 0 also belongs to a piece ending at 2 pi
        out |= (t == 0.0) & (self.pieces[-1, 1] == TWO_PI)
        return out

    def gaps(self) -> list:
        """Circular gaps between consecutive arcs as ``(lo, hi)`` pairs (``hi`` may exceed 2 pi)."""
        p = self.pieces
        if self.is_empty or self.is_full:
            return []
        out = [(float(p[i, 1]), float(p[i + 1, 0])) for i in range(len(p) - 1)]
        if not (p[0, 0] == 0.0 and p[-1, 1] == TWO_PI):
            out.append((float(p[-1, 1]), float(p[0, 0]) + TWO_PI))
        return out

    # -- algebra ---------------------------------------------------------

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(_merge(np.vstack([self.pieces, other.pieces])), self.level, self.C_used)

    def intersect(self, other: "ArcSet") -> "ArcSet":
        a, b = self.pieces, other.pieces
        i = j = 0
        out = []
        while i < len(a) and j < len(b):
            lo = max(a[i, 0], b[j, 0])
            hi = min(a[i, 1], b[j, 1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i, 1] < b[j, 1]:
                i += 1
            else:
                j += 1
        return ArcSet(_merge(np.array(out, dtype=float).reshape(-1, 2)), self.level, self.C_used)

    def window(self, center: float, radius: float) -> "ArcSet":
        """Intersection with the arc ``[center - radius, center + radius]``."""
        return self.intersect(ArcSet.from_intervals([(center - radius, center + radius)]))

    def drop_short(self, min_length: float) -> "ArcSet":
        keep = [a for a, ln in zip(self.arcs, self.lengths()) if ln >= min_length]
        return ArcSet.from_intervals(keep, self.level, self.C_used)

    def distance_to(self, theta) -> np.ndarray:
        """Circular distance from each angle to the set."""
        if self.is_empty:
            raise InputError("distance to an empty arc set is undefined")
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        ends = self.pieces.ravel()
        d = circular_distance(t[:, None], ends[None, :]).min(axis=1)
        d[self.contains(t)] = 0.0
        return d

    def _distance_candidates(self, other: "ArcSet") -> np.ndarray:
        # sup over self of dist(., other) sits at an endpoint of self or a gap midpoint of other
        cands = list(self.pieces.ravel())
        for lo, hi in other.gaps():
            mid = ((lo + hi) / 2.0) % TWO_PI
            if self.contains(mid):
                cands.append(mid)
        return np.array(cands)

    def hausdorff_distance(self, other: "ArcSet") -> float:
        if self.is_empty or other.is_empty:
            raise InputError("Hausdorff distance needs two non-empty arc sets")
        ab = other.distance_to(self._distance_candidates(other)).max()
        ba = self.distance_to(other._distance_candidates(self)).max()
        return float(max(ab, ba))

    # -- serialisation ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "C_used": self.C_used,
            "arcs": [[lo, hi] for lo, hi in self.arcs],
            "measure": self.measure(),
        }

    def to_json(self, **extra) -> str:
        return json.dumps({**extra, **self.to_dict()}, indent=2)

    def to_csv(self, header_comments=None) -> str:
        lines = [f"# {k}: {v}" for k, v in (header_comments or {}).items()]
        lines.append("lo_theta,hi_theta")
        lines += [f"{lo!r},{hi!r}" for lo, hi in self.arcs]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ArcSet":
        return cls.from_intervals([tuple(a) for a in d["arcs"]], d.get("level"), d.get("C_used"))


def arcset_algebra(a: ArcSet, b: Optional[ArcSet], op: str):
    """Dispatch ``union``, ``intersect``, ``measure`` or ``hausdorff_distance``.

    ``measure`` returns the length of ``a`` united with ``b`` (just ``a`` when
    ``b`` is None).
    """
    if op == "measure":
        return a.measure() if b is None else a.union(b).measure()
    if op == "union":
        return a.union(b)
    if op == "intersect":
        return a.intersect(b)
    if op == "hausdorff_distance":
        return a.hausdorff_distance(b)
    raise InputError(f"unknown arc-set operation {op!r}")
