"""Band-spectrum approximants of the essential support.

The level-``n`` band set is ``sigma_n = {theta : |x_{n-1}(theta)| <= C}``,
i.e. the points of the initial curve whose ``n``-th trace-map image has third
coordinate inside the window ``C``.  Intersections of consecutive unions,
``B_n = sigma_1 u sigma_2  n ... n  sigma_n u sigma_{n+1}``, decrease to the
dynamical spectrum.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .arcs import TWO_PI, ArcSet
from .errors import InputError, ResourceError
from .opuc import VerblunskyPair, invariant_on_circle
from .transfer import SATURATION
from .words import fib_number

DEFAULT_GRID = 2**14
MAX_GRID = 2**24
BISECT_STEPS = 50
MIN_ARC = 1e-12


def window_constant(pair: VerblunskyPair) -> float:
    """Smallest safe ``C``: just above ``max(1, K / (2 rho sigma))``."""
    return max(1.0, pair.z0) * (1.0 + 1e-6)


def _traces(pair: VerblunskyPair, thetas: np.ndarray, k: int) -> np.ndarray:
    # theta is NOT reduced mod 2 pi: cos(theta/2) stays continuous on [0, 2 pi]
    c = np.cos(thetas / 2.0)
    xm1 = np.full_like(c, pair.z0)
    x0 = c / pair.sigma
    if k == -1:
        return xm1
    if k == 0:
        return x0
    a, b, cc = c / pair.rho, x0, xm1
    for _ in range(k - 1):
        a, b, cc = np.clip(2.0 * a * b - cc, -SATURATION, SATURATION), a, b
    return a


def _traces_parallel(pair, thetas, k, workers):
    if workers is None or workers <= 1 or thetas.size < 2 * 4096:
        return _traces(pair, thetas, k)
    chunks = np.array_split(thetas, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda t: _traces(pair, t, k), chunks))
    return np.concatenate(parts)


def _bisect(pair, k, lo, hi, lo_inside, C, steps=BISECT_STEPS):
    """Shrink each bracket ``[lo, hi]`` around its inside/outside transition."""
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        inside = np.abs(_traces(pair, mid, k)) <= C
        move_lo = inside == lo_inside
        lo = np.where(move_lo, mid, lo)
        hi = np.where(move_lo, hi, mid)
        if np.all(hi - lo <= 1e-13):
            break
    return lo, hi


def _hidden_band_points(pair, k, t, g, seg, C):
    """Inside points for cells where ``x`` changes sign between two outside samples."""
    out = np.abs(g) > C
    cells = np.nonzero(out[:-1] & out[1:] & (np.sign(g[:-1]) != np.sign(g[1:])) & (seg[:-1] == seg[1:]))[0]
    if cells.size == 0:
        return np.zeros(0), np.zeros(0, dtype=int)
    lo, hi = t[cells].copy(), t[cells + 1].copy()
    s_lo = np.sign(g[cells])
    found = np.full(cells.size, np.nan)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        gm = _traces(pair, mid, k)
        hit = (np.abs(gm) <= C) & np.isnan(found)
        found[hit] = mid[hit]
        same = np.sign(gm) == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        if not np.isnan(found).any():
            break
    keep = ~np.isnan(found)
    return found[keep], seg[cells][keep]


def _hidden_gap_points(pair, k, t, g, seg, C):
    """Outside points for gaps narrower than the sampling step.

    Around every sampled local maximum of ``|x|`` that is still inside the
    window, ``|x|`` is maximised by golden-section search; maxima above ``C``
    mark a gap.
    """
    a = np.abs(g)
    i = np.arange(1, t.size - 1)
    cand = i[(a[i] <= C) & (a[i] >= a[i - 1]) & (a[i] >= a[i + 1])
             & (seg[i - 1] == seg[i]) & (seg[i] == seg[i + 1]) & (a[i] > 0.5 * C)]
    if cand.size == 0:
        return np.zeros(0), np.zeros(0, dtype=int)
    lo, hi = t[cand - 1].copy(), t[cand + 1].copy()
    r = 0.5 * (np.sqrt(5.0) - 1.0)
    x1 = hi - r * (hi - lo)
    x2 = lo + r * (hi - lo)
    f1 = np.abs(_traces(pair, x1, k))
    f2 = np.abs(_traces(pair, x2, k))
    best = np.where(f1 > f2, x1, x2)
    fbest = np.maximum(f1, f2)
    for _ in range(70):
        left = f1 > f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = np.where(left, hi - r * (hi - lo), x2)
        nx2 = np.where(left, x1, lo + r * (hi - lo))
        nf1 = np.where(left, np.nan, f2)
        nf2 = np.where(left, f1, np.nan)
        need1, need2 = np.isnan(nf1), np.isnan(nf2)
        if need1.any():
            nf1[need1] = np.abs(_traces(pair, nx1[need1], k))
        if need2.any():
            nf2[need2] = np.abs(_traces(pair, nx2[need2], k))
        x1, x2, f1, f2 = nx1, nx2, nf1, nf2
        better = np.maximum(f1, f2) > fbest
        best = np.where(better, np.where(f1 > f2, x1, x2), best)
        fbest = np.maximum(fbest, np.maximum(f1, f2))
        if np.all(hi - lo <= 1e-14):
            break
    keep = fbest > C
    return best[keep], seg[cand][keep]


def _bands_within(pair, k, pieces, samples, C, workers):
    """``{theta in pieces : |x_k(theta)| <= C}`` as a list of intervals.

    ``samples[i]`` uniform angles (end points included) are taken on piece ``i``.
    """
    t = np.concatenate([np.linspace(lo, hi, s) for (lo, hi), s in zip(pieces, samples)])
    seg = np.repeat(np.arange(len(pieces)), samples)
    g = _traces_parallel(pair, t, k, workers)

    extra, extra_seg = _hidden_band_points(pair, k, t, g, seg, C)
    gap_pts, gap_seg = _hidden_gap_points(pair, k, t, g, seg, C)
    extra = np.concatenate([extra, gap_pts])
    extra_seg = np.concatenate([extra_seg, gap_seg])
    if extra.size:
        t = np.concatenate([t, extra])
        g = np.concatenate([g, _traces(pair, extra, k)])
        seg = np.concatenate([seg, extra_seg])
        order = np.lexsort((t, seg))
        t, g, seg = t[order], g[order], seg[order]

    inside = np.abs(g) <= C
    same_seg = seg[:-1] == seg[1:]
    change = np.nonzero((inside[:-1] != inside[1:]) & same_seg)[0]
    lo, hi = _bisect(pair, k, t[change], t[change + 1], inside[change], C)
    edge = np.where(inside[change], lo, hi)  # last angle on the inside of the transition

    # events: segment starts inside, transitions, segment ends inside
    first = np.r_[0, np.nonzero(~same_seg)[0] + 1]
    last = np.r_[np.nonzero(~same_seg)[0], t.size - 1]
    ev_pos = np.concatenate([first[inside[first]], change, last[inside[last]]])
    ev_val = np.concatenate([t[first[inside[first]]], edge, t[last[inside[last]]]])
    # 0 = open at segment start, 1 = transition, 2 = close at segment end
    ev_kind = np.concatenate([np.zeros(np.count_nonzero(inside[first]), int),
                              np.ones(change.size, int),
                              np.full(np.count_nonzero(inside[last]), 2)])
    order = np.lexsort((ev_kind, ev_pos))
    intervals = []
    start = None
    for pos, val, kind in zip(ev_pos[order], ev_val[order], ev_kind[order]):
        if kind == 0:
            start = val
        elif kind == 2:
            intervals.append((start, val))
            start = None
        elif inside[pos]:  # leaving a band
            intervals.append((start, val))
            start = None
        else:
            start = val
    return [(a, b) for a, b in intervals if b - a >= MIN_ARC]


class BandHierarchy:
    """Band sets ``sigma_n`` and their nested intersections ``B_n`` for one pair.

    For ``C >= 1`` an angle outside ``sigma_j u sigma_{j+1}`` has
    ``|x_m| > C`` for every later ``m`` (the escape window argument), so
    ``sigma_m`` lies inside ``B_{m-2}``.  Level ``m`` is therefore sampled
    only on the arcs of ``B_{m-2}``.  Every arc gets the density of a uniform
    grid of ``max(grid, 8 f_{n+1})`` angles and never fewer than ``per_arc``
    points, which resolves bands far narrower than the global grid alone.
    """

    def __init__(self, pair, C=None, grid=DEFAULT_GRID, per_arc=256, workers=None, max_samples=MAX_GRID):
        if grid < 2**12:
            raise InputError("grid must be at least 2^12")
        self.pair = pair
        self.C = window_constant(pair) if C is None else float(C)
        if self.C < 1.0:
            raise InputError("the window constant C must be >= 1")
        self.grid = int(grid)
        self.per_arc = int(per_arc)
        self.workers = workers
        self.max_samples = max_samples
        self._sigma = {}
        self._b = {}

    def _parent(self, n: int) -> ArcSet:
        return ArcSet.full() if n <= 2 else self.b(n - 2)

    def sigma(self, n: int) -> ArcSet:
        if n < 1:
            raise InputError("band level n must be >= 1")
        if n > 88:
            raise ResourceError(f"level {n} is beyond the supported range")
        if n not in self._sigma:
            parent = self._parent(n)
            if parent.is_empty:
                self._sigma[n] = ArcSet.empty(n, self.C)
                return self._sigma[n]
            pieces = parent.pieces
            lengths = pieces[:, 1] - pieces[:, 0]
            density = max(self.grid, 8 * fib_number(n + 1))
            samples = np.maximum(self.per_arc, np.ceil(density * lengths / TWO_PI) + 1).astype(int)
            if samples.sum() > self.max_samples:
                raise ResourceError(f"level {n} needs {samples.sum()} samples, above the budget of {self.max_samples}")
            intervals = _bands_within(self.pair, n - 1, pieces, samples, self.C, self.workers)
            self._sigma[n] = ArcSet.from_intervals(intervals, n, self.C)
        return self._sigma[n]

    def b(self, n: int) -> ArcSet:
        """``B_n`` (``B_0`` is the full circle)."""
        if n <= 0:
            return ArcSet.full(0, self.C)
        if n not in self._b:
            prev = self.b(n - 1)
            self._b[n] = prev.intersect(self.sigma(n).union(self.sigma(n + 1))).with_meta(n, self.C)
        return self._b[n]


_HIERARCHIES = {}


def hierarchy(pair, C=None, grid=DEFAULT_GRID, workers=None) -> BandHierarchy:
    """Shared :class:`BandHierarchy` per ``(pair, C, grid)``; results do not depend on ``workers``."""
    key = (pair, C, grid)
    h = _HIERARCHIES.get(key)
    if h is None:
        if len(_HIERARCHIES) > 32:
            _HIERARCHIES.clear()
        h = _HIERARCHIES[key] = BandHierarchy(pair, C=C, grid=grid, workers=workers)
    h.workers = workers
    return h


def band_set(pair: VerblunskyPair, n: int, grid: int = DEFAULT_GRID, C: float | None = None, workers: int | None = None) -> ArcSet:
    """``sigma_n = {theta : |x_{n-1}(theta)| <= C}`` as an arc set.

    Band edges are refined by bisection to ~1e-13; a sign change of ``x_{n-1}``
    between two outside samples (a band narrower than the sampling step) is
    located and refined the same way.  Arcs shorter than 1e-12 are dropped.
    """
    return hierarchy(pair, C, grid, workers).sigma(n)


def b_infinity_approx(pair: VerblunskyPair, n_max: int, grid: int = DEFAULT_GRID, C: float | None = None, workers: int | None = None) -> ArcSet:
    """``Intersection over n = 1..n_max of (sigma_n u sigma_{n+1})``."""
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    return hierarchy(pair, C, grid, workers).b(n_max)


def invariant_nonnegativity_check(pair: VerblunskyPair, approx: ArcSet, samples_per_arc: int = 1000):
    """``(min I, #samples with I < -1e-6)`` over ``samples_per_arc`` points of every arc.

    An empty approximation returns ``(nan, 0)``.
    """
    if approx.is_empty:
        return math.nan, 0
    pts = [np.linspace(lo, hi if hi >= lo else hi + TWO_PI, samples_per_arc) for lo, hi in approx.arcs]
    vals = invariant_on_circle(pair, np.concatenate(pts))
    return float(vals.min()), int(np.count_nonzero(vals < -1e-6))


def default_workers() -> int:
    env = os.environ.get("FIBCMV_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
