import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fibcmv.arcs import ArcSet
from fibcmv.dimension import (
    LOG_SILVER,
    DimensionEstimate,
    box_count,
    box_counting_dimension,
    bracket_from_invariant,
    local_dimension,
    small_invariant_trend,
)
from fibcmv.errors import InputError
from fibcmv.opuc import VerblunskyPair, design_for_max_invariant
from fibcmv.spectrum import b_infinity_approx

CANTOR_DIM = math.log(2) / math.log(3)


def cantor_set(depth):
    """Depth-k middle-thirds intervals on [0, 1]."""
    pieces = [(0.0, 1.0)]
    for _ in range(depth):
        pieces = [q for lo, hi in pieces for q in ((lo, lo + (hi - lo) / 3), (hi - (hi - lo) / 3, hi))]
    return ArcSet.from_intervals(pieces)


def brute_box_count(pieces, eps):
    boxes = set()
    for lo, hi in pieces:
        boxes.update(range(int(math.floor(lo / eps)), int(math.floor(hi / eps)) + 1))
    return len(boxes)


def test_full_circle_has_dimension_one():
    assert abs(box_counting_dimension(ArcSet.full()).value - 1.0) <= 0.01


def test_point_has_dimension_zero():
    pt = ArcSet.from_intervals([(1.0, 1.0)])
    assert box_counting_dimension(pt, eps_max=0.1, eps_min=1e-6).value <= 0.01


def test_cantor_fixture():
    est = box_counting_dimension(cantor_set(12))
    assert abs(est.value - CANTOR_DIM) <= 0.02
    assert est.r_squared > 0.99


def test_cantor_estimates_converge():
    errs = [abs(box_counting_dimension(cantor_set(k)).value - CANTOR_DIM) for k in (8, 10, 12)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 0.6 * errs[0]


def test_empty_set_and_bad_scales():
    with pytest.raises(InputError):
        box_counting_dimension(ArcSet.empty())
    with pytest.raises(InputError):
        box_counting_dimension(ArcSet.full(), eps_max=0.1, eps_min=0.2)


@given(st.lists(st.tuples(st.floats(0, 6.0), st.floats(0, 0.2)), min_size=1, max_size=12), st.floats(1e-3, 1.0))
def test_box_count_matches_brute_force(raw, eps):
    s = ArcSet.from_intervals([(lo, lo + w) for lo, w in raw])
    assert box_count(s.pieces, eps) == brute_box_count(s.pieces, eps)


def test_bracket_examples():
    lo, hi = bracket_from_invariant(16)
    assert abs(lo - math.log(1 + math.sqrt(2)) / math.log(38)) <= 1e-12
    assert abs(hi - math.log(1 + math.sqrt(2)) / math.log(3)) <= 1e-12
    assert abs(lo - 0.24230) <= 1e-5 and abs(hi - 0.80226) <= 1e-5
    assert bracket_from_invariant(4) is None
    lo, hi = bracket_from_invariant(100)
    assert math.isclose(lo, LOG_SILVER / math.log(62))
    assert math.isclose(hi, LOG_SILVER / math.log(0.5 * (16 + math.sqrt(244))))
    lo, hi = bracket_from_invariant(10)
    assert lo is not None and hi is None
    with pytest.raises(InputError):
        bracket_from_invariant(-1)


def test_bracket_monotone_and_consistent():
    Is = np.geomspace(16, 1e4, 400)
    brackets = [bracket_from_invariant(I) for I in Is]
    lows = np.array([b[0] for b in brackets])
    highs = np.array([b[1] for b in brackets])
    assert np.all(np.diff(lows) < 0) and np.all(np.diff(highs) < 0)
    assert np.all(lows < highs)


def test_estimate_validation_and_report():
    with pytest.raises(ValueError):
        DimensionEstimate(1.2, None, None)
    with pytest.raises(ValueError):
        DimensionEstimate(0.5, None, None, bracket=(0.6, 0.4))
    d = DimensionEstimate(0.5, (math.pi, 0.3), 14, [0.1, 0.01], 0.99, (0.2, 0.6), 24.0).to_dict()
    assert d == {
        "theta_center": math.pi,
        "epsilon": 0.3,
        "level": 14,
        "invariant": 24.0,
        "estimate": 0.5,
        "r_squared": 0.99,
        "bracket": {"lower": 0.2, "upper": 0.6},
    }
    assert DimensionEstimate(0.5, None, None).to_dict()["bracket"] is None


def test_local_dimension_m24_within_bracket():
    est = local_dimension(design_for_max_invariant(24), math.pi, 0.3, 14)
    lo, hi = est.bracket
    assert math.isclose(est.invariant, 24, rel_tol=1e-12)
    assert lo - 0.05 <= est.value <= hi + 0.05
    assert est.level == 14 and est.window == (math.pi, 0.3)


def test_local_dimension_small_invariant_is_large():
    small = local_dimension(design_for_max_invariant(0.5), math.pi, 0.3, 14)
    large = local_dimension(design_for_max_invariant(24), math.pi, 0.3, 14)
    assert small.bracket is None
    assert small.value >= 0.6
    assert small.value > large.value + 0.2


def test_local_dimension_of_unresolved_window_is_one():
    est = local_dimension(VerblunskyPair(0, 0.6), 1.0, 0.3, 2)
    assert abs(est.value - 1.0) <= 0.01


def test_local_dimension_errors():
    pair = design_for_max_invariant(24)
    with pytest.raises(InputError):
        local_dimension(pair, math.pi, 0.0, 8)
    lo, hi = max(b_infinity_approx(pair, 8).gaps(), key=lambda g: g[1] - g[0])
    centre = 0.5 * (lo + hi)
    with pytest.raises(InputError):
        local_dimension(pair, centre, 1e-4, 8)


def test_small_invariant_trend():
    pairs = [design_for_max_invariant(M) for M in (0.05, 0.1, 0.2, 0.4)]
    fit = small_invariant_trend(pairs, level=18)
    assert fit.strictly_increasing
    assert not fit.degenerate
    assert len(fit.residuals) == 4
    assert fit.constant > 0


def test_trend_single_pair_is_degenerate():
    fit = small_invariant_trend([design_for_max_invariant(0.2)], level=12)
    assert fit.degenerate and fit.residuals == []
    assert math.isfinite(fit.constant)


def test_trend_rejects_zero_invariant():
    # alpha = 0 with theta0 = 0 puts the invariant at exactly zero
    with pytest.raises(InputError):
        small_invariant_trend([VerblunskyPair(0, 0.5)], level=8, theta0=0.0)
    with pytest.raises(InputError):
        small_invariant_trend([], level=8)
    with pytest.raises(InputError):
        design_for_max_invariant(0)
