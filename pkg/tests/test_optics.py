import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from focusplan.geometry import SampleSet
from focusplan.optics import (CameraIntrinsics, CameraView, CostParams, InvalidFocusDistance, clamp_focus,
                              dof_limits, focus_interval_arrays, focus_interval_for_depth, in_frustum,
                              pointwise_cost)

from oracles import near_far

INTR = CameraIntrinsics()
CAM = CameraView((0.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), INTR)


def test_defaults_match_published_setup():
    # published setup: H = 10,000 mm, F = 50 mm, thresholds 1e-6 and 750 mm, w_i = 1/3, 2:3 images
    assert INTR.hyperfocal == 10_000.0 and INTR.focal_length == 50.0
    p = CostParams()
    assert p.eps1 == 1e-6 and p.eps2 == 750.0
    assert p.w1 == p.w2 == p.w3 == pytest.approx(1 / 3)
    assert INTR.aspect == pytest.approx(2 / 3)


@pytest.mark.parametrize("s, near, far", [(5000, 3344.48, 9900.99), (750, 700.93, 806.45)])
def test_dof_limits_examples(s, near, far):
    lim = dof_limits(s, INTR)
    n_ref, f_ref = near_far(s)
    assert lim.near == pytest.approx(near, abs=0.01) and lim.near == pytest.approx(float(n_ref), rel=1e-15)
    assert lim.far == pytest.approx(far, abs=0.01) and lim.far == pytest.approx(float(f_ref), rel=1e-15)


def test_far_limit_unbounded_at_hyperfocal_plus_focal():
    assert dof_limits(10_050.0, INTR).far is None
    assert dof_limits(20_000.0, INTR).far is None
    assert dof_limits(10_049.0, INTR).far is not None


@pytest.mark.parametrize("s", [50.0, 10.0, -1.0])
def test_focus_at_or_below_focal_length_rejected(s):
    with pytest.raises(InvalidFocusDistance):
        dof_limits(s, INTR)


def test_focus_interval_example():
    iv = focus_interval_for_depth(750.0, INTR)
    assert iv.lo == pytest.approx(701.16, abs=0.01)
    assert iv.hi == pytest.approx(806.76, abs=0.01)


def test_focus_interval_round_trip_5000():
    iv = focus_interval_for_depth(5000.0, INTR)
    assert dof_limits(iv.hi, INTR).near == pytest.approx(5000.0, abs=1e-6)
    assert dof_limits(iv.lo, INTR).far == pytest.approx(5000.0, abs=1e-6)


def test_focus_interval_unbounded_at_hyperfocal():
    assert focus_interval_for_depth(10_000.0, INTR).hi is None
    lo, hi = focus_interval_arrays(np.array([10_000.0, 20_000.0]), 50.0, 10_000.0)
    assert np.all(np.isinf(hi))


@settings(max_examples=300, deadline=None)
@given(st.floats(60.0, 9_999.0))
def test_interval_endpoints_bracket_depth(d):
    iv = focus_interval_for_depth(d, INTR)
    assert dof_limits(iv.lo, INTR).far == pytest.approx(d, rel=1e-9)
    assert dof_limits(iv.hi, INTR).near == pytest.approx(d, rel=1e-9)
    assert iv.lo <= d <= iv.hi


@settings(max_examples=200, deadline=None)
@given(st.floats(60.0, 9_000.0), st.floats(1e-6, 1.0 - 1e-6))
def test_depth_in_dof_iff_focus_in_interval(d, t):
    iv = focus_interval_for_depth(d, INTR)
    # probe just inside and just outside each end
    for s, expect in ((iv.lo * (1 + 1e-9), True), (iv.lo * (1 - 1e-6), False),
                      (iv.lo + t * (iv.hi - iv.lo), True), (iv.hi * (1 + 1e-6), False)):
        if s <= INTR.focal_length:
            continue
        assert dof_limits(s, INTR).contains(d) == expect


@settings(max_examples=100, deadline=None)
@given(st.floats(60.0, 10_000.0), st.floats(60.0, 10_000.0))
def test_limits_monotone_in_focus(s1, s2):
    a, b = sorted((s1, s2))
    la, lb = dof_limits(a, INTR), dof_limits(b, INTR)
    assert la.near <= lb.near
    if lb.far is not None:
        assert la.far <= lb.far


def test_in_frustum_examples():
    s = 800.0
    assert in_frustum((0.0, s, 0.0), CAM, s)
    assert not in_frustum((0.0, 0.5 * dof_limits(s, INTR).near, 0.0), CAM, s)
    half_width = s * (INTR.width / 2) / INTR.fx
    assert not in_frustum((half_width * 1.01, s, 0.0), CAM, s)
    assert in_frustum((half_width, s, 0.0), CAM, s)  # closed image bounds


def _sample(pos, normal=(0.0, 1.0, 0.0)):
    return SampleSet.from_arrays(np.array([pos], dtype=float), np.array([normal], dtype=float))[0]


def test_pointwise_cost_examples():
    p = _sample((0.0, 750.0, 0.0))
    assert pointwise_cost(p, CAM, 750.0, CostParams(), visible=True) == pytest.approx(0.1875)
    assert pointwise_cost(p, CAM, 3000.0, CostParams(), visible=True) == pytest.approx(0.1875 + 1 / 3)
    assert pointwise_cost(p, CAM, 750.0, CostParams(), visible=False) == 1.0


def test_pointwise_cost_terms_clamp():
    # far away and far off-axis: both static terms saturate at 1
    p = _sample((5000.0, 5000.0, 0.0), (0.0, 1.0, 0.0))
    assert pointwise_cost(p, CAM, 5000.0, CostParams(), visible=True) == pytest.approx(2 / 3 + 1 / 3)


def test_pointwise_cost_rejects_backfacing_visible():
    p = _sample((0.0, 750.0, 0.0), (0.0, -1.0, 0.0))
    with pytest.raises(ValueError):
        pointwise_cost(p, CAM, 750.0, CostParams(), visible=True)


def test_clamp_focus():
    assert clamp_focus(50.0, INTR) > 50.0 and clamp_focus(50.0, INTR) == math.nextafter(50.0, math.inf)
    assert clamp_focus(700.0, INTR) == 700.0


def test_camera_view_validation():
    with pytest.raises(ValueError):
        CameraView((0, 0, 0), (0, 1, 0), (0, 1, 0), INTR)
    with pytest.raises(ValueError):
        CameraIntrinsics(focal_length=50.0, hyperfocal=40.0)
