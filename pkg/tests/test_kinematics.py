"""Footpad geometry: contact points, marker angles and tile engagement."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from foottile.errors import GeometryError
from foottile.kinematics import (ArrayLayout, MarkerPair, SegmentState, contact_point,
                                 footprint_radius, markers_for, rim_point, segment_angle,
                                 segment_angles, tile_engagement)
from foottile.simulation import RollScenario

L5 = ArrayLayout(segment_radius=150.0, dome_radius=5.0)
LAY = ArrayLayout()


def test_contact_point_examples():
    assert contact_point(0.0, L5) == pytest.approx((-5.0, -150.0))
    assert contact_point(math.pi / 2, L5) == pytest.approx((150.0, -5.0), abs=1e-12)
    y, z = contact_point(0.2, L5)
    assert y == pytest.approx(150 * math.sin(0.2) - 5 * math.cos(0.2))
    assert (y, z) == pytest.approx((24.90, -148.00), abs=5e-3)


def test_segment_angle_examples():
    assert segment_angle(MarkerPair((0, 0), (0, 100))) == 0.0
    assert segment_angle(MarkerPair((0, 0), (100, 0))) == pytest.approx(math.pi / 2)
    assert segment_angle(MarkerPair((0, 0), (50, 86.60))) == pytest.approx(math.pi / 6, abs=1e-4)


def test_coincident_markers_rejected():
    with pytest.raises(GeometryError):
        MarkerPair((1.0, 2.0), (1.0, 2.0))
    with pytest.raises(GeometryError):
        segment_angles([[0.0, 0.0]], [[0.0, 0.0]])


@given(st.floats(-1.5, 1.5), st.floats(-500, 500), st.floats(0, 400))
def test_markers_recover_alpha(alpha, y, z):
    assert segment_angle(markers_for(alpha, (y, z))) == pytest.approx(alpha, abs=1e-12)


def test_segment_angle_is_continuous():
    a = np.linspace(0.5, -0.6, 200)
    m1 = np.zeros((a.size, 2))
    m2 = np.column_stack([100 * np.sin(a), 100 * np.cos(a)])
    assert np.max(np.abs(np.diff(segment_angles(m1, m2)))) < 0.01


def test_layout_defaults_and_validation():
    assert LAY.n_tiles == 4
    assert np.degrees(LAY.angles) == pytest.approx([-20, -20 / 3, 20 / 3, 20])
    assert LAY.dome_radius == 6.0 and LAY.rolling_radius == 156.0
    with pytest.raises(GeometryError):
        ArrayLayout(tile_arc_angles=(0.1, 0.0))
    with pytest.raises(GeometryError):
        ArrayLayout(tile_arc_angles=())
    with pytest.raises(GeometryError):
        ArrayLayout(tile_arc_angles=(0.0, 1.0))
    with pytest.raises(GeometryError):
        SegmentState(2.0, (0.0, 0.0))


def _oracle_deflection(state, layout, ground, n=200001):
    # brute force: lowest of many points on each dome's circle
    a, (_, zj) = state.alpha, state.joint_position
    beta = np.linspace(-math.pi, math.pi, n)
    out = []
    for th in layout.angles:
        zc = zj - layout.segment_radius * math.cos(a + th)
        out.append(max(0.0, ground - np.min(zc + layout.dome_radius * np.sin(beta))))
    return np.array(out)


def test_airborne_has_no_deflection():
    s = SegmentState(0.1, (0.0, 400.0))
    assert np.all(tile_engagement(s, LAY, 0.0) == 0.0)


@pytest.mark.parametrize("k", range(4))
def test_aligned_tile_dominates(k):
    alpha = -LAY.angles[k]
    s = SegmentState(alpha, (10.0, LAY.rolling_radius - 1.0))
    d = tile_engagement(s, LAY, 0.0)
    assert np.argmax(d) == k and d[k] == pytest.approx(1.0)
    assert np.count_nonzero(d) == 1
    np.testing.assert_allclose(d, _oracle_deflection(s, LAY, 0.0), atol=1e-6)


@given(st.floats(-0.6, 0.6), st.floats(140.0, 160.0), st.floats(-10, 10))
def test_engagement_matches_oracle(alpha, height, ground):
    s = SegmentState(alpha, (0.0, height + ground))
    np.testing.assert_allclose(tile_engagement(s, LAY, ground),
                               _oracle_deflection(s, LAY, ground, 20001), atol=1e-3)


def test_symmetric_between_middle_tiles():
    s = SegmentState(0.0, (0.0, LAY.rolling_radius - 3.0))
    d = tile_engagement(s, LAY, 0.0)
    assert d[1] == pytest.approx(d[2], abs=1e-9)


@given(st.floats(-0.6, 0.6), st.floats(140, 160), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_engagement_translation_equivariant(alpha, h, dy, dz):
    a = tile_engagement(SegmentState(alpha, (0.0, h)), LAY, 0.0)
    b = tile_engagement(SegmentState(alpha, (dy, h + dz)), LAY, dz)
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_pure_rolling_contact_stays_on_plate():
    # joint at height l + r: the rim point at body angle -alpha touches the plate
    R = LAY.rolling_radius
    for a in np.linspace(-LAY.arc_span / 2, LAY.arc_span / 2, 101):
        y, z = rim_point(a, -a, LAY)
        assert abs(R + z) < 1e-9 and abs(y) < 1e-9
        others = np.linspace(-math.pi / 4, math.pi / 4, 41)
        assert np.all(R + rim_point(a, others, LAY)[1] >= -1e-9)


def test_no_slip_arc_length():
    sc = RollScenario()
    t = np.linspace(0.0, 1.0, 201)
    alpha, yj, _ = sc.state(t)
    # the ground contact sits below the joint, so it advances with the joint
    np.testing.assert_allclose(np.abs(np.diff(yj)),
                               sc.layout.rolling_radius * np.abs(np.diff(alpha)), atol=1e-6)


def test_footprint_radius():
    assert footprint_radius(0.0, 6.0) == 0.0
    assert footprint_radius(6.0, 6.0) == pytest.approx(6.0)
    assert footprint_radius(1.0, 6.0) == pytest.approx(math.sqrt(36 - 25))
