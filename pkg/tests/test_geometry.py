"""Center-line construction, interpolation, resampling and control points."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scrn.errors import (
    DegenerateOrientation,
    DegeneratePolyline,
    DegenerateQuad,
    InvalidK,
    InvalidQuad,
    OutOfRange,
)
from scrn.geometry import (
    DEFAULT_K,
    CenterPolyline,
    CharQuad,
    GeoSample,
    TextInstance,
    build_center_point_list,
    control_points,
    interpolate_attributes,
    normal_orientation,
    polyline_hausdorff,
    resample_equidistant,
)


def rot(deg):
    a = math.radians(deg)
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


def box(x0, y0, w, h):
    return CharQuad([(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)])


def straight_line(points, s=1.0):
    pts = np.asarray(points, dtype=float)
    d = np.diff(pts, axis=0)
    d = np.vstack([d, d[-1:]])
    theta = d / np.hypot(d[:, 0], d[:, 1])[:, None]
    phi = np.column_stack([-theta[:, 1], theta[:, 0]])
    return CenterPolyline(pts, np.full(len(pts), s), theta, phi)


# hypothesis strategies

@st.composite
def polylines(draw, min_points=2, max_points=12):
    n = draw(st.integers(min_points, max_points))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    steps = rng.uniform(0.5, 20.0, n - 1)
    headings = np.cumsum(rng.uniform(-0.6, 0.6, n - 1)) + rng.uniform(-math.pi, math.pi)
    pts = np.vstack([[0.0, 0.0], np.cumsum(np.column_stack(
        [steps * np.cos(headings), steps * np.sin(headings)]), axis=0)])
    pts += rng.uniform(-100, 100, 2)
    t_ang = np.concatenate([headings, headings[-1:]])
    theta = np.column_stack([np.cos(t_ang), np.sin(t_ang)])
    p_ang = t_ang + math.pi / 2 + rng.uniform(-0.7, 0.7, n)
    phi = np.column_stack([np.cos(p_ang), np.sin(p_ang)])
    return CenterPolyline(pts, rng.uniform(0.5, 30.0, n), theta, phi)


@st.composite
def words(draw):
    """Random rotated and sheared character sequences along a gentle curve."""
    m = draw(st.integers(1, 8))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    w, h = rng.uniform(4, 30), rng.uniform(4, 30)
    heading = rng.uniform(-1.0, 1.0)
    quads, c = [], np.zeros(2)
    for _ in range(m):
        t = np.array([math.cos(heading), math.sin(heading)])
        n = np.array([-t[1], t[0]])
        shear = rng.uniform(-0.4, 0.4)
        down = math.cos(shear) * n + math.sin(shear) * t
        hw, hh = 0.5 * w * t, 0.5 * h * down
        quads.append(CharQuad([c - hw - hh, c + hw - hh, c + hw + hh, c - hw + hh]))
        c = c + w * t
        heading += rng.uniform(-0.3, 0.3)
    return TextInstance(tuple(quads))


# ---------------------------------------------------------------------------
# CharQuad and TextInstance validation
# ---------------------------------------------------------------------------

class TestCharQuad:
    def test_center_is_corner_mean(self):
        q = CharQuad([(0, 0), (4, 1), (5, 7), (-1, 6)])
        np.testing.assert_allclose(q.center, [2.0, 3.5])

    def test_counter_clockwise_rejected(self):
        with pytest.raises(InvalidQuad):
            CharQuad([(0, 0), (0, 10), (10, 10), (10, 0)])

    def test_bow_tie_rejected(self):
        with pytest.raises(InvalidQuad):
            CharQuad([(0, 0), (10, 10), (10, 0), (0, 10)])

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidQuad):
            CharQuad([(0, 0), (np.nan, 0), (10, 10), (0, 10)])

    def test_wrong_shape_rejected(self):
        with pytest.raises(InvalidQuad):
            CharQuad([(0, 0), (1, 0), (1, 1)])

    def test_zero_length_vertical_edge(self):
        with pytest.raises(DegenerateQuad):
            CharQuad([(0, 0), (10, 0), (10, 10), (0, 0)])

    def test_empty_instance_rejected(self):
        with pytest.raises(ValueError):
            TextInstance(())


# ---------------------------------------------------------------------------
# build_center_point_list
# ---------------------------------------------------------------------------

class TestBuildCenterPointList:
    def test_single_square(self):
        line = build_center_point_list(TextInstance([box(0, 0, 10, 10)]))
        np.testing.assert_array_equal(line.centers, [[0, 5], [5, 5], [10, 5]])
        np.testing.assert_array_equal(line.scales, [5, 5, 5])
        np.testing.assert_allclose(line.theta, [[1, 0]] * 3)
        np.testing.assert_allclose(line.phi, [[0, 1]] * 3)

    def test_two_unit_squares(self):
        line = build_center_point_list(TextInstance([box(0, 0, 1, 1), box(1, 0, 1, 1)]))
        np.testing.assert_allclose(line.centers, [[0, 0.5], [0.5, 0.5], [1.5, 0.5], [2, 0.5]])
        np.testing.assert_allclose(line.theta[1:3], [[1, 0], [1, 0]])

    def test_rotated_quad_phi(self):
        # corners of a 10x10 square rotated by 30 degrees about (20, 20), built by hand
        a = math.radians(30)
        corners = []
        for dx, dy in [(-5, -5), (5, -5), (5, 5), (-5, 5)]:
            corners.append((20 + dx * math.cos(a) - dy * math.sin(a),
                            20 + dx * math.sin(a) + dy * math.cos(a)))
        line = build_center_point_list(TextInstance([CharQuad(corners)]))
        top_mid = np.mean([corners[0], corners[1]], axis=0)
        bottom_mid = np.mean([corners[2], corners[3]], axis=0)
        expect = (bottom_mid - top_mid) / np.linalg.norm(bottom_mid - top_mid)
        np.testing.assert_allclose(line.phi[1], expect, atol=1e-12)
        assert line.phi[1, 1] == pytest.approx(math.cos(a), abs=1e-12)
        assert line.phi[1, 0] == pytest.approx(-math.sin(a), abs=1e-12)

    def test_scale_is_half_mean_edge(self):
        # trapezoid: left edge 8, right edge 12
        q = CharQuad([(0, 2), (10, 0), (10, 12), (0, 10)])
        line = build_center_point_list(TextInstance([q]))
        assert line.scales[1] == pytest.approx(0.25 * (8 + 12))

    def test_theta_of_last_center_looks_back(self):
        quads = [box(0, 0, 10, 10), box(10, 5, 10, 10), box(20, 0, 10, 10)]
        line = build_center_point_list(TextInstance(quads))
        c = line.centers
        back = (c[3] - c[2]) / np.linalg.norm(c[3] - c[2])
        tail = (c[4] - c[3]) / np.linalg.norm(c[4] - c[3])
        np.testing.assert_allclose(line.theta[3], back)
        np.testing.assert_allclose(line.theta[4], tail)

    def test_head_and_tail_copy_neighbour_attributes(self):
        quads = [CharQuad([(0, 0), (10, 1), (10, 13), (0, 10)]), box(10, 0, 10, 16)]
        line = build_center_point_list(TextInstance(quads))
        assert line.scales[0] == line.scales[1]
        assert line.scales[-1] == line.scales[-2]
        np.testing.assert_array_equal(line.phi[0], line.phi[1])
        np.testing.assert_array_equal(line.phi[-1], line.phi[-2])

    def test_coincident_centers(self):
        with pytest.raises(DegeneratePolyline):
            build_center_point_list(TextInstance([box(0, 0, 10, 10), box(0, 0, 10, 10)]))

    @settings(max_examples=60, deadline=None)
    @given(words(), st.floats(-180, 180), st.floats(-500, 500), st.floats(-500, 500))
    def test_rigid_equivariance(self, word, deg, tx, ty):
        r = rot(deg)
        base = build_center_point_list(word)
        moved = build_center_point_list(word.transformed(r, (tx, ty)))
        np.testing.assert_allclose(moved.centers, base.centers @ r.T + (tx, ty), atol=1e-6)
        np.testing.assert_allclose(moved.scales, base.scales, atol=1e-6)
        np.testing.assert_allclose(moved.theta, base.theta @ r.T, atol=1e-6)
        np.testing.assert_allclose(moved.phi, base.phi @ r.T, atol=1e-6)

    @settings(max_examples=60, deadline=None)
    @given(words(), st.floats(0.1, 10))
    def test_uniform_scaling(self, word, alpha):
        base = build_center_point_list(word)
        scaled = build_center_point_list(word.transformed(alpha * np.eye(2)))
        np.testing.assert_allclose(scaled.centers, alpha * base.centers, atol=1e-6)
        np.testing.assert_allclose(scaled.scales, alpha * base.scales, atol=1e-6)
        np.testing.assert_allclose(scaled.theta, base.theta, atol=1e-6)
        np.testing.assert_allclose(scaled.phi, base.phi, atol=1e-6)

    @settings(max_examples=60, deadline=None)
    @given(words())
    def test_orientations_are_unit(self, word):
        line = build_center_point_list(word)
        for g in line.samples:
            assert abs(g.cos_theta ** 2 + g.sin_theta ** 2 - 1) <= 1e-9
            assert abs(g.cos_phi ** 2 + g.sin_phi ** 2 - 1) <= 1e-9
            assert g.s > 0


# ---------------------------------------------------------------------------
# interpolate_attributes
# ---------------------------------------------------------------------------

class TestInterpolateAttributes:
    def two_point(self, s=(2.0, 6.0), theta=((1, 0), (0, 1))):
        return CenterPolyline([(0, 0), (10, 0)], list(s), list(theta), [(0, 1), (0, 1)])

    def test_endpoints_unchanged(self):
        line = self.two_point()
        assert interpolate_attributes(line, 0.0) == line.sample(0)
        assert interpolate_attributes(line, 1.0) == line.sample(1)

    def test_scale_midpoint(self):
        g = interpolate_attributes(self.two_point(), 0.5)
        assert g.s == pytest.approx(4.0)
        assert (g.x, g.y) == pytest.approx((5.0, 0.0))

    def test_orientation_renormalized(self):
        g = interpolate_attributes(self.two_point(), 0.5)
        assert g.cos_theta == pytest.approx(math.sqrt(0.5), abs=1e-12)
        assert g.sin_theta == pytest.approx(math.sqrt(0.5), abs=1e-12)

    def test_out_of_range(self):
        for t in (-1e-9, 1.0000001, float("nan")):
            with pytest.raises(OutOfRange):
                interpolate_attributes(self.two_point(), t)

    def test_antipodal_orientations(self):
        line = self.two_point(theta=((1, 0), (-1, 0)))
        with pytest.raises(DegenerateOrientation):
            interpolate_attributes(line, 0.5)

    def test_uses_arc_length_not_index(self):
        # first segment 1 long, second 9 long; t=0.5 lies inside the second
        line = straight_line([(0, 0), (1, 0), (10, 0)])
        g = interpolate_attributes(line, 0.5)
        assert g.x == pytest.approx(5.0)


# ---------------------------------------------------------------------------
# resample_equidistant
# ---------------------------------------------------------------------------

class TestResampleEquidistant:
    def test_straight_k4(self):
        line = straight_line([(0, 0), (9, 0)])
        out = resample_equidistant(line, 4)
        np.testing.assert_allclose(out.centers[:, 0], [0, 3, 6, 9])

    def test_default_k(self):
        assert DEFAULT_K == 10
        assert len(resample_equidistant(straight_line([(0, 0), (9, 0)]))) == 10

    def test_invalid_k(self):
        for k in (1, 0, -3):
            with pytest.raises(InvalidK):
                resample_equidistant(straight_line([(0, 0), (9, 0)]), k)

    def test_quarter_circle_equal_chords(self):
        r = 50.0
        a = np.linspace(0, math.pi / 2, 65)  # 64 segments
        line = straight_line(np.column_stack([r * np.cos(a), r * np.sin(a)]))
        out = resample_equidistant(line, 5)
        chords = np.hypot(*np.diff(out.centers, axis=0).T)
        assert chords.max() / chords.min() - 1 <= 0.01
        # brute-force oracle: dense arc-length table of the input polyline
        dense = np.vstack([p + (q - p) * u for p, q in zip(line.centers[:-1], line.centers[1:])
                           for u in np.linspace(0, 1, 200, endpoint=False)[:, None]]
                          + [line.centers[-1:]])
        cum = np.concatenate([[0], np.cumsum(np.hypot(*np.diff(dense, axis=0).T))])
        for j, c in enumerate(out.centers):
            i = np.argmin(np.abs(cum - j / 4 * cum[-1]))
            assert np.linalg.norm(dense[i] - c) < 0.05

    def test_endpoints_coincide(self):
        line = straight_line([(0, 0), (3, 4), (10, 4)])
        out = resample_equidistant(line, 7)
        np.testing.assert_array_equal(out.centers[0], line.centers[0])
        np.testing.assert_array_equal(out.centers[-1], line.centers[-1])

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 15), st.floats(0.5, 20), st.floats(-180, 180))
    def test_uniform_polyline_identity(self, n, step, deg):
        d = np.array([math.cos(math.radians(deg)), math.sin(math.radians(deg))])
        pts = np.arange(n)[:, None] * step * d + (3.0, -7.0)
        line = straight_line(pts)
        np.testing.assert_allclose(resample_equidistant(line, n).centers, pts, atol=1e-9)


# ---------------------------------------------------------------------------
# control_points
# ---------------------------------------------------------------------------

class TestControlPoints:
    def test_upright(self):
        line = CenterPolyline([(5, 5), (6, 5)], [2, 2], [(1, 0), (1, 0)], [(0, 1), (0, 1)])
        cp = control_points(line)
        np.testing.assert_allclose(cp.points[:2], [(5, 3), (5, 7)])

    def test_sideways_character(self):
        line = CenterPolyline([(0, 0), (0, 1)], [1, 1], [(0, 1), (0, 1)], [(1, 0), (1, 0)])
        cp = control_points(line)
        np.testing.assert_allclose(cp.points[:2], [(-1, 0), (1, 0)])

    def test_ordering_interleaved(self):
        line = straight_line([(0, 0), (10, 0), (20, 0)], s=3.0)
        cp = control_points(line)
        assert len(cp) == 6
        np.testing.assert_array_equal(cp.top, cp.points[0::2])
        assert np.all(cp.top[:, 1] < cp.bottom[:, 1])

    def test_k3_arc_symmetry(self):
        a = np.radians([200, 240, 270, 300, 340])
        arc = CenterPolyline(np.column_stack([40 * np.cos(a), 40 * np.sin(a)]), [4, 5, 6, 5, 4],
                             np.column_stack([-np.sin(a), np.cos(a)]),
                             np.column_stack([-np.cos(a), -np.sin(a)]))
        res = resample_equidistant(arc, 3)
        cp = control_points(res)
        np.testing.assert_allclose((cp.top + cp.bottom) / 2, res.centers, atol=1e-9)
        np.testing.assert_allclose(np.hypot(*(cp.top - cp.bottom).T), 2 * res.scales, atol=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(polylines(), st.integers(2, 20))
    def test_symmetry_identities(self, line, k):
        res = resample_equidistant(line, k)
        cp = control_points(res)
        np.testing.assert_allclose((cp.top + cp.bottom) / 2, res.centers, rtol=0, atol=1e-9)
        np.testing.assert_allclose(np.hypot(*(cp.top - cp.bottom).T), 2 * res.scales,
                                   rtol=0, atol=1e-9)


# ---------------------------------------------------------------------------
# CenterPolyline helpers
# ---------------------------------------------------------------------------

class TestCenterPolyline:
    def test_from_samples_round_trip(self):
        line = straight_line([(0, 0), (1, 1), (3, 1)], s=2.5)
        again = CenterPolyline.from_samples(line.samples)
        np.testing.assert_array_equal(again.centers, line.centers)
        assert isinstance(line.sample(0), GeoSample)

    def test_rejects_single_point(self):
        with pytest.raises(DegeneratePolyline):
            CenterPolyline([(0, 0)], [1], [(1, 0)], [(0, 1)])

    def test_rejects_non_unit_orientation(self):
        with pytest.raises(DegenerateOrientation):
            CenterPolyline([(0, 0), (1, 0)], [1, 1], [(2, 0), (1, 0)], [(0, 1), (0, 1)])

    def test_rejects_non_positive_scale(self):
        with pytest.raises(ValueError):
            CenterPolyline([(0, 0), (1, 0)], [1, 0], [(1, 0), (1, 0)], [(0, 1), (0, 1)])

    def test_normal_orientation(self):
        line = straight_line([(0, 0), (0, 5)])
        np.testing.assert_allclose(normal_orientation(line).phi, [(-1, 0), (-1, 0)])

    def test_hausdorff_of_offset_lines(self):
        assert polyline_hausdorff([(0, 0), (10, 0)], [(0, 2), (10, 2)]) == pytest.approx(2.0)
        assert polyline_hausdorff([(0, 0), (10, 0)], [(0, 0), (12, 0)]) == pytest.approx(2.0)
