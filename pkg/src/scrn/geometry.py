"""Geometric text representation.

A word is a list of character quadrilaterals.  From it we build the text
center line (TCL): the midpoint of the first character's left edge, every
character center, and the midpoint of the last character's right edge.  Each
point carries a scale ``s`` (half the character height), the text orientation
``theta`` (tangent of the center line) and the character orientation ``phi``
(top-to-bottom direction of the glyph).

Coordinates follow the image convention: x to the right, y downward.  Angles
are only ever stored as ``(cos, sin)`` pairs.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateOrientation,
    DegeneratePolyline,
    DegenerateQuad,
    InvalidK,
    InvalidQuad,
    OutOfRange,
)

DEFAULT_K = 10

_COINCIDENT_TOL = 1e-9
_ORIENTATION_TOL = 1e-6
_UNIT_TOL = 1e-9


def _frozen(a, shape=None, name="array"):
    a = np.array(a, dtype=np.float64)
    if shape is not None and a.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {a.shape}")
    a.setflags(write=False)
    return a


def _unit(v, tol=_ORIENTATION_TOL):
    v = np.asarray(v, dtype=np.float64)
    n = np.hypot(v[..., 0], v[..., 1])
    if np.any(n < tol):
        raise DegenerateOrientation("cannot normalize a (near) zero-length direction")
    return v / n[..., None]


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_segment(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and \
            ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True
    return ((d1 == 0 and on_segment(q1, q2, p1)) or (d2 == 0 and on_segment(q1, q2, p2))
            or (d3 == 0 and on_segment(p1, p2, q1)) or (d4 == 0 and on_segment(p1, p2, q2)))


def signed_area(corners):
    """Shoelace area; positive for corners listed clockwise on screen (y down)."""
    c = np.asarray(corners, dtype=np.float64)
    x, y = c[:, 0], c[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True, eq=False)
class CharQuad:
    """Character box, corners ordered top-left, top-right, bottom-right, bottom-left."""

    corners: np.ndarray

    def __post_init__(self):
        c = np.array(self.corners, dtype=np.float64)
        if c.shape != (4, 2):
            raise InvalidQuad(f"a quad needs 4 corners of 2 coordinates, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidQuad("quad corners must be finite")
        if np.hypot(*(c[3] - c[0])) == 0 or np.hypot(*(c[2] - c[1])) == 0:
            raise DegenerateQuad("quad has a zero-length vertical edge")
        if _segments_cross(c[0], c[1], c[2], c[3]) or _segments_cross(c[1], c[2], c[3], c[0]):
            raise InvalidQuad("quad is self-intersecting")
        if signed_area(c) <= 0:
            raise InvalidQuad("quad corners must run clockwise on screen (TL, TR, BR, BL)")
        c.setflags(write=False)
        object.__setattr__(self, "corners", c)

    @property
    def center(self):
        return self.corners.mean(axis=0)

    def transformed(self, matrix, offset=(0.0, 0.0)):
        """Return the quad mapped by ``p -> matrix @ p + offset``."""
        m = np.asarray(matrix, dtype=np.float64)
        return CharQuad(self.corners @ m.T + np.asarray(offset, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class TextInstance:
    chars: tuple
    transcript: Optional[str] = None

    def __post_init__(self):
        chars = tuple(q if isinstance(q, CharQuad) else CharQuad(q) for q in self.chars)
        if not chars:
            raise ValueError("a text instance needs at least one character")
        object.__setattr__(self, "chars", chars)

    def transformed(self, matrix, offset=(0.0, 0.0)):
        return TextInstance(tuple(q.transformed(matrix, offset) for q in self.chars),
                            self.transcript)


@dataclass(frozen=True)
class GeoSample:
    """A center-line point with its geometric attributes."""

    x: float
    y: float
    s: float
    cos_theta: float
    sin_theta: float
    cos_phi: float
    sin_phi: float

    @property
    def center(self):
        return np.array([self.x, self.y])


@dataclass(frozen=True, eq=False)
class CenterPolyline:
    """Ordered center points (head to tail) with per-point attributes.

    ``centers``, ``theta`` and ``phi`` are ``(n, 2)`` arrays, ``scales`` is
    ``(n,)``.  ``theta`` and ``phi`` hold unit ``(cos, sin)`` rows.
    """

    centers: np.ndarray
    scales: np.ndarray
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        centers = _frozen(self.centers, name="centers")
        n = len(centers)
        if centers.ndim != 2 or centers.shape[1] != 2 or n < 2:
            raise DegeneratePolyline("a center polyline needs at least 2 points")
        scales = _frozen(self.scales, (n,), "scales")
        theta = _frozen(self.theta, (n, 2), "theta")
        phi = _frozen(self.phi, (n, 2), "phi")
        if not (np.all(np.isfinite(centers)) and np.all(np.isfinite(scales))):
            raise DegeneratePolyline("center polyline values must be finite")
        if np.any(scales <= 0):
            raise ValueError("scales must be positive")
        for name, arr in (("theta", theta), ("phi", phi)):
            if not np.all(np.abs(np.hypot(arr[:, 0], arr[:, 1]) - 1) <= _UNIT_TOL):
                raise DegenerateOrientation(f"{name} rows must be unit (cos, sin) pairs")
        seg = np.hypot(*np.diff(centers, axis=0).T)
        if np.any(seg <= _COINCIDENT_TOL):
            raise DegeneratePolyline("consecutive centers coincide")
        for name, arr in (("centers", centers), ("scales", scales), ("theta", theta), ("phi", phi)):
            object.__setattr__(self, name, arr)

    @classmethod
    def from_samples(cls, samples: Sequence[GeoSample]):
        return cls(
            centers=[(g.x, g.y) for g in samples],
            scales=[g.s for g in samples],
            theta=[(g.cos_theta, g.sin_theta) for g in samples],
            phi=[(g.cos_phi, g.sin_phi) for g in samples],
        )

    def __len__(self):
        return len(self.centers)

    @property
    def samples(self):
        return [self.sample(i) for i in range(len(self))]

    def sample(self, i):
        return GeoSample(
            float(self.centers[i, 0]), float(self.centers[i, 1]), float(self.scales[i]),
            float(self.theta[i, 0]), float(self.theta[i, 1]),
            float(self.phi[i, 0]), float(self.phi[i, 1]),
        )

    @property
    def cumulative_length(self):
        seg = np.hypot(*np.diff(self.centers, axis=0).T)
        return np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def length(self):
        return float(self.cumulative_length[-1])

    def transformed(self, matrix, offset=(0.0, 0.0)):
        """Apply a similarity ``p -> matrix @ p + offset`` (scale read from the determinant)."""
        m = np.asarray(matrix, dtype=np.float64)
        scale = np.sqrt(abs(np.linalg.det(m)))
        return CenterPolyline(self.centers @ m.T + np.asarray(offset, dtype=np.float64),
                              self.scales * scale,
                              _unit(self.theta @ m.T), _unit(self.phi @ m.T))


@dataclass(frozen=True, eq=False)
class ControlPoints:
    """``2k`` points ordered ``top_1, bottom_1, ..., top_k, bottom_k``."""

    points: np.ndarray

    def __post_init__(self):
        p = _frozen(self.points, name="points")
        if p.ndim != 2 or p.shape[1] != 2 or len(p) % 2:
            raise ValueError("control points must be an even-length list of 2-D points")
        object.__setattr__(self, "points", p)

    def __len__(self):
        return len(self.points)

    @property
    def top(self):
        return self.points[0::2]

    @property
    def bottom(self):
        return self.points[1::2]


def _quad_attributes(quad: CharQuad):
    tl, tr, br, bl = quad.corners
    left, right = np.hypot(*(bl - tl)), np.hypot(*(br - tr))
    if left <= 0 or right <= 0:
        raise DegenerateQuad("quad has a zero-length vertical edge")
    s = 0.25 * (left + right)
    down = 0.5 * (bl + br) - 0.5 * (tl + tr)
    return s, _unit(down)


def build_center_point_list(instance: TextInstance) -> CenterPolyline:
    """Build the ``m + 2`` point center line of a word.

    Scale is half the mean of the left and right edge lengths, ``phi`` points
    from the top-edge midpoint to the bottom-edge midpoint, and ``theta`` at
    each point is the direction to the next one (the last character and the
    tail reuse the preceding segment direction).

    >>> q = CharQuad([(0, 0), (10, 0), (10, 10), (0, 10)])
    >>> line = build_center_point_list(TextInstance([q]))
    >>> line.centers.tolist()
    [[0.0, 5.0], [5.0, 5.0], [10.0, 5.0]]
    """
    quads = instance.chars
    attrs = [_quad_attributes(q) for q in quads]
    first, last = quads[0].corners, quads[-1].corners
    head = 0.5 * (first[0] + first[3])
    tail = 0.5 * (last[1] + last[2])
    centers = np.vstack([head, [q.center for q in quads], tail])

    steps = np.diff(centers, axis=0)
    if np.any(np.hypot(*steps.T) <= _COINCIDENT_TOL):
        raise DegeneratePolyline("consecutive center points coincide")
    directions = _unit(steps)

    m = len(quads)
    theta = np.empty((m + 2, 2))
    theta[0] = directions[0]
    for i in range(1, m + 1):
        # c_i -> c_{i+1} among the character centers; the last one looks back
        if i < m:
            theta[i] = directions[i]
        elif m > 1:
            theta[i] = directions[i - 1]
        else:
            theta[i] = directions[i]
    theta[-1] = directions[-1]

    scales = np.array([attrs[0][0]] + [a[0] for a in attrs] + [attrs[-1][0]])
    phi = np.vstack([attrs[0][1]] + [a[1] for a in attrs] + [attrs[-1][1]])
    return CenterPolyline(centers, scales, theta, phi)


def _lerp_orientation(a, b, u):
    v = a + (b - a) * u[:, None]
    n = np.hypot(v[:, 0], v[:, 1])
    if np.any(n < _ORIENTATION_TOL):
        raise DegenerateOrientation("interpolating between opposite orientations")
    return v / n[:, None]


def interpolate_many(polyline: CenterPolyline, ts):
    """Vectorized :func:`interpolate_attributes`.

    Returns ``(centers, scales, theta, phi)`` arrays for arc-length fractions ``ts``.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    if np.any(~np.isfinite(ts)) or np.any(ts < 0) or np.any(ts > 1):
        raise OutOfRange("arc-length fraction must lie in [0, 1]")
    cum = polyline.cumulative_length
    target = ts * cum[-1]
    idx = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(cum) - 2)
    u = (target - cum[idx]) / (cum[idx + 1] - cum[idx])
    u = np.clip(u, 0.0, 1.0)

    c, s, th, ph = polyline.centers, polyline.scales, polyline.theta, polyline.phi
    centers = c[idx] + (c[idx + 1] - c[idx]) * u[:, None]
    scales = s[idx] + (s[idx + 1] - s[idx]) * u
    theta = _lerp_orientation(th[idx], th[idx + 1], u)
    phi = _lerp_orientation(ph[idx], ph[idx + 1], u)

    # endpoints are returned untouched
    for j, t in enumerate(ts):
        if t == 0.0 or t == 1.0:
            i = 0 if t == 0.0 else -1
            centers[j], scales[j], theta[j], phi[j] = c[i], s[i], th[i], ph[i]
    return centers, scales, theta, phi


def interpolate_attributes(polyline: CenterPolyline, t: float) -> GeoSample:
    """Attributes at arc-length fraction ``t`` of the polyline.

    Position and scale are interpolated linearly between the two neighbouring
    points; orientations are interpolated as ``(cos, sin)`` vectors and
    renormalized.
    """
    centers, scales, theta, phi = interpolate_many(polyline, [t])
    return GeoSample(float(centers[0, 0]), float(centers[0, 1]), float(scales[0]),
                     float(theta[0, 0]), float(theta[0, 1]), float(phi[0, 0]), float(phi[0, 1]))


def resample_equidistant(polyline: CenterPolyline, k: int = DEFAULT_K) -> CenterPolyline:
    """Resample to ``k`` points at arc-length fractions ``j / (k - 1)``."""
    if k < 2:
        raise InvalidK(f"k must be at least 2, got {k}")
    ts = np.arange(k) / (k - 1)
    ts[-1] = 1.0
    return CenterPolyline(*interpolate_many(polyline, ts))


def control_points(resampled: CenterPolyline) -> ControlPoints:
    """Fiducial points placed symmetrically about each center along ``phi``.

    ``top = c - s * phi`` and ``bottom = c + s * phi``.  With ``phi`` the unit
    top-to-bottom direction this keeps each pair centred on its center point
    whatever the glyph orientation.
    """
    offset = resampled.scales[:, None] * resampled.phi
    pts = np.empty((2 * len(resampled), 2))
    pts[0::2] = resampled.centers - offset
    pts[1::2] = resampled.centers + offset
    return ControlPoints(pts)


def normal_orientation(polyline: CenterPolyline) -> CenterPolyline:
    """Replace ``phi`` by the center-line normal (``theta`` turned 90 degrees toward +y).

    This is the orientation a rectifier would assume if it ignored the
    character orientation; used as the baseline in ablations.
    """
    normal = np.column_stack([-polyline.theta[:, 1], polyline.theta[:, 0]])
    return CenterPolyline(polyline.centers, polyline.scales, polyline.theta, normal)


def project_onto_polyline(points, vertices):
    """Nearest point on a polyline for each query point.

    Returns ``(fractions, distances)``, where ``fractions`` are arc-length
    fractions of the projections.
    """
    p = np.atleast_2d(np.asarray(points, dtype=np.float64))
    v = np.asarray(vertices, dtype=np.float64)
    a, b = v[:-1], v[1:]
    ab = b - a
    seg_len2 = np.einsum("ij,ij->i", ab, ab)
    ap = p[:, None, :] - a[None, :, :]
    u = np.clip(np.einsum("nij,ij->ni", ap, ab) / seg_len2, 0.0, 1.0)
    foot = a[None] + u[..., None] * ab[None]
    d = np.hypot(*(p[:, None, :] - foot).transpose(2, 0, 1))
    best = np.argmin(d, axis=1)
    rows = np.arange(len(p))
    seg = np.sqrt(seg_len2)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    arc = cum[best] + u[rows, best] * seg[best]
    return arc / cum[-1], d[rows, best]


def polyline_hausdorff(a, b, step=0.25):
    """Symmetric Hausdorff distance between two polylines.

    Each polyline is densified to spacing ``step`` and every dense point is
    measured against the other polyline's segments.
    """
    def densify(v):
        v = np.asarray(v, dtype=np.float64)
        out = [v[:1]]
        for p, q in zip(v[:-1], v[1:]):
            n = max(1, int(np.ceil(np.hypot(*(q - p)) / step)))
            u = np.arange(1, n + 1)[:, None] / n
            out.append(p + (q - p) * u)
        return np.vstack(out)

    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return max(float(project_onto_polyline(densify(a), b)[1].max()),
               float(project_onto_polyline(densify(b), a)[1].max()))
