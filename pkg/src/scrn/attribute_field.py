"""Dense geometric attribute maps and center-line extraction.

The six channels are, in order: TCL probability, scale ``s`` (in map
pixels), ``cos theta``, ``sin theta``, ``cos phi`` and ``sin phi``.  Map pixel
``(r, c)`` covers working-image coordinate ``(c * d, r * d)`` for a
downsampling factor ``d``.  Scales are stored in map pixels; everything that
leaves this module (extracted center lines) is in working-image pixels.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage.draw import line as raster_line

from .errors import NoText, OutOfBounds, TooShort
from .geometry import (
    CenterPolyline,
    TextInstance,
    build_center_point_list,
    interpolate_many,
    project_onto_polyline,
)

DEFAULT_THRESHOLD = 0.5
DEFAULT_DOWNSAMPLE = 4

CHANNELS = ("tcl", "s", "cos_theta", "sin_theta", "cos_phi", "sin_phi")

_EIGHT = np.ones((3, 3), dtype=bool)

# striding constants
_MAX_STEPS = 64
_MARCH_STEP = 0.25
_MARCH_REACH = 4.0
_MIN_STEP = 0.5
_END_MARGIN = 1.5
_GRID_END_MARGIN = 1.0
_TURN_ANGLES = (30.0, 60.0, 90.0)
_TURN_CLEARANCE = 0.75


@dataclass(frozen=True, eq=False)
class AttributeMaps:
    """Six-channel attribute field of shape ``(6, H, W)``."""

    data: np.ndarray
    downsample: int = DEFAULT_DOWNSAMPLE

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[0] != 6:
            raise ValueError(f"attribute maps must have shape (6, H, W), got {data.shape}")
        if int(self.downsample) < 1:
            raise ValueError("downsample must be a positive integer")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "downsample", int(self.downsample))

    @classmethod
    def zeros(cls, height, width, downsample=DEFAULT_DOWNSAMPLE):
        return cls(np.zeros((6, height, width)), downsample)

    @property
    def height(self):
        return self.data.shape[1]

    @property
    def width(self):
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape[1:]

    @property
    def tcl(self):
        return self.data[0]

    @property
    def scale(self):
        return self.data[1]

    @property
    def theta(self):
        return self.data[2:4]

    @property
    def phi(self):
        return self.data[4:6]

    def tcl_mask(self, threshold=DEFAULT_THRESHOLD):
        return self.data[0] >= threshold

    def replace(self, data):
        return AttributeMaps(data, self.downsample)


def _rasterize_polyline(points, shape):
    mask = np.zeros(shape, dtype=bool)
    ij = np.floor(points + 0.5).astype(np.int64)
    for (c0, r0), (c1, r1) in zip(ij[:-1], ij[1:]):
        rr, cc = raster_line(r0, c0, r1, c1)
        mask[rr, cc] = True
    return mask


def render_instance(instance: TextInstance, map_height, map_width, downsample=DEFAULT_DOWNSAMPLE):
    """Attribute maps of a single instance (zero away from its TCL)."""
    d = downsample
    poly = build_center_point_list(instance)
    pts = poly.centers / d
    ij = np.floor(pts + 0.5)
    if np.any(ij < 0) or np.any(ij[:, 0] >= map_width) or np.any(ij[:, 1] >= map_height):
        raise OutOfBounds("text center line falls outside the map grid")

    core = _rasterize_polyline(pts, (map_height, map_width))
    rows, cols = np.nonzero(core)
    working = np.column_stack([cols, rows]).astype(np.float64) * d
    fractions, _ = project_onto_polyline(working, poly.centers)
    _, s, theta, phi = interpolate_many(poly, np.clip(fractions, 0.0, 1.0))

    data = np.zeros((6, map_height, map_width))
    data[:, rows, cols] = np.vstack([np.ones_like(s), s / d, theta.T, phi.T])

    # one-pixel expansion; new pixels copy the nearest original TCL pixel
    grown = ndimage.binary_dilation(core, structure=_EIGHT)
    _, (ir, ic) = ndimage.distance_transform_edt(~core, return_indices=True)
    data[:, grown] = data[:, ir[grown], ic[grown]]
    return data, grown


def render_gt_maps(instances, map_height, map_width, downsample=DEFAULT_DOWNSAMPLE) -> AttributeMaps:
    """Ground-truth attribute maps for a list of text instances.

    Each center line is drawn with 8-connected segments in map coordinates,
    attributes are interpolated at the projection of every drawn pixel, and
    the line is then grown by one pixel.  Later instances overwrite earlier
    ones where they overlap.
    """
    if downsample < 1:
        raise ValueError("downsample must be a positive integer")
    data = np.zeros((6, map_height, map_width))
    for inst in instances:
        inst_data, grown = render_instance(inst, map_height, map_width, downsample)
        data[:, grown] = inst_data[:, grown]
    return AttributeMaps(data, downsample)


def normalize_orientations(maps: AttributeMaps, return_flags=False):
    """Rescale both orientation pairs to unit length at every pixel.

    Pixels whose pair has norm below 1e-6 get ``(1, 0)`` for theta and
    ``(0, 1)`` for phi.  With ``return_flags`` the boolean mask of such
    pixels is returned as well.
    """
    data = maps.data.copy()
    flags = np.zeros(maps.shape, dtype=bool)
    for ch, fallback in ((2, (1.0, 0.0)), (4, (0.0, 1.0))):
        pair = data[ch:ch + 2]
        norm = np.sqrt(pair[0] ** 2 + pair[1] ** 2)
        bad = norm < 1e-6
        safe = np.where(bad, 1.0, norm)
        pair = pair / safe
        pair[0][bad], pair[1][bad] = fallback
        data[ch:ch + 2] = pair
        flags |= bad
    out = maps.replace(data)
    return (out, flags) if return_flags else out


class _Tracer:
    """Striding walk over one connected TCL component."""

    def __init__(self, maps: AttributeMaps, component):
        self.maps = maps
        self.mask = component
        self.h, self.w = component.shape

    def inside(self, p):
        c, r = np.floor(p + 0.5).astype(np.int64)
        return 0 <= r < self.h and 0 <= c < self.w and bool(self.mask[r, c])

    def sample(self, p, channels):
        """Bilinear read restricted to component pixels (weights renormalized)."""
        x, y = p
        x0, y0 = int(np.floor(x)), int(np.floor(y))
        fx, fy = x - x0, y - y0
        acc = np.zeros(len(channels))
        total = 0.0
        for dr, dc, wt in ((0, 0, (1 - fx) * (1 - fy)), (0, 1, fx * (1 - fy)),
                           (1, 0, (1 - fx) * fy), (1, 1, fx * fy)):
            r, c = y0 + dr, x0 + dc
            if wt > 0 and 0 <= r < self.h and 0 <= c < self.w and self.mask[r, c]:
                acc += wt * self.maps.data[channels, r, c]
                total += wt
        if total < 1e-12:
            c, r = np.floor(p + 0.5).astype(np.int64)
            return self.maps.data[channels, r, c].astype(np.float64)
        return acc / total

    def theta(self, p):
        v = self.sample(p, [2, 3])
        n = np.hypot(*v)
        return v / n if n > 1e-12 else np.array([1.0, 0.0])

    def scale(self, p):
        return max(float(self.sample(p, [1])[0]), 0.0)

    def centralize(self, p):
        th = self.theta(p)
        normal = np.array([-th[1], th[0]])
        reach = _MARCH_REACH * self.scale(p)

        def march(sign):
            # probes sit between the quarter-pixel marks so none lands on a pixel edge
            t = 0.5 * _MARCH_STEP
            while t <= reach:
                if not self.inside(p + sign * t * normal):
                    return max(t - 0.5 * _MARCH_STEP, 0.0)
                t += _MARCH_STEP
            return None

        lo, hi = march(-1.0), march(1.0)
        if lo is None or hi is None:
            return p
        return p + normal * (0.5 * (hi - lo))

    def in_grid(self, p):
        c, r = np.floor(p + 0.5).astype(np.int64)
        return 0 <= r < self.h and 0 <= c < self.w

    def _advance(self, cur, direction, step):
        """Next centred point, or None when the band ends ahead of ``cur``."""
        q = cur + step * direction
        if self.inside(q):
            return self.centralize(q)
        # shorter steps only to follow a bend: the band must continue beyond
        sub = step / 2
        while sub >= _MIN_STEP:
            q = cur + sub * direction
            if self.inside(q):
                qc = self.centralize(q)
                th = self.theta(qc)
                ahead = th if np.dot(th, direction) >= 0 else -th
                if self.inside(qc + step * ahead):
                    return qc
            sub /= 2
        return None

    def _turn(self, cur, direction, step, visited):
        """Follow a bend sharper than ``theta`` describes, or None.

        Tries headings turned away from ``direction`` by growing angles and
        keeps the first that lands on the band, leaves room for another step
        and stays clear of every point already traced.
        """
        for deg in _TURN_ANGLES:
            for sgn in (1.0, -1.0):
                a = np.radians(sgn * deg)
                d = np.array([np.cos(a) * direction[0] - np.sin(a) * direction[1],
                              np.sin(a) * direction[0] + np.cos(a) * direction[1]])
                q = cur + step * d
                if not self.inside(q):
                    continue
                qc = self.centralize(q)
                if not self.inside(qc) or not self.inside(qc + step * d):
                    continue
                gap = np.min(np.hypot(*(np.asarray(visited) - qc).T))
                if gap >= _TURN_CLEARANCE * step:
                    return qc, d
        return None

    def _band_end(self, cur, direction):
        """Walk straight on from ``cur`` to the band edge and step back to the true end."""
        t = 0.5 * _MARCH_STEP
        while self.inside(cur + t * direction) and t < 8 * _MAX_STEPS:
            t += _MARCH_STEP
        edge = t - 0.5 * _MARCH_STEP
        # a band cut by the grid edge has lost (part of) its grown pixel
        back = _GRID_END_MARGIN if not self.in_grid(cur + t * direction) else _END_MARGIN
        return cur + (edge - back) * direction

    @staticmethod
    def _close(chain, seed, end, direction):
        """Drop chain points at or past ``end`` and finish the chain there."""
        while chain and np.dot(chain[-1] - end, direction) > -_MARCH_STEP:
            chain.pop()
        last = chain[-1] if chain else seed
        if np.dot(end - last, direction) > _MARCH_STEP:
            chain.append(end)

    def stride(self, seed, sign, visited=()):
        """Trace from ``seed`` along ``sign * theta``; ``visited`` points are not revisited."""
        chain = []
        cur = seed
        heading = sign * self.theta(seed)
        for _ in range(_MAX_STEPS):
            th = self.theta(cur)
            direction = th if np.dot(th, heading) >= 0 else -th
            step = max(1.0, self.scale(cur) / 2)
            q = self._advance(cur, direction, step)
            if q is None:
                turned = self._turn(cur, direction, step, [seed, *visited, *chain])
                if turned is None:
                    self._close(chain, seed, self._band_end(cur, direction), direction)
                    break
                q, direction = turned
            if not self.inside(q) or np.dot(q - cur, direction) <= 1e-6:
                break
            chain.append(q)
            heading = direction
            cur = q
        return chain


def _largest_component(mask):
    labels, n = ndimage.label(mask, structure=_EIGHT)
    if n == 0:
        raise NoText("no pixel reaches the TCL threshold")
    sizes = np.bincount(labels.ravel())[1:]
    return labels == (int(np.argmax(sizes)) + 1)


def extract_center_line(maps: AttributeMaps, threshold=DEFAULT_THRESHOLD) -> CenterPolyline:
    """Trace the center line of the largest TCL component.

    Starting from the component pixel nearest its centroid, the walk strides
    along ``theta`` in both directions (step ``max(1, s/2)`` map pixels, at
    most 64 steps each way) and re-centres each point across the band along
    the normal.  A step that would leave the mask is retried at half length
    (down to half a pixel) only where the band continues beyond it, which
    follows bends; otherwise the walk goes straight on to the band edge and
    backs off by the grown pixel plus half a pixel.  Attributes are
    read bilinearly and returned in working-image units, ordered head to tail
    along ``theta``.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    maps = normalize_orientations(maps)
    component = _largest_component(maps.tcl_mask(threshold))

    rows, cols = np.nonzero(component)
    cy, cx = rows.mean(), cols.mean()
    nearest = int(np.argmin((rows - cy) ** 2 + (cols - cx) ** 2))
    tracer = _Tracer(maps, component)
    seed = np.array([cols[nearest], rows[nearest]], dtype=np.float64)
    centred = tracer.centralize(seed)
    if tracer.inside(centred):
        seed = centred

    tail = tracer.stride(seed, 1.0)
    head = tracer.stride(seed, -1.0, visited=tail)
    points = head[::-1] + [seed] + tail
    if len(points) < 2:
        raise TooShort("fewer than two center points were traced")

    pts = np.array(points)
    attrs = np.array([tracer.sample(p, [1, 2, 3, 4, 5]) for p in pts])
    theta = attrs[:, 1:3] / np.hypot(attrs[:, 1], attrs[:, 2])[:, None]
    phi = attrs[:, 3:5] / np.hypot(attrs[:, 3], attrs[:, 4])[:, None]
    d = maps.downsample
    return CenterPolyline(pts * d, attrs[:, 0] * d, theta, phi)
