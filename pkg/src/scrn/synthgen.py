"""Synthetic curved pseudo-text with exact character geometry.

Glyphs from a small embedded 5x7 bitmap font are placed at equal arc-length
stations along a straight line, circular arc or cubic Bezier curve.  Each
glyph is drawn through the affine frame spanned by the curve tangent and a
(possibly tilted) normal, so every character quadrilateral is known exactly.
The same glyph sequence rendered on a straight baseline serves as the
reference a perfect rectifier should reproduce.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DoesNotFit, InvalidSpec
from .geometry import CharQuad, TextInstance, build_center_point_list, normal_orientation
from .geometry import DEFAULT_K
from .tps import DEFAULT_REGULARIZATION, bilinear_sample, rectify

GLYPH_ROWS = {
    "A": "01110 10001 10001 11111 10001 10001 10001",
    "B": "11110 10001 10001 11110 10001 10001 11110",
    "C": "01110 10001 10000 10000 10000 10001 01110",
    "D": "11100 10010 10001 10001 10001 10010 11100",
    "E": "11111 10000 10000 11110 10000 10000 11111",
    "F": "11111 10000 10000 11110 10000 10000 10000",
    "G": "01110 10001 10000 10111 10001 10001 01111",
    "H": "10001 10001 10001 11111 10001 10001 10001",
    "I": "01110 00100 00100 00100 00100 00100 01110",
    "J": "00111 00010 00010 00010 00010 10010 01100",
    "K": "10001 10010 10100 11000 10100 10010 10001",
    "L": "10000 10000 10000 10000 10000 10000 11111",
    "M": "10001 11011 10101 10101 10001 10001 10001",
    "N": "10001 10001 11001 10101 10011 10001 10001",
    "O": "01110 10001 10001 10001 10001 10001 01110",
    "P": "11110 10001 10001 11110 10000 10000 10000",
    "Q": "01110 10001 10001 10001 10101 10010 01101",
    "R": "11110 10001 10001 11110 10100 10010 10001",
    "S": "01111 10000 10000 01110 00001 00001 11110",
    "T": "11111 00100 00100 00100 00100 00100 00100",
    "U": "10001 10001 10001 10001 10001 10001 01110",
    "V": "10001 10001 10001 10001 10001 01010 00100",
    "W": "10001 10001 10001 10101 10101 10101 01010",
    "X": "10001 10001 01010 00100 01010 10001 10001",
    "Y": "10001 10001 10001 01010 00100 00100 00100",
    "Z": "11111 00001 00010 00100 01000 10000 11111",
    "0": "01110 10001 10011 10101 11001 10001 01110",
    "1": "00100 01100 00100 00100 00100 00100 01110",
    "2": "01110 10001 00001 00010 00100 01000 11111",
    "3": "11111 00010 00100 00010 00001 10001 01110",
    "4": "00010 00110 01010 10010 11111 00010 00010",
    "5": "11111 10000 11110 00001 00001 10001 01110",
    "6": "00110 01000 10000 11110 10001 10001 01110",
    "7": "11111 00001 00010 00100 01000 01000 01000",
    "8": "01110 10001 10001 01110 10001 10001 01110",
    "9": "01110 10001 10001 01111 00001 00010 01100",
}
ALPHABET = "".join(GLYPH_ROWS)


def _build_font():
    # each glyph cell is the 5x7 bitmap with a one-cell blank border: 7 wide, 9 tall
    font = np.zeros((len(ALPHABET), 9, 7), dtype=np.float64)
    for i, ch in enumerate(ALPHABET):
        rows = GLYPH_ROWS[ch].split()
        font[i, 1:8, 1:6] = [[float(b) for b in r] for r in rows]
    font.setflags(write=False)
    return font


FONT = _build_font()

CURVE_KINDS = ("straight", "arc", "cubic-bezier")


@dataclass(frozen=True)
class CurveSpec:
    """Layout of one synthetic word.

    ``params`` by kind, all in working-image pixels:

    * ``straight``: ``(x0, y0, x1, y1)``
    * ``arc``: ``(cx, cy, radius, start_deg, sweep_deg)``; the word runs from
      ``start_deg`` through the signed ``sweep_deg`` (positive turns clockwise
      on screen)
    * ``cubic-bezier``: the four control points flattened
    """

    kind: str
    params: tuple
    char_height: float
    char_width: float
    char_count: int
    tilt: float = 0.0
    seed: int = 0

    def validate(self):
        if self.kind not in CURVE_KINDS:
            raise InvalidSpec(f"unknown curve kind {self.kind!r}")
        expected = {"straight": 4, "arc": 5, "cubic-bezier": 8}[self.kind]
        if len(self.params) != expected:
            raise InvalidSpec(f"{self.kind} needs {expected} parameters, got {len(self.params)}")
        if not np.all(np.isfinite(np.asarray(self.params, dtype=np.float64))):
            raise InvalidSpec("curve parameters must be finite")
        if self.char_height <= 0 or self.char_width <= 0:
            raise InvalidSpec("character dimensions must be positive")
        if int(self.char_count) != self.char_count or self.char_count < 1:
            raise InvalidSpec("char_count must be a positive integer")
        if not -45.0 <= self.tilt <= 45.0:
            raise InvalidSpec("tilt must lie in [-45, 45] degrees")
        if self.kind == "arc" and (self.params[2] <= 0 or self.params[4] == 0):
            raise InvalidSpec("arc needs a positive radius and a non-zero sweep")
        if self.kind == "arc" and abs(self.params[4]) > 360:
            raise InvalidSpec("arc sweep cannot exceed 360 degrees")
        if curve_length(self) < self.char_count * self.char_width - 1e-9:
            raise InvalidSpec("curve is shorter than the word")

    @property
    def word_length(self):
        return self.char_count * self.char_width


@dataclass(frozen=True, eq=False)
class SynthSample:
    image: np.ndarray               # (H, W) grayscale in [0, 1], ink = 1
    instance: TextInstance
    straight_reference: np.ndarray  # (round(char_height), round(char_count * char_width))
    spec: CurveSpec = field(repr=False, default=None)


def _bezier(params, t):
    p = np.asarray(params, dtype=np.float64).reshape(4, 2)
    t = np.asarray(t, dtype=np.float64)[:, None]
    mt = 1 - t
    pts = mt ** 3 * p[0] + 3 * mt ** 2 * t * p[1] + 3 * mt * t ** 2 * p[2] + t ** 3 * p[3]
    der = 3 * mt ** 2 * (p[1] - p[0]) + 6 * mt * t * (p[2] - p[1]) + 3 * t ** 2 * (p[3] - p[2])
    return pts, der


_BEZIER_TABLE = 4096


def _bezier_arc_table(params):
    t = np.linspace(0.0, 1.0, _BEZIER_TABLE + 1)
    pts, _ = _bezier(params, t)
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    return t, cum


def curve_length(spec: CurveSpec):
    p = spec.params
    if spec.kind == "straight":
        return float(np.hypot(p[2] - p[0], p[3] - p[1]))
    if spec.kind == "arc":
        return float(p[2] * np.radians(abs(p[4])))
    return float(_bezier_arc_table(p)[1][-1])


def curve_frame(spec: CurveSpec, arc):
    """Points and unit tangents at arc-length positions ``arc`` along the curve."""
    arc = np.asarray(arc, dtype=np.float64)
    p = spec.params
    if spec.kind == "straight":
        a, b = np.array(p[:2], dtype=np.float64), np.array(p[2:], dtype=np.float64)
        tangent = (b - a) / np.hypot(*(b - a))
        return a + arc[:, None] * tangent, np.tile(tangent, (len(arc), 1))
    if spec.kind == "arc":
        cx, cy, r, start, sweep = p
        sign = np.sign(sweep)
        alpha = np.radians(start) + sign * arc / r
        pts = np.column_stack([cx + r * np.cos(alpha), cy + r * np.sin(alpha)])
        tangent = sign * np.column_stack([-np.sin(alpha), np.cos(alpha)])
        return pts, tangent
    t_table, cum = _bezier_arc_table(p)
    t = np.interp(arc, cum, t_table)
    pts, der = _bezier(p, t)
    return pts, der / np.hypot(der[:, 0], der[:, 1])[:, None]


def glyph_frames(spec: CurveSpec):
    """Station points, tangents and (tilted) down directions of every glyph."""
    m, w = spec.char_count, spec.char_width
    total = curve_length(spec)
    stations = total / 2 + (np.arange(m) - (m - 1) / 2) * w
    pts, tangent = curve_frame(spec, stations)
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    a = np.radians(spec.tilt)
    down = np.column_stack([np.cos(a) * normal[:, 0] - np.sin(a) * normal[:, 1],
                            np.sin(a) * normal[:, 0] + np.cos(a) * normal[:, 1]])
    return pts, tangent, down


def glyph_quads(spec: CurveSpec):
    """Corner arrays ``(m, 4, 2)`` in TL, TR, BR, BL order."""
    pts, tangent, down = glyph_frames(spec)
    half_w = 0.5 * spec.char_width * tangent
    half_h = 0.5 * spec.char_height * down
    return np.stack([pts - half_w - half_h, pts + half_w - half_h,
                     pts + half_w + half_h, pts - half_w + half_h], axis=1)


def glyph_codes(spec: CurveSpec):
    rng = np.random.default_rng(spec.seed)
    return rng.integers(0, len(ALPHABET), size=spec.char_count)


def _glyph_lookup(code, u, v):
    inside = (u >= 0) & (u < 1) & (v >= 0) & (v < 1)
    col = np.clip(np.floor(u * 7).astype(np.int64), 0, 6)
    row = np.clip(np.floor(v * 9).astype(np.int64), 0, 8)
    return np.where(inside, FONT[code][row, col], 0.0)


_SUBSAMPLES = ((-0.25, -0.25), (0.25, -0.25), (-0.25, 0.25), (0.25, 0.25))


def _render_warped(spec, codes, quads, height, width):
    image = np.zeros((height, width))
    _, tangent, down = glyph_frames(spec)
    for code, quad, t, d in zip(codes, quads, tangent, down):
        x_lo = max(int(np.floor(quad[:, 0].min())) - 1, 0)
        x_hi = min(int(np.ceil(quad[:, 0].max())) + 1, width - 1)
        y_lo = max(int(np.floor(quad[:, 1].min())) - 1, 0)
        y_hi = min(int(np.ceil(quad[:, 1].max())) + 1, height - 1)
        if x_hi < x_lo or y_hi < y_lo:
            continue
        ys, xs = np.mgrid[y_lo:y_hi + 1, x_lo:x_hi + 1].astype(np.float64)
        frame = np.column_stack([spec.char_width * t, spec.char_height * d])
        inv = np.linalg.inv(frame)
        cover = np.zeros_like(xs)
        for ox, oy in _SUBSAMPLES:
            dx = xs + ox - quad[0, 0]
            dy = ys + oy - quad[0, 1]
            u = inv[0, 0] * dx + inv[0, 1] * dy
            v = inv[1, 0] * dx + inv[1, 1] * dy
            cover += _glyph_lookup(code, u, v)
        patch = image[y_lo:y_hi + 1, x_lo:x_hi + 1]
        np.maximum(patch, cover / len(_SUBSAMPLES), out=patch)
    return image


def render_straight(codes, char_width, char_height, height=None, width=None):
    """Glyph sequence on a horizontal baseline filling the raster exactly.

    Pixel ``(r, c)`` covers word coordinates around
    ``((c + 0.5) * L / width, (r + 0.5) * char_height / height)`` with ``L``
    the word length.
    """
    m = len(codes)
    word = m * char_width
    height = int(round(char_height)) if height is None else height
    width = int(round(word)) if width is None else width
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    cover = np.zeros((height, width))
    for ox, oy in _SUBSAMPLES:
        x = (xs + 0.5 + ox) * (word / width)
        y = (ys + 0.5 + oy) * (char_height / height)
        idx = np.clip(np.floor(x / char_width).astype(np.int64), 0, m - 1)
        u = x / char_width - idx
        v = y / char_height
        for j, code in enumerate(codes):
            sel = idx == j
            cover[sel] += _glyph_lookup(code, u[sel], v[sel])
    return cover / len(_SUBSAMPLES)


def canvas_size(spec: CurveSpec, margin=8, multiple=4):
    """Smallest canvas holding every quad with ``margin`` pixels to spare."""
    quads = glyph_quads(spec)
    w = int(np.ceil(quads[..., 0].max() + margin))
    h = int(np.ceil(quads[..., 1].max() + margin))
    return -(-h // multiple) * multiple, -(-w // multiple) * multiple


def generate(spec: CurveSpec, image_height=None, image_width=None) -> SynthSample:
    """Render a synthetic word and its exact character quads.

    Without explicit dimensions the canvas comes from :func:`canvas_size`.
    The output is a deterministic function of ``spec``.
    """
    spec.validate()
    if image_height is None or image_width is None:
        image_height, image_width = canvas_size(spec)
    quads = glyph_quads(spec)
    if (np.any(quads < 0) or np.any(quads[..., 0] > image_width)
            or np.any(quads[..., 1] > image_height)):
        raise DoesNotFit("a character box leaves the canvas")
    codes = glyph_codes(spec)
    image = _render_warped(spec, codes, quads, image_height, image_width)
    instance = TextInstance(tuple(CharQuad(q) for q in quads),
                            "".join(ALPHABET[c] for c in codes))
    reference = render_straight(codes, spec.char_width, spec.char_height)
    return SynthSample(image, instance, reference, spec)


def _translated(kind, params, dx, dy):
    p = list(params)
    if kind == "arc":
        p[0] += dx
        p[1] += dy
    else:
        p[0::2] = [v + dx for v in p[0::2]]
        p[1::2] = [v + dy for v in p[1::2]]
    return tuple(float(v) for v in p)


def make_spec(curve="straight", char_count=6, char_width=24, char_height=32, tilt=0.0, seed=0,
              margin=8):
    """Lay out a word along a named curve with its bounding box at the canvas margin.

    ``curve`` is ``"straight"``, ``"arc:DEG"`` (signed sweep in degrees;
    negative bends the other way) or ``"bezier:BEND"`` (sagitta as a signed
    fraction of the chord, with a seeded asymmetry).  The word exactly spans
    the curve.  Straight layouts put character edges on half-pixel positions
    so pixels of the image and of the straight reference coincide.
    """
    kind, _, arg = curve.partition(":")
    if kind not in ("straight", "arc", "bezier"):
        raise InvalidSpec(f"unknown curve {curve!r}")
    try:
        value = float(arg) if arg else None
    except ValueError:
        raise InvalidSpec(f"bad curve parameter in {curve!r}") from None
    if value is not None and not np.isfinite(value):
        raise InvalidSpec(f"curve parameter must be finite in {curve!r}")
    length = char_count * char_width
    if kind == "arc" and value == 0:
        kind = "straight"
    if kind == "straight":
        params = (0.0, 0.0, float(length), 0.0)
    elif kind == "arc":
        sweep = 90.0 if value is None else value
        r = length / np.radians(abs(sweep))
        start = -90.0 - sweep / 2 if sweep > 0 else 90.0 + abs(sweep) / 2
        params = (0.0, 0.0, float(r), float(start), float(sweep))
    else:
        bend = 0.3 if value is None else value
        skew = np.random.default_rng([int(seed), 7]).uniform(-0.15, 0.15)
        unit = (0.0, 0.0, 1 / 3 + skew, -bend * 4 / 3, 2 / 3 + skew, -bend * 4 / 3, 1.0, 0.0)
        scale = length / float(_bezier_arc_table(unit)[1][-1])
        params = tuple(v * scale for v in unit)
        kind = "cubic-bezier"

    spec = CurveSpec(kind, params, float(char_height), float(char_width), int(char_count),
                     float(tilt), int(seed))
    spec.validate()
    quads = glyph_quads(spec)
    dx = margin - 0.5 - quads[..., 0].min()
    dy = margin - 0.5 - quads[..., 1].min()
    return CurveSpec(kind, _translated(kind, params, dx, dy), spec.char_height, spec.char_width,
                     spec.char_count, spec.tilt, spec.seed)


def reference_grid(ref_height, ref_width, out_height, out_width):
    """Sampling grid taking the rectified raster onto straight-reference pixels.

    The rectifier maps its outermost pixel centres onto the word box edges,
    while reference pixels are centred half a pixel inside them.
    """
    rows, cols = np.meshgrid(np.arange(out_height, dtype=np.float64),
                             np.arange(out_width, dtype=np.float64), indexing="ij")
    x = cols * (ref_width / max(out_width - 1, 1)) - 0.5
    y = rows * (ref_height / max(out_height - 1, 1)) - 0.5
    return np.stack([x, y], axis=-1)


def central_region(height, width, fraction=0.8):
    margin = (1 - fraction) / 2
    return (slice(int(round(margin * height)), int(round((1 - margin) * height))),
            slice(int(round(margin * width)), int(round((1 - margin) * width))))


def round_trip_error(spec: CurveSpec, k=DEFAULT_K, out_height=None, out_width=None,
                     orientation="character", regularization=DEFAULT_REGULARIZATION,
                     sample=None):
    """Mean absolute error between the rectified sample and its straight reference.

    Rectifies the generated image with the ground-truth center line and
    compares against the straight reference over the central 80% of rows and
    columns.  ``orientation="normal"`` swaps the character orientation for
    the center-line normal.
    """
    if orientation not in ("character", "normal"):
        raise ValueError("orientation must be 'character' or 'normal'")
    sample = generate(spec) if sample is None else sample
    ref = sample.straight_reference
    out_height = ref.shape[0] if out_height is None else out_height
    out_width = ref.shape[1] if out_width is None else out_width
    polyline = build_center_point_list(sample.instance)
    if orientation == "normal":
        polyline = normal_orientation(polyline)
    rectified = rectify(sample.image, polyline, k, out_height, out_width, regularization)
    expected = bilinear_sample(ref, reference_grid(*ref.shape, out_height, out_width))
    region = central_region(out_height, out_width)
    return float(np.mean(np.abs(rectified[region] - expected[region])))
