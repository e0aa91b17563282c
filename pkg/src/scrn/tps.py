"""Thin-plate-spline rectification.

The fitted spline maps coordinates of the rectified raster back into the
source image; the rectified image is obtained by bilinear sampling of the
source at the mapped positions.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidK, LengthMismatch, SingularSystem
from .geometry import (
    DEFAULT_K,
    CenterPolyline,
    ControlPoints,
    control_points,
    resample_equidistant,
)

DEFAULT_REGULARIZATION = 1e-6

# reciprocal condition number below which the system is treated as singular
_RCOND_MIN = 1e-13


def tps_kernel(r2):
    """``U(r) = r^2 log(r^2)`` written in terms of ``r^2``, with ``U(0) = 0``."""
    r2 = np.asarray(r2, dtype=np.float64)
    out = np.zeros_like(r2)
    nz = r2 > 0
    out[nz] = r2[nz] * np.log(r2[nz])
    return out


@dataclass(frozen=True, eq=False)
class TpsTransform:
    """Spline from rectified coordinates (``sites``) to source coordinates."""

    sites: np.ndarray           # (n, 2) anchors in the rectified raster
    kernel_weights: np.ndarray  # (n, 2)
    affine_weights: np.ndarray  # (3, 2): constant, x and y coefficients
    regularization: float = 0.0

    def __call__(self, points):
        return tps_apply_many(self, points)


def tps_solve(anchors, fiducials, regularization=DEFAULT_REGULARIZATION) -> TpsTransform:
    """Fit the spline taking each anchor onto its fiducial point.

    Solves the standard bordered system ``[[K + lambda*I, P], [P^T, 0]]`` by LU
    factorization with partial pivoting.
    """
    src = np.asarray(getattr(anchors, "points", anchors), dtype=np.float64)
    dst = np.asarray(getattr(fiducials, "points", fiducials), dtype=np.float64)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 2:
        raise LengthMismatch(f"anchors {src.shape} and fiducials {dst.shape} differ")
    n = len(src)
    if n < 3:
        raise LengthMismatch("at least 3 point pairs are needed")
    if regularization < 0:
        raise ValueError("regularization must be non-negative")

    p = np.column_stack([np.ones(n), src])
    if np.linalg.matrix_rank(p) < 3:
        raise SingularSystem("anchors are collinear")

    d2 = np.sum((src[:, None, :] - src[None, :, :]) ** 2, axis=-1)
    system = np.zeros((n + 3, n + 3))
    system[:n, :n] = tps_kernel(d2) + regularization * np.eye(n)
    system[:n, n:] = p
    system[n:, :n] = p.T
    rhs = np.zeros((n + 3, 2))
    rhs[:n] = dst

    with warnings.catch_warnings():
        # an exactly singular pivot is reported through SingularSystem below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(system, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.min() <= _RCOND_MIN * diag.max():
        raise SingularSystem("thin-plate-spline system is rank deficient")
    sol = scipy.linalg.lu_solve((lu, piv), rhs)
    return TpsTransform(src.copy(), sol[:n], sol[n:], float(regularization))


def tps_apply_many(t: TpsTransform, points):
    """Evaluate the spline at ``(..., 2)`` points.

    Evaluation is elementwise with a fixed summation order over sites, so the
    result for a point does not depend on what else is evaluated with it.
    """
    pts = np.asarray(points, dtype=np.float64)
    x, y = pts[..., 0], pts[..., 1]
    a = t.affine_weights
    out_x = a[0, 0] + a[1, 0] * x + a[2, 0] * y
    out_y = a[0, 1] + a[1, 1] * x + a[2, 1] * y
    for (sx, sy), (wx, wy) in zip(t.sites, t.kernel_weights):
        u = tps_kernel((x - sx) ** 2 + (y - sy) ** 2)
        out_x = out_x + wx * u
        out_y = out_y + wy * u
    return np.stack([out_x, out_y], axis=-1)


def tps_apply(t: TpsTransform, p):
    """Map a single point ``(x, y)``."""
    return tps_apply_many(t, np.asarray(p, dtype=np.float64).reshape(1, 2))[0]


def anchor_points(k: int, out_width: int, out_height: int) -> ControlPoints:
    """``k`` anchors evenly spaced on each of the top and bottom borders.

    Interleaved ``(top_j, bottom_j)`` to match :func:`control_points`.

    >>> anchor_points(2, 4, 4).points.tolist()
    [[0.0, 0.0], [0.0, 3.0], [3.0, 0.0], [3.0, 3.0]]
    """
    if k < 2:
        raise InvalidK(f"k must be at least 2, got {k}")
    if out_width < 2 or out_height < 2:
        raise ValueError("output must be at least 2x2")
    xs = np.arange(k) * ((out_width - 1) / (k - 1))
    pts = np.empty((2 * k, 2))
    pts[0::2, 0] = xs
    pts[0::2, 1] = 0.0
    pts[1::2, 0] = xs
    pts[1::2, 1] = out_height - 1
    return ControlPoints(pts)


def make_grid(t: TpsTransform, out_height: int, out_width: int):
    """Source coordinates for every rectified pixel, shape ``(H, W, 2)`` as ``(x, y)``."""
    if out_height < 1 or out_width < 1:
        raise ValueError("grid dimensions must be positive")
    rows, cols = np.meshgrid(np.arange(out_height, dtype=np.float64),
                             np.arange(out_width, dtype=np.float64), indexing="ij")
    return tps_apply_many(t, np.stack([cols, rows], axis=-1))


def as_image(a):
    """View an array as an ``(H, W, C)`` float image."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 2:
        a = a[:, :, None]
    if a.ndim != 3 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected an (H, W) or (H, W, C) image, got shape {a.shape}")
    return a


def bilinear_sample(src, grid):
    """Bilinear interpolation of ``src`` at grid coordinates.

    Pixel ``(r, c)`` sits at coordinate ``(x=c, y=r)``.  Neighbours outside
    the image count as zero, so points partly off the image fade out and
    points far outside read 0.  The output keeps the channel axis of an
    ``(H, W, C)`` input and drops it for an ``(H, W)`` input.
    """
    squeeze = np.ndim(src) == 2
    img = as_image(src)
    g = np.asarray(grid, dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise ValueError("sampling grid must be finite")
    h, w, _ = img.shape
    x, y = g[..., 0], g[..., 1]
    x0 = np.floor(x)
    y0 = np.floor(y)
    fx = x - x0
    fy = y - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)

    def tap(yy, xx):
        inside = (xx >= 0) & (xx < w) & (yy >= 0) & (yy < h)
        vals = img[np.clip(yy, 0, h - 1), np.clip(xx, 0, w - 1)]
        return np.where(inside[..., None], vals, 0.0)

    w00 = ((1 - fx) * (1 - fy))[..., None]
    w01 = (fx * (1 - fy))[..., None]
    w10 = ((1 - fx) * fy)[..., None]
    w11 = (fx * fy)[..., None]
    out = (tap(y0, x0) * w00 + tap(y0, x0 + 1) * w01
           + tap(y0 + 1, x0) * w10 + tap(y0 + 1, x0 + 1) * w11)
    return out[..., 0] if squeeze else out


def rectification_transform(polyline: CenterPolyline, k=DEFAULT_K, out_height=16, out_width=64,
                            regularization=DEFAULT_REGULARIZATION) -> TpsTransform:
    """Spline taking the rectified raster onto the text band around ``polyline``."""
    fiducials = control_points(resample_equidistant(polyline, k))
    anchors = anchor_points(k, out_width, out_height)
    return tps_solve(anchors, fiducials, regularization)


def rectify(src, polyline: CenterPolyline, k=DEFAULT_K, out_height=16, out_width=64,
            regularization=DEFAULT_REGULARIZATION):
    """Rectify the text band described by ``polyline`` into an ``out_height x out_width`` image.

    Resamples the center line to ``k`` points, builds the symmetric control
    points, fits the spline against border anchors and samples ``src``
    bilinearly.  No clamping is applied to the result.
    """
    t = rectification_transform(polyline, k, out_height, out_width, regularization)
    return bilinear_sample(src, make_grid(t, out_height, out_width))
