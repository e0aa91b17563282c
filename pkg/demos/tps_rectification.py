"""
Thin-plate-spline rectification
===============================

The control points along a curved word are matched to anchors evenly spaced
on the top and bottom border of the output raster.  A thin-plate spline fitted
to these pairs maps every output pixel back into the source image, which is
then sampled bilinearly.
"""

import numpy as np

from _common import output_dir
from scrn.geometry import build_center_point_list, control_points, resample_equidistant
from scrn.io import write_image
from scrn.synthgen import central_region, generate, make_spec, reference_grid
from scrn.tps import (
    anchor_points,
    bilinear_sample,
    make_grid,
    rectify,
    tps_apply_many,
    tps_solve,
)

out = output_dir()
sample = generate(make_spec("arc:120", 6, 24, 28, seed=11))
line = build_center_point_list(sample.instance)
ref = sample.straight_reference
h, w = ref.shape

# Fit the spline by hand to look at it.
k = 10
fiducials = control_points(resample_equidistant(line, k))
anchors = anchor_points(k, w, h)
spline = tps_solve(anchors, fiducials, 0.0)
residual = np.abs(tps_apply_many(spline, anchors.points) - fiducials.points).max()
print("anchor -> fiducial residual: %.2e px" % residual)

# The sampling grid holds one source (x, y) per output pixel.
grid = make_grid(spline, h, w)
print("grid shape:", grid.shape, " x range: %.1f..%.1f" % (grid[..., 0].min(), grid[..., 0].max()))

# rectify() does all of the above in one call.
flat = rectify(sample.image, line, k=k, out_height=h, out_width=w)
# Anchors sit on the first and last pixel centers while the reference spans
# the full band, so the reference is resampled onto the output raster before
# comparing.  Border rows and columns see the band edges; the central 80% counts.
expected = bilinear_sample(ref, reference_grid(h, w, h, w))
region = central_region(h, w)
print("mean |rectified - reference| over the central 80%%: %.4f" % (
    np.mean(np.abs(flat[region] - expected[region]))))

for name, img in (("tps_source.png", sample.image), ("tps_rectified.png", flat),
                  ("tps_reference.png", ref)):
    (out / name).write_bytes(write_image(img))
print("images written to", out)
