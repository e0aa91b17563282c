"""
Attribute maps and center-line extraction
=========================================

Ground truth for a detector is six dense maps at a quarter of the image
resolution: text-center-line probability, scale and the two orientations as
(cos, sin) pairs.  Striding through the center-line mask recovers the center
line, which we compare with the annotation.
"""

import numpy as np

from _common import output_dir
from scrn.attribute_field import extract_center_line, render_gt_maps
from scrn.geometry import build_center_point_list, polyline_hausdorff
from scrn.io import read_maps, write_image, write_maps
from scrn.synthgen import generate, make_spec

out = output_dir()
d = 4
sample = generate(make_spec("bezier:0.3", 8, 24, 32, tilt=-15, seed=5))
h, w = sample.image.shape
maps = render_gt_maps([sample.instance], -(-h // d), -(-w // d), d)
mask = maps.tcl_mask()
print("map size:", maps.shape, " center-line pixels:", int(mask.sum()))
# Scales are stored in map pixels: 16 px half height / stride 4 = 4.
print("scale on the line: %.1f..%.1f map px" % (maps.scale[mask].min(), maps.scale[mask].max()))

# The binary container stores float32 values channel by channel.
blob = write_maps(maps)
print("container bytes:", len(blob), " round trip exact:",
      np.array_equal(read_maps(blob).data, maps.data.astype(np.float32)))

# Stride along the mask and compare with the annotated center line.
found = extract_center_line(maps)
truth = build_center_point_list(sample.instance)
print("extracted points:", len(found), " annotated points:", len(truth))
print("Hausdorff distance: %.2f px (map stride %d px)" % (
    polyline_hausdorff(found.centers, truth.centers), d))

(out / "maps_tcl.png").write_bytes(write_image(maps.tcl))
print("center-line map written to", out / "maps_tcl.png")
