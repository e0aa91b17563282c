"""
Center line and control points of a curved word
===============================================

A word is annotated as a list of character quadrilaterals.  From them we
build the text center line, resample it at equal arc length and place one
pair of control points on either side of every station along the
character orientation.
"""

import numpy as np

from scrn.geometry import build_center_point_list, control_points, resample_equidistant
from scrn.synthgen import generate, make_spec

# A seven character word on a 90 degree arc, glyphs tilted by 20 degrees.
sample = generate(make_spec("arc:90", 7, 24, 30, tilt=20, seed=3))
print("image size (h, w):", sample.image.shape)
print("characters:", sample.instance.transcript)

# The center line runs head edge midpoint -> character centers -> tail edge midpoint.
line = build_center_point_list(sample.instance)
print("center line points:", len(line), " length: %.1f px" % line.length)
np.set_printoptions(precision=2, suppress=True)
print("scales (half character height):", line.scales)

# theta follows the reading direction, phi points from glyph top to glyph bottom.
# On a tilted word phi is not perpendicular to theta.
cos_between = np.sum(line.theta * line.phi, axis=1)
print("angle between theta and phi (deg):", np.degrees(np.arccos(cos_between)))

# Equal arc-length resampling with k = 10 stations.
stations = resample_equidistant(line, 10)
steps = np.hypot(*np.diff(stations.centers, axis=0).T)
print("chord lengths between stations:", steps)

# Control points sit at center -/+ s * phi, so every pair straddles its station.
cp = control_points(stations)
print("pair midpoints == stations:", np.allclose((cp.top + cp.bottom) / 2, stations.centers))
print("pair separation / 2s:", np.hypot(*(cp.bottom - cp.top).T) / (2 * stations.scales))
