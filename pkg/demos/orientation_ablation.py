"""
Character orientation versus the center-line normal
===================================================

When glyphs lean relative to the curve, placing control points along the
center-line normal shears the rectified word.  Placing them along the
character orientation undoes the lean.  Here both are compared over a sweep
of tilts.
"""

from scrn.evaluation import run_suite
from scrn.synthgen import make_spec, round_trip_error

print("tilt   character   normal")
for tilt in (0, 10, 20, 30, -30):
    spec = make_spec("arc:100", 7, 24, 30, tilt=tilt, seed=2)
    print("%4d   %9.4f   %6.4f" % (tilt, round_trip_error(spec),
                                   round_trip_error(spec, orientation="normal")))

# The seeded ablation suite draws 20 tilted arcs and curves.
report = run_suite("ablation", cases=20, seed=0)
wins = sum(c["mae_character"] < c["mae_normal"] for c in report["cases"])
agg = report["aggregate"]
print("ablation suite: character orientation wins %d of %d" % (wins, len(report["cases"])))
print("mean MAE %.4f (character) vs %.4f (normal)" % (
    agg["tilted_mae_character"], agg["tilted_mae_normal"]))
