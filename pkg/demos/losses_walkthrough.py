"""
Training losses on attribute maps
=================================

The detector loss is a cross entropy on the center-line map plus smoothed-L1
terms on scale and orientations, counted only on center-line pixels.  The
recognizer adds a mean negative log-likelihood over decoded symbols.
"""

import numpy as np

from scrn.attribute_field import render_gt_maps
from scrn.losses import (
    SYMBOLS,
    SymbolDistributionSequence,
    geo_loss,
    recognition_nll,
    smoothed_l1,
    total_loss,
)
from scrn.synthgen import generate, make_spec

print("smoothed L1 at 0.5, 1, 2:", smoothed_l1(np.array([0.5, 1.0, 2.0])))

sample = generate(make_spec("arc:60", 6, 24, 32, seed=1))
h, w = sample.image.shape
gt = render_gt_maps([sample.instance], h // 4, w // 4)
mask = gt.tcl_mask()

# A prediction that is confident about the line and slightly off in scale.
rng = np.random.default_rng(0)
pred = gt.data.copy()
pred[0] = np.where(mask, 0.9, 0.1)
pred[1] *= 1.1
pred[2:] += rng.normal(0, 0.05, pred[2:].shape)
breakdown = geo_loss(gt.replace(pred), gt, mask)
for name, value in breakdown.as_dict().items():
    if name != "weights":
        print("%-12s %.5f" % (name, value))

# A recognizer that puts 80% on the right symbol at each of 5 steps.
target = np.array([SYMBOLS.index(c) for c in "HELLO"])
probs = np.full((5, len(SYMBOLS)), 0.2 / (len(SYMBOLS) - 1))
probs[np.arange(5), target] = 0.8
nll = recognition_nll(SymbolDistributionSequence(probs, target))
print("recognition NLL: %.4f (= -log 0.8 = %.4f)" % (nll, -np.log(0.8)))
print("total loss: %.4f" % total_loss(breakdown, nll))
