"""Training objectives, evaluated as plain functions on arrays.

No gradients are computed here; the functions return loss values for given
predictions and targets.
"""

import string
from dataclasses import dataclass

import numpy as np

from .attribute_field import AttributeMaps
from .errors import InvalidDistribution, NonPositiveScale, ShapeMismatch

DEFAULT_WEIGHTS = (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)

# digits, upper and lower case letters, 32 punctuation marks, end-of-sequence
SYMBOLS = tuple(string.digits + string.ascii_uppercase + string.ascii_lowercase
                + string.punctuation) + ("<EOS>",)
EOS = len(SYMBOLS) - 1

_CLAMP = 1e-7


def smoothed_l1(x):
    """``0.5 x^2`` for ``|x| < 1``, else ``|x| - 0.5``; elementwise."""
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    out = np.where(ax < 1, 0.5 * x * x, ax - 0.5)
    return out if out.ndim else float(out)


def tcl_loss(pred_f1, gt_mask):
    """Mean per-pixel binary cross-entropy of the TCL probability map."""
    p = np.asarray(pred_f1, dtype=np.float64)
    y = np.asarray(gt_mask, dtype=bool)
    if p.shape != y.shape:
        raise ShapeMismatch(f"prediction {p.shape} and mask {y.shape} differ")
    p = np.clip(p, _CLAMP, 1 - _CLAMP)
    return float(np.mean(np.where(y, -np.log(p), -np.log1p(-p))))


@dataclass(frozen=True)
class GeoLossBreakdown:
    l_tcl: float
    l_s: float
    l_sin_theta: float
    l_cos_theta: float
    l_sin_phi: float
    l_cos_phi: float
    weights: tuple = DEFAULT_WEIGHTS

    @property
    def terms(self):
        return (self.l_tcl, self.l_s, self.l_sin_theta, self.l_cos_theta,
                self.l_sin_phi, self.l_cos_phi)

    @property
    def total(self):
        return float(sum(w * t for w, t in zip(self.weights, self.terms)))

    def as_dict(self):
        return {"l_tcl": self.l_tcl, "l_s": self.l_s, "l_sin_theta": self.l_sin_theta,
                "l_cos_theta": self.l_cos_theta, "l_sin_phi": self.l_sin_phi,
                "l_cos_phi": self.l_cos_phi, "weights": list(self.weights), "total": self.total}


def geo_loss(pred: AttributeMaps, gt: AttributeMaps, gt_mask, weights=DEFAULT_WEIGHTS):
    """Geometry loss with attribute terms restricted to TCL pixels.

    The scale term uses the relative residual ``(s_pred - s) / s``; the four
    orientation terms use plain differences.  Attribute terms average over
    mask pixels and are 0 when the mask is empty; the TCL term averages over
    every pixel.
    """
    weights = tuple(float(w) for w in weights)
    if len(weights) != 6:
        raise ValueError("geometry loss takes exactly 6 weights")
    mask = np.asarray(gt_mask, dtype=bool)
    if pred.data.shape != gt.data.shape or mask.shape != gt.shape:
        raise ShapeMismatch(f"pred {pred.data.shape}, gt {gt.data.shape}, mask {mask.shape}")

    l_tcl = tcl_loss(pred.tcl, mask)
    if not mask.any():
        return GeoLossBreakdown(l_tcl, 0.0, 0.0, 0.0, 0.0, 0.0, weights)

    s = gt.scale[mask]
    if np.any(s <= 0):
        raise NonPositiveScale("ground-truth scale must be positive on TCL pixels")
    p, g = pred.data[:, mask], gt.data[:, mask]

    def term(residual):
        return float(np.mean(smoothed_l1(residual)))

    return GeoLossBreakdown(
        l_tcl,
        term((p[1] - s) / s),
        term(p[3] - g[3]),
        term(p[2] - g[2]),
        term(p[5] - g[5]),
        term(p[4] - g[4]),
        weights,
    )


@dataclass(frozen=True, eq=False)
class SymbolDistributionSequence:
    """Per-step symbol probabilities ``(T, n_symbols)`` and target indices ``(T,)``."""

    probs: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        target = np.array(self.target, dtype=np.int64)
        if probs.ndim != 2 or target.shape != (probs.shape[0],) or probs.shape[0] < 1:
            raise InvalidDistribution("need probabilities (T, n) and T target indices")
        if np.any(target < 0) or np.any(target >= probs.shape[1]):
            raise InvalidDistribution("target index outside the alphabet")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0) \
                or np.any(np.abs(probs.sum(axis=1) - 1) > 1e-6):
            raise InvalidDistribution("each step must be a probability distribution")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "target", target)


def recognition_nll(seq: SymbolDistributionSequence):
    """Mean negative log-likelihood of the target symbols."""
    picked = seq.probs[np.arange(len(seq.target)), seq.target]
    with np.errstate(divide="ignore"):
        return float(-np.mean(np.log(picked))) + 0.0


def total_loss(geo, recog):
    """Recognition loss plus the geometry loss when geometry supervision exists."""
    if recog < 0:
        raise ValueError("recognition loss cannot be negative")
    return float(recog) + (geo.total if geo is not None else 0.0)
