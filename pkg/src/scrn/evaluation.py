"""Seeded round-trip evaluation suites.

Each case is a synthetic word laid out from its own generator stream
``default_rng([seed, case_id])``, so a case can be reproduced on its own and
the report does not depend on how many cases run.  Every case is rectified
twice: with the character orientation and with the center-line normal in its
place.

Report schema (JSON)::

    {
      "suite": "roundtrip" | "ablation",
      "seed": int, "k": int,
      "thresholds": {"straight": float, "curved": float, "ablation_min_tilt": float},
      "cases": [{"id", "curve", "kind", "char_count", "char_width", "char_height",
                 "tilt", "mae_character", "mae_normal", "limit", "passed",
                 "failures": [str, ...]}, ...],
      "aggregate": {"mae_character", "mae_normal",
                    "tilted_mae_character", "tilted_mae_normal", "tilted_cases"},
      "failing_cases": [int, ...],
      "passed": bool
    }
"""

import json

import numpy as np

from .geometry import DEFAULT_K
from .synthgen import generate, make_spec, round_trip_error

DEFAULT_THRESHOLDS = {"straight": 0.02, "curved": 0.10, "ablation_min_tilt": 15.0}

SUITES = ("roundtrip", "ablation")

_CURVED_TILTS = (0.0, 15.0, -15.0, 20.0, -20.0, 25.0, -25.0)


def load_thresholds(data=None):
    """Default thresholds updated by an optional JSON object (bytes or dict)."""
    out = dict(DEFAULT_THRESHOLDS)
    if data is None:
        return out
    extra = json.loads(data) if isinstance(data, (bytes, str)) else dict(data)
    unknown = set(extra) - set(out)
    if unknown:
        raise ValueError(f"unknown threshold keys: {sorted(unknown)}")
    for key, value in extra.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
            raise ValueError(f"threshold {key!r} must be a non-negative number")
        out[key] = float(value)
    return out


def _curve(kind, rng):
    if kind == "straight":
        return "straight"
    sign = 1.0 if rng.random() < 0.5 else -1.0
    if kind == "arc":
        return f"arc:{sign * rng.uniform(30.0, 120.0):.3f}"
    return f"bezier:{sign * rng.uniform(0.1, 0.3):.4f}"


def case_layout(suite, seed, case_id):
    """Curve string and layout keywords for one case."""
    rng = np.random.default_rng([int(seed), int(case_id)])
    if suite == "roundtrip":
        kind = ("straight", "arc", "bezier")[case_id % 3]
    elif suite == "ablation":
        kind = ("arc", "bezier")[case_id % 2]
    else:
        raise ValueError(f"unknown suite {suite!r}")
    curve = _curve(kind, rng)
    char_count = int(rng.integers(7, 11))
    char_width = int(rng.choice([20, 24, 28]))
    char_height = char_width + int(rng.integers(4, 9))
    if kind == "straight":
        tilt = 0.0
    elif suite == "ablation":
        tilt = float(rng.choice([-1.0, 1.0]) * rng.uniform(15.0, 30.0))
    else:
        tilt = float(rng.choice(_CURVED_TILTS))
    case_seed = int(rng.integers(0, 2 ** 31))
    return curve, dict(char_count=char_count, char_width=char_width,
                       char_height=char_height, tilt=round(tilt, 3), seed=case_seed)


def run_case(suite, seed, case_id, k=DEFAULT_K, thresholds=None):
    thresholds = load_thresholds(thresholds)
    curve, layout = case_layout(suite, seed, case_id)
    spec = make_spec(curve, **layout)
    sample = generate(spec)
    mae_char = round_trip_error(spec, k, sample=sample)
    mae_norm = round_trip_error(spec, k, orientation="normal", sample=sample)
    straight = spec.kind == "straight"
    limit = thresholds["straight"] if straight else thresholds["curved"]
    failures = []
    if mae_char > limit:
        failures.append(f"mae {mae_char:.4f} exceeds {limit}")
    if abs(spec.tilt) >= thresholds["ablation_min_tilt"] and not mae_char < mae_norm:
        failures.append("character orientation does not beat the normal direction")
    return {"id": int(case_id), "curve": curve, "kind": spec.kind, **layout,
            "mae_character": mae_char, "mae_normal": mae_norm, "limit": limit,
            "passed": not failures, "failures": failures}


def run_suite(suite="roundtrip", cases=20, seed=0, k=DEFAULT_K, thresholds=None):
    """Run ``cases`` seeded cases and return the report dictionary."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    if cases < 1:
        raise ValueError("cases must be at least 1")
    thresholds = load_thresholds(thresholds)
    results = [run_case(suite, seed, i, k, thresholds) for i in range(cases)]
    tilted = [r for r in results if abs(r["tilt"]) >= thresholds["ablation_min_tilt"]]

    def mean(rows, key):
        return float(np.mean([r[key] for r in rows])) if rows else None

    failing = [r["id"] for r in results if not r["passed"]]
    return {
        "suite": suite, "seed": int(seed), "k": int(k), "thresholds": thresholds,
        "cases": results,
        "aggregate": {
            "mae_character": mean(results, "mae_character"),
            "mae_normal": mean(results, "mae_normal"),
            "tilted_mae_character": mean(tilted, "mae_character"),
            "tilted_mae_normal": mean(tilted, "mae_normal"),
            "tilted_cases": len(tilted),
        },
        "failing_cases": failing,
        "passed": not failing,
    }
