"""Command-line front end.

Subcommands: ``gen``, ``gt``, ``rectify``, ``extract``, ``eval`` and ``loss``.
Machine-readable output goes to standard output as JSON and diagnostics go
to standard error.

Exit codes: 0 success, 1 runtime or data error, 2 usage error, 3 no text
found in the attribute maps.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from .attribute_field import (
    DEFAULT_DOWNSAMPLE,
    DEFAULT_THRESHOLD,
    extract_center_line,
    render_gt_maps,
)
from .errors import InvalidSpec, NoText, ScrnError
from .evaluation import SUITES, run_suite
from .geometry import DEFAULT_K, build_center_point_list
from .io import read_annotation_doc, read_image, read_maps, write_annotation, write_image, write_maps
from .losses import DEFAULT_WEIGHTS, geo_loss
from .synthgen import generate, make_spec
from .tps import DEFAULT_REGULARIZATION, rectify

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NO_TEXT = 3


class UsageError(Exception):
    """Flag values that parse but make no sense together."""


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _note(msg):
    print(msg, file=sys.stderr)


def _write(path, data):
    Path(path).write_bytes(data)


def _read(path):
    return Path(path).read_bytes()


def _polyline_json(poly):
    return {"samples": [
        {"x": float(c[0]), "y": float(c[1]), "s": float(s),
         "cos_theta": float(t[0]), "sin_theta": float(t[1]),
         "cos_phi": float(p[0]), "sin_phi": float(p[1])}
        for c, s, t, p in zip(poly.centers, poly.scales, poly.theta, poly.phi)]}


def _char_size(text):
    try:
        w, h = (float(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if not (w > 0 and h > 0 and math.isfinite(w) and math.isfinite(h)):
        raise argparse.ArgumentTypeError("character size must be positive")
    return w, h


def _weights(text):
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must be numbers, got {text!r}") from None
    if len(values) != 6:
        raise argparse.ArgumentTypeError(f"expected 6 comma-separated weights, got {len(values)}")
    return values


def _probability(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"threshold must lie in (0, 1), got {value}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _k(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"k must be at least 2, got {value}")
    return value


# subcommands

def cmd_gen(args):
    w, h = args.char_size
    try:
        spec = make_spec(args.curve, args.chars, w, h, args.tilt, args.seed)
        spec.validate()
    except InvalidSpec as exc:
        raise UsageError(str(exc)) from None
    sample = generate(spec)
    height, width = sample.image.shape
    _write(args.out_image, write_image(sample.image))
    _write(args.out_ann, write_annotation([sample.instance], (width, height),
                                          image=Path(args.out_image).name))
    if args.out_ref:
        _write(args.out_ref, write_image(sample.straight_reference))
    _emit({"image": args.out_image, "annotation": args.out_ann, "reference": args.out_ref,
           "width": width, "height": height, "transcript": sample.instance.transcript,
           "kind": spec.kind, "params": list(spec.params)})


def cmd_gt(args):
    doc = read_annotation_doc(_read(args.ann))
    width = doc.width if args.width is None else args.width
    height = doc.height if args.height is None else args.height
    d = args.downsample
    map_h, map_w = math.ceil(height / d), math.ceil(width / d)
    maps = render_gt_maps(doc.instances, map_h, map_w, d)
    _write(args.out_maps, write_maps(maps))
    _emit({"maps": args.out_maps, "height": map_h, "width": map_w, "downsample": d,
           "tcl_pixels": int(maps.tcl_mask().sum())})


def cmd_rectify(args):
    image = read_image(_read(args.image))
    if args.ann:
        instances = read_annotation_doc(_read(args.ann)).instances
        if not 0 <= args.instance < len(instances):
            raise UsageError(f"--instance {args.instance} out of range "
                             f"({len(instances)} instances)")
        polyline = build_center_point_list(instances[args.instance])
    else:
        polyline = extract_center_line(read_maps(_read(args.maps)), args.threshold)
    out_h = image.shape[0] if args.out_height is None else args.out_height
    out_w = image.shape[1] if args.out_width is None else args.out_width
    out = rectify(image, polyline, args.k, out_h, out_w, args.regularization)
    _write(args.out, write_image(out))
    _emit({"out": args.out, "height": out_h, "width": out_w, "k": args.k,
           "source": "annotation" if args.ann else "maps"})


def cmd_extract(args):
    maps = read_maps(_read(args.maps))
    poly = extract_center_line(maps, args.threshold)
    result = _polyline_json(poly)
    if args.out_json:
        _write(args.out_json, (json.dumps(result, indent=2) + "\n").encode("utf-8"))
    _emit(result)


def cmd_eval(args):
    thresholds = _read(args.thresholds) if args.thresholds else None
    report = run_suite(args.suite, args.cases, args.seed, args.k, thresholds)
    for case in report["cases"]:
        _note(f"case {case['id']:3d} {case['curve']:>16s} tilt {case['tilt']:7.2f}  "
              f"character {case['mae_character']:.4f}  normal {case['mae_normal']:.4f}  "
              f"{'ok' if case['passed'] else 'FAIL'}")
    if args.report:
        _write(args.report, (json.dumps(report, indent=2) + "\n").encode("utf-8"))
    _emit(report)
    if not report["passed"]:
        _note(f"failing cases: {report['failing_cases']}")
        return EXIT_ERROR
    return EXIT_OK


def cmd_loss(args):
    pred = read_maps(_read(args.pred_maps))
    gt = read_maps(_read(args.gt_maps))
    mask = gt.tcl_mask(args.threshold)
    _emit(geo_loss(pred, gt, mask, args.weights).as_dict())


def build_parser():
    parser = argparse.ArgumentParser(prog="scrn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic curved word")
    p.add_argument("--curve", default="straight",
                   help="straight, arc:DEG or bezier:BEND (default straight)")
    p.add_argument("--chars", type=int, default=6, help="number of characters (default 6)")
    p.add_argument("--char-size", type=_char_size, default=(24.0, 32.0), metavar="WxH",
                   help="character width and height in pixels (default 24x32)")
    p.add_argument("--tilt", type=float, default=0.0, help="character tilt in degrees")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-image", required=True)
    p.add_argument("--out-ann", required=True)
    p.add_argument("--out-ref", help="also write the straight reference rendering")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("gt", help="render ground-truth attribute maps")
    p.add_argument("--ann", required=True)
    p.add_argument("--width", type=float, help="working image width (default from annotation)")
    p.add_argument("--height", type=float, help="working image height (default from annotation)")
    p.add_argument("--downsample", type=_positive_int, default=DEFAULT_DOWNSAMPLE,
                   help=f"map stride in image pixels (default {DEFAULT_DOWNSAMPLE})")
    p.add_argument("--out-maps", required=True)
    p.set_defaults(func=cmd_gt)

    p = sub.add_parser("rectify", help="rectify a text image")
    p.add_argument("--image", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--ann", help="take the center line from character annotations")
    src.add_argument("--maps", help="extract the center line from attribute maps")
    p.add_argument("--k", type=_k, default=DEFAULT_K,
                   help=f"control-point pairs (default {DEFAULT_K})")
    p.add_argument("--out-width", type=_positive_int, help="output width (default: image width)")
    p.add_argument("--out-height", type=_positive_int,
                   help="output height (default: image height)")
    p.add_argument("--lambda", dest="regularization", type=float, default=DEFAULT_REGULARIZATION,
                   help=f"spline regularization (default {DEFAULT_REGULARIZATION:g})")
    p.add_argument("--threshold", type=_probability, default=DEFAULT_THRESHOLD,
                   help="center-line threshold for --maps")
    p.add_argument("--instance", type=int, default=0, help="annotation instance to rectify")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rectify)

    p = sub.add_parser("extract", help="extract the center line from attribute maps")
    p.add_argument("--maps", required=True)
    p.add_argument("--threshold", type=_probability, default=DEFAULT_THRESHOLD,
                   help=f"center-line threshold (default {DEFAULT_THRESHOLD})")
    p.add_argument("--out-json", help="also write the JSON to this file")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("eval", help="run a seeded round-trip evaluation")
    p.add_argument("--suite", choices=SUITES, default="roundtrip")
    p.add_argument("--cases", type=_positive_int, default=20, help="number of cases (default 20)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=_k, default=DEFAULT_K,
                   help=f"control-point pairs (default {DEFAULT_K})")
    p.add_argument("--thresholds", help="JSON file overriding the pass thresholds")
    p.add_argument("--report", help="also write the JSON report to this file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("loss", help="geometry loss between two map files")
    p.add_argument("--pred-maps", required=True)
    p.add_argument("--gt-maps", required=True)
    p.add_argument("--weights", type=_weights, default=DEFAULT_WEIGHTS,
                   help="six comma-separated weights (default 1,1,1,1,1,1)")
    p.add_argument("--threshold", type=_probability, default=DEFAULT_THRESHOLD,
                   help="TCL threshold defining the ground-truth mask")
    p.set_defaults(func=cmd_loss)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    lam = getattr(args, "regularization", 0.0)
    if not (math.isfinite(lam) and lam >= 0):
        parser.error("--lambda must be a finite non-negative number")
    try:
        code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except NoText as exc:
        _note(f"NoText: {exc}")
        return EXIT_NO_TEXT
    except (ScrnError, OSError, ValueError) as exc:
        _note(f"{type(exc).__name__}: {exc}")
        return EXIT_ERROR
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
