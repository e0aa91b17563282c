"""Codecs for the three on-disk formats.

* annotation JSON: character quads per text instance
* ``SCRN`` attribute-map container: 20-byte header (magic, version, height,
  width, downsample as little-endian uint32) then six float32 channels,
  channel-major and row-major
* 8-bit PNG images (grayscale or RGB)

All readers take ``bytes`` and raise subclasses of
:class:`~scrn.errors.ScrnError` on malformed input.
"""

import io as _io
import json
import math
import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .attribute_field import AttributeMaps
from .errors import (
    BadMagic,
    BadVersion,
    BoundsError,
    DecodeError,
    InvalidQuad,
    MapFormatError,
    SchemaError,
    TruncatedPayload,
    UnsupportedFormat,
)
from .geometry import CharQuad, TextInstance

MAGIC = b"SCRN"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")


@dataclass(frozen=True, eq=False)
class AnnotationDoc:
    image: str
    width: float
    height: float
    instances: tuple


# annotation JSON

def _num(v):
    return format(float(v), ".17g")


def write_annotation(instances, dims, image=""):
    """Serialize instances; ``dims`` is ``(width, height)`` of the working image.

    Coordinates are written with 17 significant digits so reading them back
    gives the same doubles.
    """
    width, height = dims
    parts = []
    for inst in instances:
        chars = ", ".join(
            "[" + ", ".join(f"[{_num(x)}, {_num(y)}]" for x, y in q.corners) + "]"
            for q in inst.chars)
        item = '{"chars": [' + chars + "]"
        if inst.transcript is not None:
            item += ', "transcript": ' + json.dumps(inst.transcript)
        parts.append(item + "}")
    text = ('{"image": ' + json.dumps(image) + ', "width": ' + _num(width)
            + ', "height": ' + _num(height) + ', "instances": [' + ", ".join(parts) + "]}\n")
    return text.encode("utf-8")


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, "expected a number")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaError(path, "expected a finite number")
    return value


def _field(obj, key, path):
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing field")
    return obj[key]


def read_annotation_doc(data) -> AnnotationDoc:
    try:
        doc = json.loads(bytes(data).decode("utf-8"))
    except (UnicodeDecodeError, ValueError, RecursionError) as exc:
        raise SchemaError("", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("", "document must be a JSON object")
    image = _field(doc, "image", "")
    if not isinstance(image, str):
        raise SchemaError("image", "expected a string")
    width = _number(_field(doc, "width", ""), "width")
    height = _number(_field(doc, "height", ""), "height")
    if width <= 0 or height <= 0:
        raise SchemaError("width" if width <= 0 else "height", "must be positive")
    raw = _field(doc, "instances", "")
    if not isinstance(raw, list):
        raise SchemaError("instances", "expected a list")

    instances = []
    for i, inst in enumerate(raw):
        path = f"instances[{i}]"
        if not isinstance(inst, dict):
            raise SchemaError(path, "expected an object")
        chars = _field(inst, "chars", path)
        if not isinstance(chars, list) or not chars:
            raise SchemaError(f"{path}.chars", "expected a non-empty list")
        transcript = inst.get("transcript")
        if transcript is not None and not isinstance(transcript, str):
            raise SchemaError(f"{path}.transcript", "expected a string")
        quads = []
        for j, quad in enumerate(chars):
            qpath = f"{path}.chars[{j}]"
            if not isinstance(quad, list) or len(quad) != 4:
                raise SchemaError(qpath, "expected 4 corners")
            corners = []
            for c, pt in enumerate(quad):
                if not isinstance(pt, list) or len(pt) != 2:
                    raise SchemaError(f"{qpath}[{c}]", "expected [x, y]")
                x = _number(pt[0], f"{qpath}[{c}][0]")
                y = _number(pt[1], f"{qpath}[{c}][1]")
                if not (0 <= x <= width and 0 <= y <= height):
                    raise BoundsError(f"{qpath}[{c}] = ({x}, {y}) lies outside "
                                      f"[0, {width}] x [0, {height}]")
                corners.append((x, y))
            try:
                quads.append(CharQuad(corners))
            except InvalidQuad as exc:
                raise SchemaError(qpath, str(exc)) from None
        instances.append(TextInstance(tuple(quads), transcript))
    return AnnotationDoc(image, width, height, tuple(instances))


def read_annotation(data):
    """Parse annotation JSON into a list of :class:`TextInstance`."""
    return list(read_annotation_doc(data).instances)


# attribute maps

def write_maps(maps: AttributeMaps):
    h, w = maps.shape
    header = _HEADER.pack(MAGIC, VERSION, h, w, maps.downsample)
    return header + maps.data.astype("<f4").tobytes(order="C")


def read_maps(data) -> AttributeMaps:
    data = bytes(data)
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic("not a SCRN attribute-map file")
    if len(data) < _HEADER.size:
        raise TruncatedPayload("header is incomplete")
    _, version, h, w, d = _HEADER.unpack_from(data)
    if version != VERSION:
        raise BadVersion(f"unsupported version {version}")
    if h == 0 or w == 0 or d == 0:
        raise MapFormatError("height, width and downsample must be positive")
    expected = 24 * h * w
    payload = len(data) - _HEADER.size
    if payload < expected:
        raise TruncatedPayload(f"payload has {payload} bytes, expected {expected}")
    if payload > expected:
        raise MapFormatError(f"{payload - expected} trailing bytes after payload")
    arr = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(6, h, w)
    return AttributeMaps(arr.astype(np.float64), d)


# images

def write_image(img):
    """PNG bytes of an ``(H, W)``, ``(H, W, 1)`` or ``(H, W, 3)`` image in [0, 1]."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 3 and a.shape[2] == 1:
        a = a[:, :, 0]
    if not (a.ndim == 2 or (a.ndim == 3 and a.shape[2] == 3)):
        raise UnsupportedFormat(f"cannot write an image of shape {a.shape}")
    q = np.round(np.clip(a, 0.0, 1.0) * 255).astype(np.uint8)
    buf = _io.BytesIO()
    Image.fromarray(q).save(buf, format="PNG")
    return buf.getvalue()


def read_image(data):
    """Decode an 8-bit grayscale or RGB PNG to floats; grayscale comes back as ``(H, W)``."""
    data = bytes(data)
    if not data.startswith(b"\x89PNG\r\n\x1a\n"):
        raise UnsupportedFormat("only PNG images are supported")
    try:
        with Image.open(_io.BytesIO(data)) as im:
            mode = im.mode
            if mode not in ("L", "RGB"):
                raise UnsupportedFormat(f"unsupported PNG mode {mode!r}")
            im.load()
            arr = np.asarray(im, dtype=np.uint8)
    except UnsupportedFormat:
        raise
    except Exception as exc:  # Pillow raises many unrelated types on corrupt data
        raise DecodeError(f"cannot decode PNG: {exc}") from None
    return arr.astype(np.float64) / 255.0
