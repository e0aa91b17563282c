"""Exception types raised across the package.

Every error derives from :class:`ScrnError`, so callers (and the CLI) can
catch one type. Most also derive from ``ValueError`` since they report bad
input rather than a broken program.
"""


class ScrnError(Exception):
    """Base class for all package errors."""


# geometry
class InvalidQuad(ScrnError, ValueError):
    """Character quadrilateral is non-finite, self-intersecting or wound the wrong way."""


class DegenerateQuad(InvalidQuad):
    """A quadrilateral has a zero-length vertical edge."""


class DegeneratePolyline(ScrnError, ValueError):
    """Consecutive center points coincide or the polyline has no length."""


class DegenerateOrientation(ScrnError, ValueError):
    """An interpolated (cos, sin) pair collapsed to (nearly) zero length."""


class OutOfRange(ScrnError, ValueError):
    pass


class InvalidK(ScrnError, ValueError):
    pass


# attribute maps
class OutOfBounds(ScrnError, ValueError):
    pass


class NoText(ScrnError):
    """The TCL mask is empty."""


class TooShort(ScrnError):
    """Fewer than two center points could be traced."""


# tps
class SingularSystem(ScrnError, ValueError):
    pass


class LengthMismatch(ScrnError, ValueError):
    pass


# losses
class ShapeMismatch(ScrnError, ValueError):
    pass


class NonPositiveScale(ScrnError, ValueError):
    pass


class InvalidDistribution(ScrnError, ValueError):
    pass


# synthgen
class InvalidSpec(ScrnError, ValueError):
    pass


class DoesNotFit(ScrnError, ValueError):
    pass


# io
class SchemaError(ScrnError, ValueError):
    """Annotation document violates the schema; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class BoundsError(ScrnError, ValueError):
    pass


class MapFormatError(ScrnError, ValueError):
    """Malformed attribute-map container."""


class BadMagic(MapFormatError):
    pass


class BadVersion(MapFormatError):
    pass


class TruncatedPayload(MapFormatError):
    pass


class UnsupportedFormat(ScrnError, ValueError):
    pass


class DecodeError(ScrnError, ValueError):
    pass
