"""Text rectification from geometric attributes.

Character quadrilaterals define a center line carrying scale, text
orientation and character orientation.  Symmetric control points built from
that line drive a thin-plate spline which maps a curved word onto a straight
raster.
"""

from .attribute_field import (
    AttributeMaps,
    extract_center_line,
    normalize_orientations,
    render_gt_maps,
)
from .errors import (
    ScrnError,
    InvalidQuad,
    DegenerateQuad,
    DegeneratePolyline,
    DegenerateOrientation,
    OutOfRange,
    InvalidK,
    OutOfBounds,
    NoText,
    TooShort,
    SingularSystem,
    LengthMismatch,
    ShapeMismatch,
    NonPositiveScale,
    InvalidDistribution,
    InvalidSpec,
    DoesNotFit,
    SchemaError,
    BoundsError,
    MapFormatError,
    BadMagic,
    BadVersion,
    TruncatedPayload,
    UnsupportedFormat,
    DecodeError,
)
from .geometry import (
    DEFAULT_K,
    CenterPolyline,
    CharQuad,
    ControlPoints,
    GeoSample,
    TextInstance,
    build_center_point_list,
    control_points,
    interpolate_attributes,
    normal_orientation,
    resample_equidistant,
)
from .io import (
    read_annotation,
    read_image,
    read_maps,
    write_annotation,
    write_image,
    write_maps,
)
from .losses import (
    GeoLossBreakdown,
    SymbolDistributionSequence,
    geo_loss,
    recognition_nll,
    smoothed_l1,
    tcl_loss,
    total_loss,
)
from .synthgen import CurveSpec, SynthSample, generate, make_spec, round_trip_error
from .tps import (
    TpsTransform,
    anchor_points,
    bilinear_sample,
    make_grid,
    rectify,
    tps_apply,
    tps_solve,
)

__version__ = "0.1.0"
