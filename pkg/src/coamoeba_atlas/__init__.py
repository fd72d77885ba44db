"""Critical locus and critical values of the log/argument maps of a plane.

The object of study is the generic affine plane in C^4 parametrized by
(x, y) -> (x, y, x + y - 1, x + k*y - a), restricted to the locus where all
four coordinates are nonzero.  The package computes the common critical
locus of its amoeba (coordinatewise log |.|), coamoeba (coordinatewise
argument) and rolled-coamoeba (argument mod pi) maps, inverts the rolled map
off the critical locus, classifies fibers over critical values, traces the
coincidence geometry of the critical-value surface, and numerically
verifies the covering topology.  The ``checks`` module aggregates the
verification suite surfaced by the ``coamoeba-atlas`` CLI.
"""

from .plane import (
    DEFAULT_CONFIG,
    InsufficientHits,
    OffTorus,
    PlaneConfig,
    Tolerances,
    TorusPoint,
    arg_tuple,
    crit_det,
    grad_crit_det,
    in_torus,
    jacobian_oracle_batch,
    maps,
    random_torus_points,
    sample_critical_points,
    validate_config,
    z_coords,
)
from .projective import (
    Conic,
    NotConcurrent,
    ProjLine,
    RP1Dir,
    RP2Point,
    affine_line_through_direction,
    circle_center_radius,
    circumcircle,
    fit_conic,
    intersect_conics,
    line_through,
    two_arg,
)
from .fibers import (
    Arc,
    FiberClassification,
    FiberModel,
    MultipleArcs,
    NotAttained,
    NotCritical,
    NotRegular,
    RolledValue,
    classify_value,
    coamoeba_fiber_interval,
    fiber_arcs,
    fiber_model,
    invert_regular,
    invert_via_lambda,
    sixteen_fold_check,
)
from .critical import (
    concurrency_lines_point,
    conic_for_l,
    d_circles_check,
    gauge_jacobian,
    pencil_model,
    point_d_direct,
)
from .topology import (
    ArrangementReport,
    CoincidenceLocus,
    CoveringReport,
    MonodromyReport,
    arc_count_survey,
    arrangement_euler,
    boundary_circle_lap,
    covering_report,
    cyclic_order,
    monodromy_report,
    trace_coincidence_loci,
    transport_along,
    triple_coincidence_scan,
)
from .checks import CheckResult, build_report, report_to_json, run_all

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "ArrangementReport",
    "CheckResult",
    "CoincidenceLocus",
    "Conic",
    "CoveringReport",
    "DEFAULT_CONFIG",
    "FiberClassification",
    "FiberModel",
    "InsufficientHits",
    "MonodromyReport",
    "MultipleArcs",
    "NotAttained",
    "NotConcurrent",
    "NotCritical",
    "NotRegular",
    "OffTorus",
    "PlaneConfig",
    "ProjLine",
    "RP1Dir",
    "RP2Point",
    "RolledValue",
    "Tolerances",
    "TorusPoint",
    "affine_line_through_direction",
    "arc_count_survey",
    "arg_tuple",
    "arrangement_euler",
    "boundary_circle_lap",
    "build_report",
    "circle_center_radius",
    "circumcircle",
    "classify_value",
    "coamoeba_fiber_interval",
    "concurrency_lines_point",
    "conic_for_l",
    "covering_report",
    "crit_det",
    "cyclic_order",
    "d_circles_check",
    "fiber_arcs",
    "fiber_model",
    "fit_conic",
    "gauge_jacobian",
    "grad_crit_det",
    "in_torus",
    "intersect_conics",
    "invert_regular",
    "invert_via_lambda",
    "jacobian_oracle_batch",
    "line_through",
    "maps",
    "monodromy_report",
    "pencil_model",
    "point_d_direct",
    "random_torus_points",
    "report_to_json",
    "run_all",
    "sample_critical_points",
    "sixteen_fold_check",
    "trace_coincidence_loci",
    "transport_along",
    "triple_coincidence_scan",
    "two_arg",
    "validate_config",
    "z_coords",
]
