"""Worst-case SVM regularization-path instances in exact rational arithmetic.

Builds perturbed-cube SVM instances whose solution path visits exponentially
many distinct support-vector sets, certifies every breakpoint with exact
optimality conditions, and sweeps the regularization parameter to count path
bends experimentally.
"""

from .construct import (
    Calibration,
    ConstructedPair,
    StretchFactor,
    SupportDecomposition,
    SvmInstance,
    admissible_constructions,
    build_instance,
    build_p_stretched,
    build_q,
    calibrate,
    choose_stretch,
    facet_strictness_check,
    generate_2d_arc_instance,
    mu_of_q,
    reduced_hull_segment,
    stretch,
    support_decomposition,
)
from .geometry import (
    HalfSpace,
    HPolytope,
    Polygon2,
    Rational,
    Vec,
    convex_hull_2d,
    normalize_halfspace,
    project_to_unit_hyperplane,
    rat,
    solve_linear_system,
)
from .goldfarb import (
    CubeVertex,
    DualVertex,
    GoldfarbParams,
    ShadowCertificate,
    admissible_sign_vectors,
    build_goldfarb,
    cube_vertex,
    cube_vertices,
    dual_vertex,
    dual_vertices,
    shadow_certificate,
    shadow_polygon,
    sign_vectors,
)
from .instance_io import parse_instance, read_instance, serialize_instance, write_instance
from .qp import (
    KktCertificate,
    OptimalPair,
    ReducedHullQP,
    build_kkt_certificate,
    kkt_check_general,
    mu_from_nu,
    nu_from_mu,
    solve_reduced_distance,
    support_set,
    verify_relaxed_uniqueness,
)
from .sweep import (
    SweepRecord,
    SweepReport,
    refine_between,
    sweep_constructed,
    sweep_grid,
    sweep_refined,
)

__version__ = "0.1.0"
