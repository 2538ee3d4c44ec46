"""Geodesic flows on SL(2,R) with naturally reductive metrics, and on the modular quotient."""

from .errors import DomainError, NumericalError
from .fuchsian import (
    ModularElement,
    LyapunovEstimate,
    ReductionResult,
    area_pq,
    eisenstein_e4_e6,
    fixed_point_of_momentum,
    gamma2_volume,
    in_fundamental_domain,
    klein_j,
    lyapunov_estimate,
    lyapunov_momentum_for_level,
    modular_volume,
    reduce_group,
    reduce_point,
    right_momentum,
    third_integral,
    volume_coefficient,
    volume_torus_knot_complement,
)
from .geodesic_flow import (
    CurvatureRatio,
    DriftReport,
    Frequencies,
    GeodesicState,
    InvariantsRecord,
    PeriodicityResult,
    RightMomentum,
    Trajectory,
    check_conservation,
    closed_form_arrays,
    closed_form_geodesic,
    curvature_ratio,
    detect_rational_ratio,
    euler_poincare_rhs,
    frequencies,
    group_residual_at,
    hamiltonian,
    integrate_oracle,
    invariants,
    sample_closed_form,
    verify_group_periodicity,
)
from .hyperbolic_plane import (
    Circle,
    CurveClass,
    HPoint,
    Line,
    Point,
    UnitTangentPoint,
    arc_lengths,
    classify_curve,
    explicit_projection,
    fd_curvature_and_speed,
    geodesic_curvature,
    hyperbolic_distance,
    magnetic_residual,
    mobius,
    project,
    project_arrays,
    projected_curve_params,
)
from .knots import (
    L,
    R,
    CableKnotParams,
    ClosedGeodesic,
    ElementClass,
    LRWord,
    QuadraticFormZ,
    axis_and_length,
    cable_from_ratio,
    cable_knot_params,
    classify_modular_element,
    closed_geodesic_of,
    lr_decompose,
    momentum_for_ratio,
    quadratic_form_of,
    rademacher,
)
from .lie_core import (
    AlgebraVelocity,
    CartanSplit,
    GroupElement,
    MetricParams,
    MomentumABC,
    abc_uvw_convert,
    cartan_split,
    exp_rotation,
    exp_traceless,
    inner_product,
    metric_norm2,
    momentum_of,
    sym_skew_split,
    velocity_of,
)

__version__ = "0.1.0"
