"""Gabor analysis on curved manifolds.

Builds Gabor systems over the unit cotangent bundle of a Riemannian
manifold: contact covector frames and their Reeb fields seed a lattice
bundle, signals on the base are lifted into tangent-space fibers through
the exponential map, and phase-twisted Gaussian windows turn the lifted
data into direction-sensitive coefficients for codimension-one boundary
detection.  A fiberwise Bargmann transform connects the coefficients to
weighted point evaluations on Fock space, which backs both an empirical
frame-bound estimator and a certificate for separable lattice scales.
"""

from .errors import (
    BudgetExceededError,
    ChartExitError,
    ConfigError,
    ContactGaborError,
    DegenerateConstraintError,
    GridMismatchError,
    IterationLimitError,
    MetricDegenerateError,
    MissingParameterError,
    ReebDegenerateError,
    WindowDegenerateError,
)
from .manifold import (
    RiemannianChart,
    exp_map,
    exp_map_rk4,
    flat_torus,
    generic_chart,
    injectivity_radius,
    lower_index,
    metric_at,
    raise_index,
    reduce_point,
    round_sphere,
    volume_density,
)
from .contact import (
    ContactFrame,
    CospherePoint,
    HypercomplexStructure,
    contact_condition_check,
    contact_covectors,
    contact_frame,
    cosphere_point,
    inverse_metric,
    orthonormal_completion,
    reeb_fields,
    standard_hypercomplex,
)
from .lattice import (
    LatticeFrame,
    LatticeSpec,
    build_lattice_frame,
    degenerate_locus_probe,
    enumerate_lattice_points,
    generator_matrix,
)
from .signals import (
    CutoffSpec,
    FiberGrid,
    LiftedFiberSignal,
    SignalOnB,
    ball_signal,
    band_signal,
    constant_signal,
    cutoff_chi,
    fiber_grid,
    fiber_l2_norm,
    global_l2_norm,
    grid_signal,
    half_space_signal,
    lift_signal,
    load_grid_csv,
    save_grid_csv,
)
from .gabor import (
    DetectionResult,
    FrameReport,
    GaborAtom,
    OutputField,
    WindowSpec,
    corollary_frame_certificate,
    detect_boundary_normal,
    frame_bounds_estimate,
    gabor_coefficient,
    output_function,
    output_scan,
    tf_shift_eval,
    window_eval,
    window_spec,
)
from .bargmann import (
    FockGrid,
    FockWeight,
    bargmann_transform,
    basis_e_alpha,
    complexify,
    decomplexify,
    embedding_check,
    fock_grid,
    fock_inner_product,
    ii_map,
    lemma_norm_verify,
    quadratic_form_P,
    reproducing_kernel,
)
from .robotics import (
    ArmSpec,
    ConstraintDensity,
    arm_config_space,
    band_edge_probes,
    boundary_map_pipeline,
    constraint_to_signal,
    anti_diagonal_band_constraint,
    workspace_map,
)

__version__ = "0.1.0"
