"""Coadjoint orbits, Casimir functions, and vertical extremal flows on
step-2 free-nilpotent Lie algebras.

The library models the first stratum of covectors as the state of a
Hamiltonian system driven by the support function of a strictly convex
control set, with the second stratum frozen into a skew Poisson matrix.
It computes the symplectic foliation, trivial and polynomial Casimirs
(exactly, on rational input), classifies the motion on two-dimensional
leaves into fixed points and periodic curves, measures eigenfrequency
commensurability on higher-dimensional leaves, and reconstructs the
horizontal group trajectory from the extremal control.
"""

from .algebra import (
    MAX_GENERATORS,
    AlgebraShape,
    GroupPoint,
    bracket,
    bracket_vectors,
    model_field,
    pair_index,
    pair_unindex,
)
from .casimir import (
    CasimirReport,
    EvenGeneratorCountError,
    casimir_report,
    identity_residual,
    pfaffian_coefficients,
    polynomial_casimir,
    residual_scale,
    trivial_casimirs,
)
from .coadjoint import (
    CovectorPoint,
    Leaf,
    leaf_through,
    linear_integral,
    poisson_matrix,
    rank_and_kernel,
    same_leaf,
)
from .convex import (
    AbnormalPointError,
    BallIntersection,
    BodyError,
    ConvexBody,
    Ellipsoid,
    LqBall,
    body_from_spec,
    unit_level_normalize,
)
from .dopri import DenseSolution, StepSizeUnderflow, integrate_ode
from .flow import (
    Classification,
    FixedSetEstimate,
    FlowTolerances,
    HorizontalCurve,
    IntegrationError,
    PeriodDetectionError,
    RecurrenceScan,
    SpectrumReport,
    Trajectory,
    classify,
    detect_period,
    fixed_set_estimate,
    integrate,
    reconstruct_horizontal,
    recurrence_scan,
    spectrum,
    subriemannian_closed_form,
    vertical_rhs,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_GENERATORS",
    "AlgebraShape",
    "GroupPoint",
    "bracket",
    "bracket_vectors",
    "model_field",
    "pair_index",
    "pair_unindex",
    "CasimirReport",
    "EvenGeneratorCountError",
    "casimir_report",
    "identity_residual",
    "pfaffian_coefficients",
    "polynomial_casimir",
    "residual_scale",
    "trivial_casimirs",
    "CovectorPoint",
    "Leaf",
    "leaf_through",
    "linear_integral",
    "poisson_matrix",
    "rank_and_kernel",
    "same_leaf",
    "AbnormalPointError",
    "BallIntersection",
    "BodyError",
    "ConvexBody",
    "Ellipsoid",
    "LqBall",
    "body_from_spec",
    "unit_level_normalize",
    "DenseSolution",
    "StepSizeUnderflow",
    "integrate_ode",
    "Classification",
    "FixedSetEstimate",
    "FlowTolerances",
    "HorizontalCurve",
    "IntegrationError",
    "PeriodDetectionError",
    "RecurrenceScan",
    "SpectrumReport",
    "Trajectory",
    "classify",
    "detect_period",
    "fixed_set_estimate",
    "integrate",
    "reconstruct_horizontal",
    "recurrence_scan",
    "spectrum",
    "subriemannian_closed_form",
    "vertical_rhs",
    "__version__",
]
