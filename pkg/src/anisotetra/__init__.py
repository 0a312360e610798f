"""Interpolation error analysis on arbitrary tetrahedra.

Classification and standard position of tetrahedra, the quality quantities
R_T and H_T, Lagrange interpolation error bounds driven by R_T/h_T, a
difference-quotient calculus on lattice refinements of the reference
tetrahedra, and the equivalence between R_T/h_T bounds and the maximum
angle condition.
"""

from .errors import (
    AnisotetraError,
    DegenerateTetrahedron,
    DerivativeUnavailable,
    ExpressionParseError,
    GenerationFailure,
    IllConditionedBasis,
    InadmissiblePC,
    InputError,
    InvalidDegree,
    InvalidGammaMax,
    MissingNodeValue,
    NumericalError,
    ParseError,
    UnsupportedDegree,
)
from .geom import (
    Classification,
    GeometryReport,
    MacConstants,
    Point3,
    StandardPosition,
    Tetrahedron,
    TransformMatrices,
    TrigIdentityReport,
    TYPE1,
    TYPE2,
    angles,
    classify,
    edge_lengths,
    mac_bound_constants,
    mac_check,
    mac_reverse_gamma,
    matrices,
    max_face_and_dihedral_angle,
    quality,
    quality_ratio,
    reference_tetrahedron,
    sorted_edge_lengths,
    standard_position,
    standard_position_vertices,
    verify_trig_identities,
    volume,
)
from .lattice import (
    Box,
    difference_quotient,
    enumerate_boxes,
    gamma_to_lattice,
    in_lattice,
    lattice_points,
    lattice_to_gamma,
    nodes_on,
    quotient_coefficients,
    quotient_from_function,
    quotient_integral,
    sigma_k,
)
from .interp import (
    Interpolant,
    Polynomial3,
    ScalarField,
    interpolate,
    lagrange_basis,
    monomial_indices,
    residual,
)
from .quad import (
    QuadratureRule,
    SeminormInfo,
    SeminormSpec,
    integrate,
    rule_for_degree,
    seminorm,
    seminorm_with_info,
    validate_p,
)
from .expr import field_from_expression, parse_expression, partial_node
from .verify import (
    ConvergenceResult,
    EquivalenceReport,
    ErrorRatioResult,
    MacReport,
    SweepResult,
    TetraGenSpec,
    bubble_polynomial,
    convergence_study,
    corpus,
    default_alpha_grid,
    equivalence_sample,
    error_ratio,
    generate,
    mac_experiment,
    squeeze_sweep,
)

__version__ = "0.1.0"
