"""Spectral distance on the Moyal plane, computed on truncated Fock spaces."""

from .elements import (
    MoyalElement,
    derivative,
    displacement_unitary,
    matrix_basis,
    star_product,
    translate_element,
    unit_element,
    zero_element,
)
from .errors import (
    AccuracyWarning,
    InconsistentEstimateError,
    InsufficientTruncationError,
    InvalidInputError,
    InvalidPairError,
    InvalidParameterError,
    InvalidWitnessError,
    MoyalError,
    PreconditionFailedError,
    SingularParameterError,
    TruncationOverflowError,
)
from .fock import (
    FockOperator,
    TruncationPolicy,
    identity,
    make_annihilation,
    make_creation,
    make_number,
    matrix_exponential,
    operator_norm,
)
from .lipschitz import (
    DoubleElement,
    double_block_inequalities,
    double_lipschitz_norm,
    lipschitz_seminorm,
)
from .optimal import (
    SchurCertificate,
    beta_thresholds,
    c_beta_matrix,
    f_beta,
    lambert_w,
    pythagoras_witness,
    schur_certificate,
)
from .solver import (
    DistanceEstimate,
    SolverOptions,
    candidate_lower_bound,
    double_distance,
    maximize_distance,
    translation_distance,
)
from .states import (
    MixedState,
    coherent_state,
    eigenstate,
    evaluate,
    ground_state,
    mixture,
    translate_state,
)
from .symplectic import (
    EuclideanGenerator,
    arc_length_bound,
    chord_distance,
    homothety_distance,
    lambda_from_state,
    quantum_length_squared,
    rotate_state,
)

__version__ = "0.1.0"
