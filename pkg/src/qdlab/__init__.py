"""qdlab: a numerical laboratory for quantum decision-theoretic value rules.

The package checks which algebraic axioms candidate probability rules
satisfy on quantum games, solves the classical swap-indifference system,
reconstructs density operators from frame functions, and searches
probability assignments for contextuality. Hot evaluation loops run on a
compiled kernel when built, with a pure-numpy fallback selected at import
(override with the ``QDLAB_KERNELS`` environment variable).
"""

from ._kernels import BACKEND_NAME as _backend_name
from .axioms import (
    AXIOM_IDS,
    AxiomReport,
    AxiomResidual,
    AxiomStats,
    check_displacement,
    check_equal_swap,
    check_general_swap,
    check_implication_displacement_zerosum_to_sum,
    check_pivotal,
    check_sum_relation,
    check_zero_sum,
    expected_axioms,
    run_suite,
)
from .classical import (
    ClassicalGame,
    UnderdeterminedError,
    certainty_equivalent,
    consistency_bridge,
    expected_utility,
    insufficient_reason_uniform,
    solve_insufficient_reason,
)
from .games import (
    BornValue,
    ConstantValue,
    DeterministicValue,
    FMeanValue,
    GameValidationError,
    MonotoneTransform,
    QuantumGame,
    UniformSupportValue,
    ValueFunctional,
    born_value,
    computational_game,
    deterministic_value,
    displace,
    exponential_transform,
    fmean_value,
    game_state,
    identity_transform,
    load_game,
    make_game,
    negate,
    parse_game,
    power_transform,
    resolve_functional,
    swap_utilities,
    uniform_support_value,
    utility_operator,
)
from .gleason import (
    ContextualAssignment,
    ContextualityWitness,
    DensityOperator,
    FrameFunction,
    assignment_from_frame_function,
    born_frame_function,
    check_basis_normalization,
    detect_contextuality,
    fit_density_operator,
    flatten_assignment,
    random_density_operator,
    trace_distance,
    uniform_support_assignment,
    verify_density_operator,
)
from .hilbert import (
    DegenerateBasisError,
    HermitianOperator,
    OrthonormalBasis,
    StateVector,
    complete_basis,
    derive_rng,
    expectation,
    gram_schmidt,
    hermitian_eigendecomposition,
    inner_product,
    random_basis,
    random_state,
)

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active evaluation backend: 'compiled' or 'python'."""
    return _backend_name


__all__ = [
    "AXIOM_IDS",
    "AxiomReport",
    "AxiomResidual",
    "AxiomStats",
    "BornValue",
    "ClassicalGame",
    "ConstantValue",
    "ContextualAssignment",
    "ContextualityWitness",
    "DegenerateBasisError",
    "DensityOperator",
    "DeterministicValue",
    "FMeanValue",
    "FrameFunction",
    "GameValidationError",
    "HermitianOperator",
    "MonotoneTransform",
    "OrthonormalBasis",
    "QuantumGame",
    "StateVector",
    "UnderdeterminedError",
    "UniformSupportValue",
    "ValueFunctional",
    "assignment_from_frame_function",
    "born_frame_function",
    "born_value",
    "certainty_equivalent",
    "check_basis_normalization",
    "check_displacement",
    "check_equal_swap",
    "check_general_swap",
    "check_implication_displacement_zerosum_to_sum",
    "check_pivotal",
    "check_sum_relation",
    "check_zero_sum",
    "complete_basis",
    "computational_game",
    "consistency_bridge",
    "derive_rng",
    "detect_contextuality",
    "deterministic_value",
    "displace",
    "expectation",
    "expected_axioms",
    "expected_utility",
    "exponential_transform",
    "fit_density_operator",
    "flatten_assignment",
    "fmean_value",
    "game_state",
    "gram_schmidt",
    "hermitian_eigendecomposition",
    "identity_transform",
    "inner_product",
    "insufficient_reason_uniform",
    "kernel_backend",
    "load_game",
    "make_game",
    "negate",
    "parse_game",
    "power_transform",
    "random_basis",
    "random_density_operator",
    "random_state",
    "resolve_functional",
    "run_suite",
    "solve_insufficient_reason",
    "swap_utilities",
    "trace_distance",
    "uniform_support_assignment",
    "uniform_support_value",
    "utility_operator",
    "verify_density_operator",
    "__version__",
]
