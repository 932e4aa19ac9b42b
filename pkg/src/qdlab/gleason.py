"""Frame functions, density-operator reconstruction, and contextuality.

A frame function assigns a probability to each rank-one projector (here
represented by a unit state vector) such that the assignments over any
orthonormal basis sum to one. Every density operator rho induces one via
f(psi) = <psi|rho|psi>, and for dimension > 2 these are the only frame
functions — so fitting rho to observed values of f and checking the fit
residual plus positive semidefiniteness is a practical test of whether an
assignment is quantum-representable.

A contextual assignment is allowed to depend on the whole basis, not just
the state; the detector searches for a state whose assigned probability
changes between two bases containing it.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .games import SUPPORT_EPS
from .hilbert import (
    OrthonormalBasis,
    StateVector,
    _frozen_array,
    complete_basis,
    haar_state_batch,
    random_state,
)
from .reporting import complex_pairs, json_ready

DENSITY_HERMITIAN_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-9
DENSITY_PSD_TOL = 1e-8
WITNESS_TOL = 1e-6
_FIT_MAX_RETRIES = 5


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian trace-one matrix.

    Positive semidefiniteness is deliberately *not* enforced here: the
    reconstruction fit must be able to return its unconstrained solution
    so that assignments with no quantum representation are exposed by
    :func:`verify_density_operator` instead of masked at construction.
    """

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise ValueError("matrix must be square and nonempty")
        deviation = float(np.max(np.abs(mat - mat.conj().T)))
        if deviation > DENSITY_HERMITIAN_TOL:
            raise ValueError(
                f"matrix deviates from Hermitian symmetry by {deviation:g} "
                f"(tolerance {DENSITY_HERMITIAN_TOL:g})"
            )
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > DENSITY_TRACE_TOL:
            raise ValueError(
                f"trace is {trace!r}, violating the unit-trace invariant "
                f"(tolerance {DENSITY_TRACE_TOL:g})"
            )
        object.__setattr__(self, "matrix", _frozen_array(mat, np.complex128))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @classmethod
    def pure(cls, state: StateVector) -> "DensityOperator":
        amps = state.amplitudes
        return cls(np.outer(amps, amps.conj()))


def random_density_operator(
    dim: int, rng: np.random.Generator, rank: int | None = None
) -> DensityOperator:
    """Random full-rank (or fixed-rank) density operator, G G^dag normalized."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    g = (rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank)))
    raw = g @ g.conj().T
    raw = (raw + raw.conj().T) / 2.0
    return DensityOperator(raw / np.trace(raw).real)


@dataclass(frozen=True)
class VerificationReport:
    """Defining-property check of a candidate density operator."""

    hermiticity_error: float
    trace_error: float
    min_eigenvalue: float
    tolerance: float

    @property
    def psd_ok(self) -> bool:
        return self.min_eigenvalue >= -self.tolerance

    @property
    def passed(self) -> bool:
        return (
            self.hermiticity_error <= self.tolerance
            and self.trace_error <= self.tolerance
            and self.psd_ok
        )

    def to_json_dict(self) -> dict:
        return json_ready({
            "hermiticity_error": self.hermiticity_error,
            "trace_error": self.trace_error,
            "min_eigenvalue": self.min_eigenvalue,
            "tolerance": self.tolerance,
            "psd_ok": self.psd_ok,
            "passed": self.passed,
        })


def verify_density_operator(
    rho: DensityOperator | np.ndarray, tol: float = DENSITY_PSD_TOL
) -> VerificationReport:
    """Report Hermiticity error, trace error, and minimum eigenvalue vs tol."""
    mat = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=np.complex128)
    hermiticity = float(np.max(np.abs(mat - mat.conj().T)))
    trace_error = abs(complex(np.trace(mat)) - 1.0)
    min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)[0])
    return VerificationReport(hermiticity, float(trace_error), min_eig, float(tol))


def trace_distance(a: DensityOperator | np.ndarray, b: DensityOperator | np.ndarray) -> float:
    """Half the sum of the absolute eigenvalues of the difference."""
    mat_a = a.matrix if isinstance(a, DensityOperator) else np.asarray(a, dtype=np.complex128)
    mat_b = b.matrix if isinstance(b, DensityOperator) else np.asarray(b, dtype=np.complex128)
    if mat_a.shape != mat_b.shape:
        raise ValueError(f"shape mismatch: {mat_a.shape} vs {mat_b.shape}")
    diff = mat_a - mat_b
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2.0))))


# ---------------------------------------------------------------------------
# density-operator files
# ---------------------------------------------------------------------------


def parse_density_operator(doc: dict) -> DensityOperator:
    """Build a density operator from its file representation.

    Expected fields: ``dim`` and ``matrix``, the latter a dim x dim nested
    list of [re, im] pairs. Validation errors name the violated invariant.
    """
    if not isinstance(doc, dict):
        raise ValueError("density-operator document must be a mapping")
    for fieldname in ("dim", "matrix"):
        if fieldname not in doc:
            raise ValueError(f"missing required field {fieldname!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim!r}")
    rows = doc["matrix"]
    if len(rows) != dim or any(len(row) != dim for row in rows):
        raise ValueError(f"length invariant violated: matrix must be {dim}x{dim}")
    mat = np.empty((dim, dim), dtype=np.complex128)
    for r, row in enumerate(rows):
        for c, pair in enumerate(row):
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise ValueError(
                    f"matrix[{r}][{c}]: expected a [re, im] pair, got {pair!r}"
                )
            mat[r, c] = complex(float(pair[0]), float(pair[1]))
    return DensityOperator(mat)


def load_density_operator(path) -> DensityOperator:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"density-operator file is not valid JSON: {exc}") from exc
    return parse_density_operator(doc)


def density_operator_to_doc(rho: DensityOperator) -> dict:
    """Inverse of :func:`parse_density_operator`."""
    return {
        "dim": rho.dim,
        "matrix": [complex_pairs(row) for row in rho.matrix],
    }


# ---------------------------------------------------------------------------
# frame functions and contextual assignments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameFunction:
    """Map from unit states (rank-one projectors) to probabilities.

    The evaluator must depend on the ray only — phase invariance is a
    semantic requirement, sampled by :func:`phase_invariance_residual`.
    """

    dim: int
    evaluate: Callable[[StateVector], float]
    name: str = "frame"

    def __call__(self, psi: StateVector) -> float:
        if psi.dim != self.dim:
            raise ValueError(f"dimension mismatch: function {self.dim} vs state {psi.dim}")
        return float(self.evaluate(psi))


@dataclass(frozen=True)
class ContextualAssignment:
    """Probability for (basis, index) pairs: may depend on the whole basis.

    For every basis the values over its indices must sum to 1 within
    1e-10; unlike a FrameFunction the value at a state may change with
    the basis containing it.
    """

    dim: int
    evaluate: Callable[[OrthonormalBasis, int], float]
    name: str = "assignment"

    def __call__(self, basis: OrthonormalBasis, index: int) -> float:
        if basis.dim != self.dim:
            raise ValueError(f"dimension mismatch: assignment {self.dim} vs basis {basis.dim}")
        if not 0 <= index < basis.dim:
            raise IndexError(f"index {index} out of range for dimension {basis.dim}")
        return float(self.evaluate(basis, index))


def born_frame_function(rho: DensityOperator) -> FrameFunction:
    """f(psi) = <psi|rho|psi> for a verified (PSD, trace-one) rho."""
    report = verify_density_operator(rho, DENSITY_PSD_TOL)
    if not report.passed:
        raise ValueError(
            "density operator fails verification "
            f"(min eigenvalue {report.min_eigenvalue:g}, trace error {report.trace_error:g})"
        )
    mat = rho.matrix

    def evaluate(psi: StateVector) -> float:
        return float(np.real(np.vdot(psi.amplitudes, mat @ psi.amplitudes)))

    return FrameFunction(rho.dim, evaluate, name="born")


def check_basis_normalization(f: FrameFunction, basis: OrthonormalBasis) -> float:
    """|sum_k f(psi_k) - 1| over one orthonormal basis."""
    if f.dim != basis.dim:
        raise ValueError(f"dimension mismatch: function {f.dim} vs basis {basis.dim}")
    total = sum(f(v) for v in basis)
    return abs(total - 1.0)


def phase_invariance_residual(f: FrameFunction, psi: StateVector, theta: float) -> float:
    """|f(e^{i theta} psi) - f(psi)| — zero for any function of the ray."""
    rotated = StateVector(np.exp(1j * float(theta)) * psi.amplitudes)
    return abs(f(rotated) - f(psi))


def assignment_from_frame_function(f: FrameFunction) -> ContextualAssignment:
    """Noncontextual assignment induced by a frame function: a(B, k) = f(B[k])."""
    return ContextualAssignment(
        f.dim, lambda basis, index: f(basis[index]), name=f"{f.name}-induced"
    )


def uniform_support_assignment(
    chi: StateVector, epsilon: float = SUPPORT_EPS
) -> ContextualAssignment:
    """Uniform probability over the basis vectors not orthogonal to chi.

    a(B, k) = 1/|S| when |<psi_k|chi>| > epsilon with S the set of such
    indices, else 0. The support set depends on the basis as a whole, so
    this assignment is contextual (witnessed for dim >= 3).
    """
    amps = chi.amplitudes

    def evaluate(basis: OrthonormalBasis, index: int) -> float:
        overlaps = np.abs(basis.matrix.conj().T @ amps)
        support = overlaps > epsilon
        count = int(np.count_nonzero(support))
        if count == 0:
            raise ValueError("no basis vector above the support threshold")
        return 1.0 / count if support[index] else 0.0

    return ContextualAssignment(chi.dim, evaluate, name="uniform-support")


def flatten_assignment(
    assignment: ContextualAssignment, rng: np.random.Generator | None = None
) -> FrameFunction:
    """Force an assignment into frame-function form by fixing the context.

    Each state is deterministically completed to a basis in which the
    assignment is evaluated at index 0. For a noncontextual assignment
    this is faithful; for a contextual one the result need not satisfy
    basis normalization, which is exactly what the reconstruction fit is
    meant to expose.
    """

    def evaluate(psi: StateVector) -> float:
        basis = complete_basis([psi], rng)
        return assignment(basis, 0)

    return FrameFunction(assignment.dim, evaluate, name=f"{assignment.name}-flattened")


# ---------------------------------------------------------------------------
# density-operator reconstruction
# ---------------------------------------------------------------------------


class FitResult(NamedTuple):
    rho: DensityOperator
    residual: float


def _design_row_block(states: np.ndarray) -> np.ndarray:
    """Design-matrix rows for <psi|rho|psi> in the trace-eliminated basis.

    Unknowns: the first d-1 diagonal entries, then (Re, Im) of each upper
    off-diagonal entry in index order. The last diagonal entry is
    1 - sum(others), so each row's constant part |psi_{d-1}|^2 moves to
    the right-hand side.
    """
    n, dim = states.shape
    mods2 = np.abs(states) ** 2
    columns = [mods2[:, :-1] - mods2[:, -1:]]
    for j, k in combinations(range(dim), 2):
        w = np.conj(states[:, j]) * states[:, k]
        columns.append(np.stack([2.0 * w.real, -2.0 * w.imag], axis=1))
    return np.hstack(columns)


def _assemble_density(solution: np.ndarray, dim: int) -> DensityOperator:
    mat = np.zeros((dim, dim), dtype=np.complex128)
    diag = solution[: dim - 1]
    mat[np.arange(dim - 1), np.arange(dim - 1)] = diag
    mat[dim - 1, dim - 1] = 1.0 - float(np.sum(diag))
    offset = dim - 1
    for j, k in combinations(range(dim), 2):
        re, im = solution[offset], solution[offset + 1]
        mat[j, k] = re + 1j * im
        mat[k, j] = re - 1j * im
        offset += 2
    return DensityOperator(mat)


def fit_density_operator(
    f: FrameFunction,
    dim: int,
    num_probes: int,
    rng: np.random.Generator,
    *,
    extra_probes: Sequence[StateVector] = (),
) -> FitResult:
    """Least-squares inversion of f(psi) = <psi|rho|psi> over Haar probes.

    The Hermitian unknown is parametrized by d^2 - 1 real coordinates with
    the unit trace eliminated by substitution, so the problem is exactly
    linear and solved in one least-squares call. The returned residual is
    the root-mean-square misfit over all probes. PSD is *not* imposed;
    run :func:`verify_density_operator` on the result.

    ``extra_probes`` are appended to the random ones. Haar probes miss
    measure-zero structure (e.g. states orthogonal to some reference), so
    exposing a contextual assignment may need hand-placed probes.

    For dim = 2 a warning is emitted: the representation is guaranteed to
    exist only in dimension greater than 2.
    """
    if dim < 2:
        raise ValueError("fit needs dimension >= 2")
    if dim != f.dim:
        raise ValueError(f"dimension mismatch: requested {dim}, function has {f.dim}")
    if num_probes < dim * dim:
        raise ValueError(
            f"need at least dim^2 = {dim * dim} probes to determine "
            f"{dim * dim - 1} real parameters, got {num_probes}"
        )
    if dim == 2:
        warnings.warn(
            "dimension 2: frame functions are not guaranteed to admit a "
            "density-operator representation; fit is best-effort",
            stacklevel=2,
        )
    unknowns = dim * dim - 1
    fixed = [np.asarray(p.amplitudes, dtype=np.complex128) for p in extra_probes]
    for attempt in range(_FIT_MAX_RETRIES + 1):
        states = haar_state_batch(num_probes, dim, rng)
        if fixed:
            states = np.vstack([states, np.array(fixed)])
        design = _design_row_block(states)
        values = np.array([f(StateVector(row)) for row in states])
        rhs = values - np.abs(states[:, -1]) ** 2
        solution, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
        if rank >= unknowns:
            misfit = design @ solution - rhs
            residual = float(np.sqrt(np.mean(misfit**2)))
            return FitResult(_assemble_density(solution, dim), residual)
    raise RuntimeError(
        f"probe set remained rank-deficient after {_FIT_MAX_RETRIES} resamples"
    )


def structured_probes(chi: StateVector, epsilon: float = SUPPORT_EPS) -> list[StateVector]:
    """Hand-placed probe states that pin a support-counting rule's structure.

    Haar-random probes almost surely have nonzero overlap with every
    reference state, so a flattened support-counting assignment looks
    constant on them. This set adds the reference state itself, every
    computational vector, and (when the support has at least two entries)
    a state inside the support plane orthogonal to the reference — the
    configurations on which such a rule actually varies.
    """
    dim = chi.dim
    probes = [chi] + [StateVector.computational(dim, i) for i in range(dim)]
    support = np.flatnonzero(np.abs(chi.amplitudes) > epsilon)
    if support.size >= 2:
        j, k = int(support[0]), int(support[1])
        perp = np.zeros(dim, dtype=np.complex128)
        perp[j] = np.conj(chi.amplitudes[k])
        perp[k] = -np.conj(chi.amplitudes[j])
        probes.append(StateVector.from_unnormalized(perp))
    return probes


# ---------------------------------------------------------------------------
# contextuality detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContextualityWitness:
    """A state assigned different probabilities in two bases containing it."""

    state: StateVector
    basis_a: OrthonormalBasis
    basis_b: OrthonormalBasis
    index_a: int
    index_b: int
    value_a: float
    value_b: float

    @property
    def gap(self) -> float:
        return abs(self.value_a - self.value_b)

    def to_json_dict(self) -> dict:
        return json_ready({
            "state": complex_pairs(self.state.amplitudes),
            "basis_a": [complex_pairs(v.amplitudes) for v in self.basis_a],
            "basis_b": [complex_pairs(v.amplitudes) for v in self.basis_b],
            "index_a": self.index_a,
            "index_b": self.index_b,
            "value_a": self.value_a,
            "value_b": self.value_b,
            "gap": self.gap,
        })


def _structured_contexts(dim: int):
    """Deterministic (anchor index, second basis) candidates.

    For each computational anchor e_i and each pair (j, k) of the other
    indices, the second basis keeps e_i, rotates (e_j, e_k) into the pair
    (e_j ± e_k)/sqrt(2), and keeps the remaining computational vectors.
    Support-counting assignments change value exactly on such rotations,
    while Haar-random bases almost surely miss the orthogonality they
    need — so the scan runs before any random search.
    """
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(dim):
        others = [j for j in range(dim) if j != i]
        for j, k in combinations(others, 2):
            columns = np.zeros((dim, dim), dtype=np.complex128)
            columns[i, 0] = 1.0
            columns[j, 1] = inv_sqrt2
            columns[k, 1] = inv_sqrt2
            columns[j, 2] = inv_sqrt2
            columns[k, 2] = -inv_sqrt2
            rest = [m for m in others if m not in (j, k)]
            for pos, m in enumerate(rest, start=3):
                columns[m, pos] = 1.0
            yield i, OrthonormalBasis.from_matrix(columns)


def detect_contextuality(
    assignment: ContextualAssignment,
    dim: int,
    trials: int,
    rng: np.random.Generator,
    *,
    witness_tolerance: float = WITNESS_TOL,
) -> ContextualityWitness | None:
    """Search for a state whose probability depends on its measurement context.

    Two stages: a deterministic scan over computational anchors with
    pair-rotated companion bases (these catch support-counting rules,
    whose contextuality lives on measure-zero configurations), then
    ``trials`` random probes, each comparing two independent random
    completions of a Haar state. Returns the first witness whose gap
    exceeds ``witness_tolerance``, else None.

    For dim = 2 a basis containing a given state is unique up to phases,
    so no assignment can be contextual there; a warning is emitted and
    the search is best-effort.
    """
    if dim != assignment.dim:
        raise ValueError(f"dimension mismatch: requested {dim}, assignment has {assignment.dim}")
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if dim < 3:
        warnings.warn(
            "contextuality search at dim < 3 cannot succeed: any state's "
            "completing basis is unique up to phases",
            stacklevel=2,
        )
    computational = OrthonormalBasis.computational(dim)
    for anchor, basis_b in _structured_contexts(dim):
        value_a = assignment(computational, anchor)
        value_b = assignment(basis_b, 0)
        if abs(value_a - value_b) > witness_tolerance:
            return ContextualityWitness(
                state=computational[anchor],
                basis_a=computational,
                basis_b=basis_b,
                index_a=anchor,
                index_b=0,
                value_a=value_a,
                value_b=value_b,
            )
    for _ in range(trials):
        psi = random_state(dim, rng)
        basis_a = complete_basis([psi], rng)
        basis_b = complete_basis([psi], rng)
        value_a = assignment(basis_a, 0)
        value_b = assignment(basis_b, 0)
        if abs(value_a - value_b) > witness_tolerance:
            return ContextualityWitness(
                state=psi,
                basis_a=basis_a,
                basis_b=basis_b,
                index_a=0,
                index_b=0,
                value_a=value_a,
                value_b=value_b,
            )
    return None
