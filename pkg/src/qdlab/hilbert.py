"""Finite-dimensional complex Hilbert-space primitives.

States, Hermitian operators and orthonormal bases are small immutable
wrappers around complex numpy arrays, validated at construction. All
sampling operations take an explicit :class:`numpy.random.Generator` so
that every downstream report is reproducible from a single master seed.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
ORTHONORMAL_TOL = 1e-10
DEGENERACY_TOL = 1e-9
PHASE_TOL = 1e-12


class DegenerateBasisError(ValueError):
    """Raised when input vectors are (numerically) linearly dependent."""


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rescale by a unit phase so the first nonzero component is real-positive.

    This is the convention used for basis vectors and eigenvectors; it makes
    vector-valued results comparable across runs even though states are only
    defined up to a global phase.
    """
    v = np.asarray(vector, dtype=np.complex128)
    for entry in v:
        if abs(entry) > PHASE_TOL:
            return v * (entry.conjugate() / abs(entry))
    return v.copy()


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a nonempty one-dimensional sequence")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(
                f"state norm {norm!r} violates the unit-norm invariant "
                f"(|norm - 1| <= {NORM_TOL:g})"
            )
        object.__setattr__(self, "amplitudes", _frozen_array(amps, np.complex128))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def from_unnormalized(cls, values) -> "StateVector":
        arr = np.asarray(values, dtype=np.complex128)
        norm = np.linalg.norm(arr)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(arr / norm)

    @classmethod
    def computational(cls, dim: int, index: int) -> "StateVector":
        if not 0 <= index < dim:
            raise ValueError(f"index {index} out of range for dimension {dim}")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Complex matrix equal to its own conjugate transpose."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise ValueError("matrix must be square and nonempty")
        deviation = float(np.max(np.abs(mat - mat.conj().T)))
        if deviation > HERMITIAN_TOL:
            raise ValueError(
                f"matrix deviates from its conjugate transpose by {deviation:g} "
                f"(tolerance {HERMITIAN_TOL:g})"
            )
        object.__setattr__(self, "matrix", _frozen_array(mat, np.complex128))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=np.float64)).astype(np.complex128))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Ordered complete set of pairwise-orthonormal state vectors."""

    vectors: tuple[StateVector, ...]

    def __post_init__(self):
        vectors = tuple(self.vectors)
        if not vectors:
            raise ValueError("a basis needs at least one vector")
        dim = vectors[0].dim
        if any(v.dim != dim for v in vectors):
            raise ValueError("all basis vectors must share one dimension")
        if len(vectors) != dim:
            raise ValueError(
                f"basis has {len(vectors)} vectors but lives in dimension {dim}"
            )
        object.__setattr__(self, "vectors", vectors)
        gram = self.matrix.conj().T @ self.matrix
        deviation = float(np.max(np.abs(gram - np.eye(dim))))
        if deviation > ORTHONORMAL_TOL:
            raise ValueError(
                f"basis Gram matrix deviates from the identity by {deviation:g} "
                f"(orthonormality tolerance {ORTHONORMAL_TOL:g})"
            )

    @cached_property
    def matrix(self) -> np.ndarray:
        """Matrix whose k-th column is the k-th basis vector."""
        mat = np.column_stack([v.amplitudes for v in self.vectors])
        mat.setflags(write=False)
        return mat

    @property
    def dim(self) -> int:
        return self.vectors[0].dim

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self) -> Iterator[StateVector]:
        return iter(self.vectors)

    def __getitem__(self, index: int) -> StateVector:
        return self.vectors[index]

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "OrthonormalBasis":
        mat = np.asarray(matrix, dtype=np.complex128)
        return cls(tuple(StateVector(mat[:, k]) for k in range(mat.shape[1])))

    @classmethod
    def computational(cls, dim: int) -> "OrthonormalBasis":
        return cls(tuple(StateVector.computational(dim, k) for k in range(dim)))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Return <a|b>, conjugate-linear in the first argument."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(op: HermitianOperator, psi: StateVector) -> float:
    """Return <psi|op|psi> as a real number.

    The raw quadratic form carries a residual imaginary part from floating
    point; it must stay below 1e-10 and is discarded.
    """
    if op.dim != psi.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim} vs state {psi.dim}")
    raw = complex(np.vdot(psi.amplitudes, op.matrix @ psi.amplitudes))
    if abs(raw.imag) >= 1e-10:
        raise ValueError(
            f"expectation value has imaginary part {raw.imag:g}; operator is not Hermitian enough"
        )
    return raw.real


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-uniform unit vector: i.i.d. standard complex Gaussians, normalized."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    z = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2.0)
    return StateVector.from_unnormalized(z)


def haar_state_batch(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """(n, dim) array of Haar-uniform unit rows; the batched form of random_state."""
    z = (rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))) / np.sqrt(2.0)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _orthonormalize(columns: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt on the columns, with the fixed phase convention."""
    mat = np.array(columns, dtype=np.complex128)
    dim, count = mat.shape
    for k in range(count):
        v = mat[:, k]
        for j in range(k):
            v = v - np.vdot(mat[:, j], v) * mat[:, j]
        residual = np.linalg.norm(v)
        if residual < DEGENERACY_TOL:
            raise DegenerateBasisError(
                f"vector {k} is linearly dependent on its predecessors "
                f"(residual norm {residual:g} < {DEGENERACY_TOL:g})"
            )
        mat[:, k] = fix_phase(v / residual)
    return mat


def gram_schmidt(vectors: Sequence[StateVector]) -> OrthonormalBasis:
    """Orthonormalize a full linearly independent set into a basis.

    The span and the ray of the first vector are preserved; each output
    vector carries the first-nonzero-real-positive phase convention.
    """
    vecs = list(vectors)
    if not vecs:
        raise ValueError("need at least one vector")
    dim = vecs[0].dim
    if len(vecs) != dim:
        raise ValueError(f"need exactly {dim} vectors to span dimension {dim}, got {len(vecs)}")
    columns = np.column_stack([v.amplitudes for v in vecs])
    return OrthonormalBasis.from_matrix(_orthonormalize(columns))


def complete_basis(
    prefix: Sequence[StateVector],
    rng: np.random.Generator | None = None,
) -> OrthonormalBasis:
    """Extend linearly independent vectors to a full orthonormal basis.

    Padding vectors are standard complex Gaussians when an rng is given,
    otherwise computational basis vectors (skipping any that would be
    dependent). The prefix vectors occupy the leading positions.
    """
    prefix = list(prefix)
    if not prefix:
        raise ValueError("need at least one prefix vector")
    dim = prefix[0].dim
    columns = np.column_stack([v.amplitudes for v in prefix])
    if rng is not None:
        extra = (rng.standard_normal((dim, dim - len(prefix)))
                 + 1j * rng.standard_normal((dim, dim - len(prefix))))
        return OrthonormalBasis.from_matrix(
            _orthonormalize(np.hstack([columns, extra]))
        )
    mat = columns
    for k in range(dim):
        if mat.shape[1] == dim:
            break
        candidate = np.hstack([mat, np.eye(dim, dtype=np.complex128)[:, k : k + 1]])
        try:
            _orthonormalize(candidate)
        except DegenerateBasisError:
            continue
        mat = candidate
    if mat.shape[1] != dim:
        raise DegenerateBasisError("could not complete the prefix to a full basis")
    return OrthonormalBasis.from_matrix(_orthonormalize(mat))


def random_basis(dim: int, rng: np.random.Generator) -> OrthonormalBasis:
    """Haar-distributed orthonormal basis with the fixed phase convention.

    QR of a complex Ginibre matrix gives columns Haar-distributed as rays;
    the per-column phase convention picks a deterministic representative.
    """
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    return OrthonormalBasis.from_matrix(haar_basis_batch(1, dim, rng)[0])


def haar_basis_batch(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """(n, dim, dim) stack of Haar basis matrices (columns are the vectors)."""
    z = (rng.standard_normal((n, dim, dim)) + 1j * rng.standard_normal((n, dim, dim))) / np.sqrt(2.0)
    q, _ = np.linalg.qr(z)
    return _fix_phase_columns(q)


def _fix_phase_columns(stack: np.ndarray) -> np.ndarray:
    """Apply the first-nonzero-real-positive convention to every column."""
    q = np.array(stack)
    mods = np.abs(q)
    # index of first component above the phase threshold, per (batch, column)
    significant = mods > PHASE_TOL
    first = np.argmax(significant, axis=1)
    n, dim, _ = q.shape
    b_idx, c_idx = np.meshgrid(np.arange(n), np.arange(dim), indexing="ij")
    pivots = q[b_idx, first, c_idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        phases = np.where(np.abs(pivots) > 0, pivots.conj() / np.abs(pivots), 1.0)
    return q * phases[:, None, :]


def hermitian_eigendecomposition(
    op: HermitianOperator,
) -> tuple[np.ndarray, OrthonormalBasis]:
    """Eigenvalues (ascending) and a phase-fixed orthonormal eigenbasis.

    For degenerate eigenvalues the eigenvectors are not unique; only the
    reconstruction sum_j w_j |v_j><v_j| = op is guaranteed.
    """
    values, vectors = np.linalg.eigh(op.matrix)
    fixed = _fix_phase_columns(vectors[None, :, :])[0]
    values = np.asarray(values, dtype=np.float64)
    values.setflags(write=False)
    return values, OrthonormalBasis.from_matrix(fixed)


def reconstruct_from_eigensystem(
    values: Sequence[float], basis: OrthonormalBasis
) -> HermitianOperator:
    """Assemble sum_j w_j |v_j><v_j| from an eigensystem."""
    mat = basis.matrix
    raw = (mat * np.asarray(values, dtype=np.float64)) @ mat.conj().T
    return HermitianOperator((raw + raw.conj().T) / 2.0)


def derive_rng(master_seed: int, *key: object) -> np.random.Generator:
    """Deterministically derive an independent generator from a master seed.

    String key parts are hashed with crc32 so the derivation is stable
    across processes and platforms; integer parts are used as-is.
    """
    entropy: list[int] = [int(master_seed) & 0xFFFFFFFFFFFFFFFF]
    for part in key:
        if isinstance(part, str):
            entropy.append(zlib.crc32(part.encode("utf-8")))
        elif isinstance(part, (int, np.integer)):
            entropy.append(int(part) & 0xFFFFFFFFFFFFFFFF)
        else:
            raise TypeError(f"rng key parts must be str or int, got {type(part)!r}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def as_state_batch(states: Iterable[StateVector]) -> np.ndarray:
    """Stack StateVectors into an (n, dim) complex array."""
    return np.array([s.amplitudes for s in states], dtype=np.complex128)
