"""Quantum games and the value rules that price them.

A game is a state together with a Hermitian utility operator, stored in
the operator's eigenbasis: an ordered list of (utility, eigenvector)
pairs plus the state's amplitudes in that basis. Storing games this way
makes the utility-side transformations (shift, negate, swap) exact.

Four concrete value rules are provided:

* ``born``          - |amplitude|^2-weighted mean of the utilities
* ``uniform``       - plain mean over the outcomes with nonzero amplitude
* ``deterministic`` - the utility of the lowest-index supported outcome
* ``fmean``         - F^-1(sum p_j F(x_j)) for a strictly increasing F
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .hilbert import (
    HermitianOperator,
    OrthonormalBasis,
    StateVector,
    _frozen_array,
)

#: amplitudes with modulus at or below this threshold count as zero for the
#: support-based rules; surfaced in reports because those rules are
#: discontinuous in the state
SUPPORT_EPS = 1e-9

AMPLITUDE_NORM_TOL = 1e-10
PROBABILITY_TOL = 1e-10


class GameValidationError(ValueError):
    """Raised when a game (or game file) violates one of its invariants."""


class EmptySupportError(ValueError):
    """Raised when no amplitude exceeds the support threshold.

    Cannot happen for a normalized game with threshold below 1/sqrt(dim),
    but the rules guard for it anyway.
    """


@dataclass(frozen=True, eq=False)
class QuantumGame:
    """State plus utility operator, expressed in the operator's eigenbasis."""

    eigenbasis: OrthonormalBasis
    utilities: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        utils = np.asarray(self.utilities, dtype=np.float64)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        dim = self.eigenbasis.dim
        if utils.shape != (dim,) or amps.shape != (dim,):
            raise GameValidationError(
                f"utilities {utils.shape} and amplitudes {amps.shape} must both "
                f"have length dim={dim}"
            )
        total = float(np.sum(np.abs(amps) ** 2))
        if abs(total - 1.0) > AMPLITUDE_NORM_TOL:
            raise GameValidationError(
                f"sum of |amplitude|^2 is {total!r}, violating the unit-norm "
                f"invariant (tolerance {AMPLITUDE_NORM_TOL:g})"
            )
        object.__setattr__(self, "utilities", _frozen_array(utils, np.float64))
        object.__setattr__(self, "amplitudes", _frozen_array(amps, np.complex128))

    @property
    def dim(self) -> int:
        return self.eigenbasis.dim


def make_game(
    state: StateVector, pairs: Sequence[tuple[float, StateVector]]
) -> QuantumGame:
    """Build a game from a state and ordered (utility, eigenvector) pairs.

    The amplitudes are the components of the state in the eigenbasis,
    lambda_j = <phi_j|state>.
    """
    if not pairs:
        raise GameValidationError("need at least one (utility, eigenvector) pair")
    utilities = [float(u) for u, _ in pairs]
    try:
        basis = OrthonormalBasis(tuple(v for _, v in pairs))
    except ValueError as exc:
        raise GameValidationError(f"eigenvectors do not form an orthonormal basis: {exc}") from exc
    if state.dim != basis.dim:
        raise GameValidationError(
            f"state dimension {state.dim} does not match eigenbasis dimension {basis.dim}"
        )
    amplitudes = basis.matrix.conj().T @ state.amplitudes
    return QuantumGame(basis, np.asarray(utilities), amplitudes)


def computational_game(
    amplitudes: Sequence[complex], utilities: Sequence[float]
) -> QuantumGame:
    """Game whose utility operator is diagonal in the computational basis."""
    amps = np.asarray(amplitudes, dtype=np.complex128)
    return QuantumGame(
        OrthonormalBasis.computational(amps.shape[0]),
        np.asarray(utilities, dtype=np.float64),
        amps,
    )


def game_state(game: QuantumGame) -> StateVector:
    """The game's state as a vector, sum_j lambda_j |phi_j>."""
    return StateVector(game.eigenbasis.matrix @ game.amplitudes)


def utility_operator(game: QuantumGame) -> HermitianOperator:
    """The utility operator sum_j x_j |phi_j><phi_j|, assembled on demand."""
    mat = game.eigenbasis.matrix
    raw = (mat * game.utilities) @ mat.conj().T
    # the product is Hermitian up to rounding; symmetrize so it is exactly so
    return HermitianOperator((raw + raw.conj().T) / 2.0)


def displace(game: QuantumGame, k: float) -> QuantumGame:
    """Shift every utility by k; state and eigenbasis unchanged."""
    return QuantumGame(game.eigenbasis, game.utilities + float(k), game.amplitudes)


def negate(game: QuantumGame) -> QuantumGame:
    """Negate every utility; state and eigenbasis unchanged."""
    return QuantumGame(game.eigenbasis, -game.utilities, game.amplitudes)


def swap_utilities(game: QuantumGame, i: int, j: int) -> QuantumGame:
    """Exchange the utilities at outcomes i and j; everything else unchanged."""
    dim = game.dim
    if not (0 <= i < dim and 0 <= j < dim):
        raise IndexError(f"swap indices ({i}, {j}) out of range for dimension {dim}")
    utils = np.array(game.utilities)
    utils[[i, j]] = utils[[j, i]]
    return QuantumGame(game.eigenbasis, utils, game.amplitudes)


# ---------------------------------------------------------------------------
# value rules
# ---------------------------------------------------------------------------


def born_probabilities(game: QuantumGame) -> np.ndarray:
    """Outcome probabilities |lambda_j|^2."""
    return np.abs(game.amplitudes) ** 2


def support_indices(game: QuantumGame, epsilon: float = SUPPORT_EPS) -> np.ndarray:
    """Indices with |lambda_j| > epsilon."""
    return np.flatnonzero(np.abs(game.amplitudes) > epsilon)


def uniform_support_probabilities(
    game: QuantumGame, epsilon: float = SUPPORT_EPS
) -> np.ndarray:
    """Probability 1/(support size) on each supported outcome, 0 elsewhere."""
    support = support_indices(game, epsilon)
    if support.size == 0:
        raise EmptySupportError("no amplitude above the support threshold")
    probs = np.zeros(game.dim)
    probs[support] = 1.0 / support.size
    return probs


def born_value(game: QuantumGame) -> float:
    """sum_j |lambda_j|^2 x_j."""
    return float(np.dot(born_probabilities(game), game.utilities))


def uniform_support_value(game: QuantumGame, epsilon: float = SUPPORT_EPS) -> float:
    """Arithmetic mean of the utilities over the supported outcomes."""
    support = support_indices(game, epsilon)
    if support.size == 0:
        raise EmptySupportError("no amplitude above the support threshold")
    return float(np.mean(game.utilities[support]))


def deterministic_value(game: QuantumGame, epsilon: float = SUPPORT_EPS) -> float:
    """Utility of the lowest-index supported outcome.

    The rule models "outcome one always occurs": when the first eigenstate
    has nonzero amplitude the value is x_1 exactly; with zero first
    amplitude the convention restricts to the support (a choice, surfaced
    in reports).
    """
    support = support_indices(game, epsilon)
    if support.size == 0:
        raise EmptySupportError("no amplitude above the support threshold")
    return float(game.utilities[support[0]])


# ---------------------------------------------------------------------------
# monotone transforms and the F-mean
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Closed interval of validity (infinite endpoints allowed)."""

    lo: float = -math.inf
    hi: float = math.inf

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo:g}, {self.hi:g}]"


@dataclass(frozen=True)
class MonotoneTransform:
    """Strictly increasing map with an exact inverse on its domain."""

    name: str
    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    domain: Interval = field(default_factory=Interval)
    #: (kernel transform id, parameter) when a compiled batch kernel exists
    kernel_spec: tuple[int, float] | None = None

    def check_domain(self, utilities: np.ndarray) -> None:
        lo = float(np.min(utilities))
        hi = float(np.max(utilities))
        if not (self.domain.contains(lo) and self.domain.contains(hi)):
            raise ValueError(
                f"utilities in [{lo:g}, {hi:g}] fall outside the domain "
                f"{self.domain} of transform {self.name!r}"
            )


def identity_transform() -> MonotoneTransform:
    return MonotoneTransform(
        name="identity",
        forward=lambda x: np.asarray(x, dtype=np.float64),
        inverse=lambda y: np.asarray(y, dtype=np.float64),
        kernel_spec=(_kernels.TRANSFORM_IDENTITY, 0.0),
    )


def exponential_transform(rate: float = 1.0) -> MonotoneTransform:
    """x -> sign(rate) * exp(rate * x).

    The sign factor keeps the map strictly increasing for negative rates;
    the induced quasi-arithmetic mean is unchanged by it.
    """
    rate = float(rate)
    if rate == 0.0:
        raise ValueError("exponential transform needs a nonzero rate")
    sign = 1.0 if rate > 0 else -1.0
    return MonotoneTransform(
        name=f"exponential(rate={rate:g})",
        forward=lambda x: sign * np.exp(rate * np.asarray(x, dtype=np.float64)),
        inverse=lambda y: np.log(sign * np.asarray(y, dtype=np.float64)) / rate,
        kernel_spec=(_kernels.TRANSFORM_EXPONENTIAL, rate),
    )


def power_transform(exponent: float = 2.0) -> MonotoneTransform:
    """x -> x**exponent on the positive half line."""
    exponent = float(exponent)
    if exponent <= 0.0:
        raise ValueError("power transform needs a positive exponent")
    return MonotoneTransform(
        name=f"power(exponent={exponent:g})",
        forward=lambda x: np.power(np.asarray(x, dtype=np.float64), exponent),
        inverse=lambda y: np.power(np.asarray(y, dtype=np.float64), 1.0 / exponent),
        domain=Interval(lo=0.0),
        kernel_spec=(_kernels.TRANSFORM_POWER, exponent),
    )


BUILTIN_TRANSFORMS: dict[str, Callable[..., MonotoneTransform]] = {
    "identity": identity_transform,
    "exponential": exponential_transform,
    "power": power_transform,
}


def resolve_transform(spec: str) -> MonotoneTransform:
    """Parse 'identity', 'exponential:0.5' or 'power:2' into a transform."""
    name, _, arg = spec.partition(":")
    if name not in BUILTIN_TRANSFORMS:
        raise ValueError(
            f"unknown transform {name!r}; choose from {sorted(BUILTIN_TRANSFORMS)}"
        )
    factory = BUILTIN_TRANSFORMS[name]
    if not arg:
        return factory()
    if name == "identity":
        raise ValueError("identity transform takes no parameter")
    return factory(float(arg))


def fmean_value(
    game: QuantumGame, probs: Sequence[float], transform: MonotoneTransform
) -> float:
    """Certainty equivalent F^-1(sum_j p_j F(x_j)) for explicit probabilities."""
    p = np.asarray(probs, dtype=np.float64)
    if p.shape != (game.dim,):
        raise ValueError(f"need {game.dim} probabilities, got shape {p.shape}")
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > PROBABILITY_TOL:
        raise ValueError(
            f"probabilities must be nonnegative and sum to 1 within {PROBABILITY_TOL:g}"
        )
    transform.check_domain(game.utilities)
    return float(transform.inverse(np.dot(p, transform.forward(game.utilities))))


# ---------------------------------------------------------------------------
# value functionals
# ---------------------------------------------------------------------------


class ValueFunctional:
    """Deterministic map from games to real values.

    Subclasses implement :meth:`evaluate`; those whose rule vectorizes also
    implement :meth:`batch_values` over arrays of amplitudes and utilities,
    which routes through the selected kernel backend.
    """

    name: str = "abstract"

    def evaluate(self, game: QuantumGame) -> float:
        raise NotImplementedError

    def __call__(self, game: QuantumGame) -> float:
        return self.evaluate(game)

    def supports_batch(self) -> bool:
        return type(self).batch_values is not ValueFunctional.batch_values

    def batch_values(self, amplitudes: np.ndarray, utilities: np.ndarray) -> np.ndarray:
        """Evaluate rows of (amplitudes, utilities) games; override if vectorizable."""
        raise NotImplementedError

    def describe(self) -> dict:
        return {"name": self.name}


class BornValue(ValueFunctional):
    name = "born"

    def evaluate(self, game: QuantumGame) -> float:
        return born_value(game)

    def batch_values(self, amplitudes, utilities):
        probs = np.ascontiguousarray(np.abs(amplitudes) ** 2)
        return _kernels.born_values(probs, np.ascontiguousarray(utilities))


class UniformSupportValue(ValueFunctional):
    name = "uniform"

    def __init__(self, epsilon: float = SUPPORT_EPS):
        self.epsilon = float(epsilon)

    def evaluate(self, game: QuantumGame) -> float:
        return uniform_support_value(game, self.epsilon)

    def batch_values(self, amplitudes, utilities):
        mods = np.ascontiguousarray(np.abs(amplitudes))
        return _kernels.uniform_support_values(
            mods, np.ascontiguousarray(utilities), self.epsilon
        )

    def describe(self) -> dict:
        return {"name": self.name, "support_threshold": self.epsilon}


class DeterministicValue(ValueFunctional):
    name = "deterministic"

    def __init__(self, epsilon: float = SUPPORT_EPS):
        self.epsilon = float(epsilon)

    def evaluate(self, game: QuantumGame) -> float:
        return deterministic_value(game, self.epsilon)

    def batch_values(self, amplitudes, utilities):
        mods = np.ascontiguousarray(np.abs(amplitudes))
        return _kernels.deterministic_values(
            mods, np.ascontiguousarray(utilities), self.epsilon
        )

    def describe(self) -> dict:
        return {"name": self.name, "support_threshold": self.epsilon}


class FMeanValue(ValueFunctional):
    """Certainty equivalent of a probability map under a monotone transform."""

    def __init__(
        self,
        transform: MonotoneTransform | None = None,
        probability_map: str = "born",
        epsilon: float = SUPPORT_EPS,
    ):
        if probability_map not in ("born", "uniform"):
            raise ValueError("probability_map must be 'born' or 'uniform'")
        self.transform = transform if transform is not None else identity_transform()
        self.probability_map = probability_map
        self.epsilon = float(epsilon)
        self.name = f"fmean-{probability_map}-{self.transform.name}"

    def _probs(self, game: QuantumGame) -> np.ndarray:
        if self.probability_map == "born":
            return born_probabilities(game)
        return uniform_support_probabilities(game, self.epsilon)

    def evaluate(self, game: QuantumGame) -> float:
        return fmean_value(game, self._probs(game), self.transform)

    def batch_values(self, amplitudes, utilities):
        utilities = np.ascontiguousarray(utilities)
        self.transform.check_domain(utilities)
        if self.probability_map == "born":
            probs = np.ascontiguousarray(np.abs(amplitudes) ** 2)
        else:
            mask = np.abs(amplitudes) > self.epsilon
            counts = mask.sum(axis=1)
            if np.any(counts == 0):
                raise EmptySupportError("no amplitude above the support threshold")
            probs = np.ascontiguousarray(mask / counts[:, None])
        if self.transform.kernel_spec is not None:
            tid, param = self.transform.kernel_spec
            return _kernels.fmean_values(probs, utilities, tid, param)
        inner = np.einsum("ij,ij->i", probs, self.transform.forward(utilities))
        return np.asarray(self.transform.inverse(inner), dtype=np.float64)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "transform": self.transform.name,
            "probability_map": self.probability_map,
        }


class ConstantValue(ValueFunctional):
    """Assigns the same value to every game; useful as a broken-rule probe."""

    def __init__(self, value: float = 0.0):
        self.value = float(value)
        self.name = f"constant({self.value:g})"

    def evaluate(self, game: QuantumGame) -> float:
        return self.value

    def batch_values(self, amplitudes, utilities):
        return np.full(amplitudes.shape[0], self.value)


def resolve_functional(
    spec: str,
    transform: str | None = None,
    probability_map: str = "born",
    epsilon: float = SUPPORT_EPS,
) -> ValueFunctional:
    """Resolve a functional identifier (CLI surface) to an instance.

    Identifiers: ``born``, ``uniform``, ``deterministic``, ``fmean`` (the
    latter parametrized by ``transform`` and ``probability_map``).
    """
    if spec == "born":
        return BornValue()
    if spec == "uniform":
        return UniformSupportValue(epsilon)
    if spec == "deterministic":
        return DeterministicValue(epsilon)
    if spec == "fmean":
        tf = resolve_transform(transform) if transform else identity_transform()
        return FMeanValue(tf, probability_map=probability_map, epsilon=epsilon)
    raise ValueError(
        f"unknown functional {spec!r}; choose from ['born', 'uniform', 'deterministic', 'fmean']"
    )


FUNCTIONAL_NAMES = ("born", "uniform", "deterministic", "fmean")


# ---------------------------------------------------------------------------
# game files
# ---------------------------------------------------------------------------


def _complex_from_pair(pair, *, context: str) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise GameValidationError(f"{context}: expected a [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def parse_game(doc: dict) -> QuantumGame:
    """Build a game from its file representation.

    Expected fields: ``dim``, ``amplitudes`` (list of [re, im] pairs),
    ``utilities`` (list of reals) and optional ``eigenvectors`` (list of
    vectors of [re, im] pairs; default is the computational basis).
    Validation errors name the violated invariant.
    """
    if not isinstance(doc, dict):
        raise GameValidationError("game document must be a mapping")
    for fieldname in ("dim", "amplitudes", "utilities"):
        if fieldname not in doc:
            raise GameValidationError(f"missing required field {fieldname!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise GameValidationError(f"dim must be a positive integer, got {dim!r}")
    amps = [ _complex_from_pair(p, context="amplitudes") for p in doc["amplitudes"] ]
    utils = [float(u) for u in doc["utilities"]]
    if len(amps) != dim:
        raise GameValidationError(
            f"length invariant violated: {len(amps)} amplitudes for dim={dim}"
        )
    if len(utils) != dim:
        raise GameValidationError(
            f"length invariant violated: {len(utils)} utilities for dim={dim}"
        )
    if "eigenvectors" in doc and doc["eigenvectors"] is not None:
        rows = doc["eigenvectors"]
        if len(rows) != dim:
            raise GameValidationError(
                f"length invariant violated: {len(rows)} eigenvectors for dim={dim}"
            )
        vectors = []
        for r, row in enumerate(rows):
            entries = [
                _complex_from_pair(p, context=f"eigenvectors[{r}]") for p in row
            ]
            if len(entries) != dim:
                raise GameValidationError(
                    f"length invariant violated: eigenvectors[{r}] has {len(entries)} entries"
                )
            try:
                vectors.append(StateVector(np.asarray(entries)))
            except ValueError as exc:
                raise GameValidationError(f"eigenvectors[{r}]: {exc}") from exc
        try:
            basis = OrthonormalBasis(tuple(vectors))
        except ValueError as exc:
            raise GameValidationError(f"orthonormality invariant violated: {exc}") from exc
    else:
        basis = OrthonormalBasis.computational(dim)
    return QuantumGame(basis, np.asarray(utils), np.asarray(amps))


def load_game(path) -> QuantumGame:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameValidationError(f"game file is not valid JSON: {exc}") from exc
    return parse_game(doc)


def game_to_doc(game: QuantumGame) -> dict:
    """Inverse of :func:`parse_game` (eigenvectors included only if nontrivial)."""
    doc = {
        "dim": game.dim,
        "amplitudes": [[z.real, z.imag] for z in game.amplitudes],
        "utilities": [float(x) for x in game.utilities],
    }
    eye = np.eye(game.dim)
    if not np.allclose(game.eigenbasis.matrix, eye):
        doc["eigenvectors"] = [
            [[z.real, z.imag] for z in v.amplitudes] for v in game.eigenbasis
        ]
    return doc
