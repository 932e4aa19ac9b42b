"""Classical decision-theory counterpart of the quantum value rules.

Expected utility and its generalization, the certainty equivalent under a
strictly increasing transform F, operate on explicit probability lists.
The insufficient-reason solver recovers the unique probability pair that
makes a two-outcome lottery indifferent to its utility-swapped twin:
p1 = p2 = 1/2, independent of F and of the probe utilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .games import MonotoneTransform, identity_transform
from .hilbert import _frozen_array

SIMPLEX_TOL = 1e-10


class UnderdeterminedError(ValueError):
    """Raised when every probe pair is degenerate (F(x1) = F(x2) for all)."""


@dataclass(frozen=True, eq=False)
class ClassicalGame:
    """Probability list over outcomes plus one utility per outcome."""

    probabilities: np.ndarray
    utilities: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        utils = np.asarray(self.utilities, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probabilities must be a nonempty one-dimensional sequence")
        if probs.shape != utils.shape:
            raise ValueError(
                f"probabilities {probs.shape} and utilities {utils.shape} must have equal length"
            )
        if np.any(probs < -SIMPLEX_TOL) or np.any(probs > 1.0 + SIMPLEX_TOL):
            raise ValueError("probabilities must lie in [0, 1]")
        total = float(probs.sum())
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(
                f"probabilities sum to {total!r}, violating the simplex invariant "
                f"(tolerance {SIMPLEX_TOL:g})"
            )
        object.__setattr__(self, "probabilities", _frozen_array(probs, np.float64))
        object.__setattr__(self, "utilities", _frozen_array(utils, np.float64))

    @property
    def size(self) -> int:
        return self.probabilities.shape[0]


def expected_utility(game: ClassicalGame) -> float:
    """sum_j p_j x_j."""
    return float(np.dot(game.probabilities, game.utilities))


def certainty_equivalent(game: ClassicalGame, transform: MonotoneTransform) -> float:
    """F^-1(sum_j p_j F(x_j)); reduces to expected utility for F = identity.

    The result is a quasi-arithmetic mean: it always lies between the
    smallest and largest utility with positive probability.
    """
    transform.check_domain(game.utilities)
    inner = float(np.dot(game.probabilities, transform.forward(game.utilities)))
    return float(transform.inverse(inner))


class InsufficientReasonSolution(NamedTuple):
    p1: float
    p2: float
    residual: float


def solve_insufficient_reason(
    transform: MonotoneTransform,
    probe_pairs: Sequence[tuple[float, float]],
) -> InsufficientReasonSolution:
    """Solve for (p1, p2) forcing swap indifference on every probe pair.

    Constraints: p1 + p2 = 1, and for each pair (x1, x2) the lottery must
    keep its certainty equivalent when the two utilities are exchanged,
    i.e. p1 F(x2) + p2 F(x1) = p1 F(x1) + p2 F(x2), which reduces to
    (p1 - p2)(F(x2) - F(x1)) = 0. The least-squares system detects an
    all-degenerate probe set by rank instead of dividing by a difference.

    Returns (p1, p2) and the 2-norm of the residual constraint violations;
    any probe set with one non-degenerate pair yields exactly (1/2, 1/2).
    """
    pairs = [(float(a), float(b)) for a, b in probe_pairs]
    if not pairs:
        raise UnderdeterminedError("need at least one probe pair")
    for x1, x2 in pairs:
        transform.check_domain(np.asarray([x1, x2]))
    rows = [[1.0, 1.0]]
    rhs = [1.0]
    for x1, x2 in pairs:
        delta = float(transform.forward(np.asarray([x2]))[0]
                      - transform.forward(np.asarray([x1]))[0])
        # normalize large rows so steep transforms do not dominate the
        # conditioning; the zero right-hand side makes this solution-neutral
        delta /= max(abs(delta), 1.0)
        rows.append([delta, -delta])
        rhs.append(0.0)
    matrix = np.asarray(rows)
    target = np.asarray(rhs)
    solution, _, rank, _ = np.linalg.lstsq(matrix, target, rcond=None)
    if rank < 2:
        raise UnderdeterminedError(
            "every probe pair is degenerate (F(x1) = F(x2)); the swap-indifference "
            "constraints cannot pin the probabilities"
        )
    residual = float(np.linalg.norm(matrix @ solution - target))
    return InsufficientReasonSolution(float(solution[0]), float(solution[1]), residual)


def insufficient_reason_uniform(n: int) -> np.ndarray:
    """Uniform probabilities over n outcomes.

    The n-outcome counterpart of the two-outcome solver, stated directly
    by symmetry rather than derived from swap constraints.
    """
    if n < 1:
        raise ValueError("need at least one outcome")
    return np.full(n, 1.0 / n)


def consistency_bridge(
    quantum_value: float,
    transform: MonotoneTransform,
    probs: tuple[float, float],
    x: tuple[float, float],
) -> float:
    """Gap between a quantum rule's value and a classical F-mean representation.

    Returns |quantum_value - F^-1(p1 F(x1) + p2 F(x2))|. A rule that is
    swap-indifferent on the equal superposition admits only the (1/2, 1/2)
    representation; rules that are not (e.g. the first-outcome rule, which
    is the (1, 0) representation) are exposed by a nonzero residual there.
    """
    game = ClassicalGame(np.asarray(probs, dtype=np.float64), np.asarray(x, dtype=np.float64))
    return abs(float(quantum_value) - certainty_equivalent(game, transform))


__all__ = [
    "SIMPLEX_TOL",
    "ClassicalGame",
    "InsufficientReasonSolution",
    "UnderdeterminedError",
    "certainty_equivalent",
    "consistency_bridge",
    "expected_utility",
    "identity_transform",
    "insufficient_reason_uniform",
    "solve_insufficient_reason",
]
