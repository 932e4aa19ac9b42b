"""Executable checkers for the algebraic axioms a value rule may satisfy.

Each axiom is an identity between the values of related games. Checkers
return the absolute residual between the two sides; the suite runner
aggregates residuals over seeded random games into a serializable report
(JSON / markdown / CSV), recording for each axiom the worst probe seen.

The six axioms, over a game g with utilities (x1, x2) at the designated
outcome pair:

========================  ====================================================
id                        identity checked
========================  ====================================================
``displacement``          V(shift(g, k)) = V(g) + k
``zero_sum``              V(negate(g)) = -V(g)
``sum_relation``          V(swap(g)) + V(g) = x1 + x2
``equal_swap``            V(swap(g)) = V(g) on the equal superposition
``general_swap``          V(swap(g)) = V(g) for arbitrary amplitudes
``pivotal``               V(g) = (x1 + x2)/2 on the equal superposition
========================  ====================================================

``swap`` exchanges the two designated utilities; the equal superposition
carries amplitude 1/sqrt(2) on each designated outcome (up to a relative
phase) and zero elsewhere.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .games import (
    QuantumGame,
    ValueFunctional,
    BornValue,
    UniformSupportValue,
    DeterministicValue,
    FMeanValue,
    displace,
    negate,
    swap_utilities,
)
from .hilbert import OrthonormalBasis, derive_rng
from .reporting import json_ready as _json_ready, render_float as _render_float

DEFAULT_TOLERANCE = 1e-9
DEFAULT_DIMS = (2, 3)
UTILITY_RANGE = (-10.0, 10.0)

AXIOM_IDS = (
    "displacement",
    "zero_sum",
    "sum_relation",
    "equal_swap",
    "general_swap",
    "pivotal",
)

STATEMENTS = {
    "displacement": "V(shift(g, k)) = V(g) + k",
    "zero_sum": "V(negate(g)) = -V(g)",
    "sum_relation": "V(swap(g)) + V(g) = x1 + x2",
    "equal_swap": "V(swap(g)) = V(g) on the equal superposition",
    "general_swap": "V(swap(g)) = V(g) for arbitrary amplitudes",
    "pivotal": "V(g) = (x1 + x2)/2 on the equal superposition",
}

#: which axioms each built-in rule is documented to satisfy; the CLI uses
#: this as a regression registry (exit nonzero when a documented pass fails)
EXPECTED_AXIOMS: dict[str, dict[str, bool]] = {
    "born": {
        "displacement": True,
        "zero_sum": True,
        "sum_relation": True,
        "equal_swap": True,
        "general_swap": False,
        "pivotal": True,
    },
    "uniform": {axiom: True for axiom in AXIOM_IDS},
    "deterministic": {
        "displacement": True,
        "zero_sum": True,
        "sum_relation": True,
        "equal_swap": False,
        "general_swap": False,
        "pivotal": False,
    },
}


def expected_axioms(functional: ValueFunctional) -> dict[str, bool] | None:
    """Documented pass/fail expectations for a functional, if any.

    ``fmean`` with the identity transform coincides with the rule that
    supplies its probabilities, so it inherits that rule's expectations.
    Other transforms carry no pinned expectations (None).
    """
    if isinstance(functional, BornValue):
        return dict(EXPECTED_AXIOMS["born"])
    if isinstance(functional, UniformSupportValue):
        return dict(EXPECTED_AXIOMS["uniform"])
    if isinstance(functional, DeterministicValue):
        return dict(EXPECTED_AXIOMS["deterministic"])
    if isinstance(functional, FMeanValue) and functional.transform.name == "identity":
        return dict(EXPECTED_AXIOMS[functional.probability_map])
    return None


# ---------------------------------------------------------------------------
# single-probe checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomResidual:
    """Outcome of one axiom check on one probe game."""

    axiom: str
    residual: float
    game: QuantumGame
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.residual >= 0.0:
            raise ValueError(f"residual must be nonnegative, got {self.residual!r}")


def check_displacement(
    functional: ValueFunctional, game: QuantumGame, k: float
) -> AxiomResidual:
    """|V(shift(g, k)) - k - V(g)|."""
    residual = abs(functional(displace(game, k)) - float(k) - functional(game))
    return AxiomResidual("displacement", residual, game, {"k": float(k)})


def check_zero_sum(functional: ValueFunctional, game: QuantumGame) -> AxiomResidual:
    """|V(negate(g)) + V(g)|."""
    residual = abs(functional(negate(game)) + functional(game))
    return AxiomResidual("zero_sum", residual, game)


def check_sum_relation(
    functional: ValueFunctional, game: QuantumGame, pair: tuple[int, int] = (0, 1)
) -> AxiomResidual:
    """|V(swap(g)) + V(g) - (x_i + x_j)| at the designated outcome pair."""
    i, j = pair
    if game.dim < 2:
        raise ValueError("sum-relation check needs at least two outcomes")
    swapped = swap_utilities(game, i, j)
    target = float(game.utilities[i] + game.utilities[j])
    residual = abs(functional(swapped) + functional(game) - target)
    return AxiomResidual("sum_relation", residual, game, {"pair": (i, j)})


def _equal_superposition_game(
    x1: float, x2: float, basis: OrthonormalBasis, phase: float
) -> QuantumGame:
    dim = basis.dim
    if dim < 2:
        raise ValueError("need a basis with at least two vectors")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[0] = 1.0 / math.sqrt(2.0)
    amps[1] = np.exp(1j * phase) / math.sqrt(2.0)
    utils = np.zeros(dim)
    utils[0] = x1
    utils[1] = x2
    return QuantumGame(basis, utils, amps)


def check_equal_swap(
    functional: ValueFunctional,
    x1: float,
    x2: float,
    basis: OrthonormalBasis,
    phase: float = 0.0,
) -> AxiomResidual:
    """Swap invariance on the equal superposition of the first two outcomes.

    Builds the game with amplitudes (1, e^{i*phase})/sqrt(2) on outcomes
    (0, 1) and utilities (x1, x2); the residual is the absolute difference
    from the utility-swapped game's value.
    """
    game = _equal_superposition_game(float(x1), float(x2), basis, float(phase))
    residual = abs(functional(swap_utilities(game, 0, 1)) - functional(game))
    return AxiomResidual(
        "equal_swap", residual, game,
        {"x1": float(x1), "x2": float(x2), "phase": float(phase)},
    )


def check_general_swap(
    functional: ValueFunctional, game: QuantumGame, pair: tuple[int, int] = (0, 1)
) -> AxiomResidual:
    """|V(swap(g)) - V(g)| at the designated pair, arbitrary amplitudes."""
    i, j = pair
    if game.dim < 2:
        raise ValueError("swap check needs at least two outcomes")
    residual = abs(functional(swap_utilities(game, i, j)) - functional(game))
    return AxiomResidual("general_swap", residual, game, {"pair": (i, j)})


def check_pivotal(
    functional: ValueFunctional,
    x1: float,
    x2: float,
    basis: OrthonormalBasis,
    phase: float = 0.0,
) -> AxiomResidual:
    """|V(g) - (x1 + x2)/2| on the equal superposition of outcomes (0, 1)."""
    game = _equal_superposition_game(float(x1), float(x2), basis, float(phase))
    residual = abs(functional(game) - (float(x1) + float(x2)) / 2.0)
    return AxiomResidual(
        "pivotal", residual, game,
        {"x1": float(x1), "x2": float(x2), "phase": float(phase)},
    )


# ---------------------------------------------------------------------------
# suite runner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomStats:
    """Aggregated residual statistics for one axiom."""

    axiom_id: str
    statement: str
    trials: int
    max_residual: float
    pass_fraction: float
    worst_case: dict | None

    def __post_init__(self):
        if not 0.0 <= self.pass_fraction <= 1.0:
            raise ValueError("pass fraction must lie in [0, 1]")

    def passed(self, tolerance: float) -> bool:
        return self.max_residual <= tolerance


@dataclass(frozen=True)
class AxiomReport:
    """Suite result for one functional: per-axiom statistics plus config echo."""

    functional: str
    functional_info: dict
    seed: int
    tolerance: float
    trials_per_dim: int
    dims: tuple[int, ...]
    backend: str
    axioms: tuple[AxiomStats, ...]

    def stats(self, axiom_id: str) -> AxiomStats:
        for stats in self.axioms:
            if stats.axiom_id == axiom_id:
                return stats
        raise KeyError(axiom_id)

    def to_json_dict(self) -> dict:
        return _json_ready({
            "functional": self.functional,
            "functional_info": self.functional_info,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "trials_per_dim": self.trials_per_dim,
            "dims": list(self.dims),
            "backend": self.backend,
            "axioms": [
                {
                    "id": s.axiom_id,
                    "statement": s.statement,
                    "trials": s.trials,
                    "max_residual": s.max_residual,
                    "pass_fraction": s.pass_fraction,
                    "passed": s.passed(self.tolerance),
                    "worst_case": s.worst_case,
                }
                for s in self.axioms
            ],
        })

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    def to_markdown(self) -> str:
        lines = [
            f"# Axiom suite: {self.functional}",
            "",
            f"- seed: {self.seed}",
            f"- tolerance: {_render_float(self.tolerance):g}",
            f"- trials per dim: {self.trials_per_dim}",
            f"- dims: {', '.join(str(d) for d in self.dims)}",
            f"- backend: {self.backend}",
            "",
            "| axiom | statement | trials | max residual | pass fraction | status |",
            "| --- | --- | --- | --- | --- | --- |",
        ]
        for s in self.axioms:
            status = "pass" if s.passed(self.tolerance) else "FAIL"
            lines.append(
                f"| {s.axiom_id} | {s.statement} | {s.trials} "
                f"| {s.max_residual:.12g} | {s.pass_fraction:.12g} | {status} |"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([
            "functional", "seed", "tolerance", "axiom", "statement",
            "trials", "max_residual", "pass_fraction", "passed",
        ])
        for s in self.axioms:
            writer.writerow([
                self.functional, self.seed, f"{self.tolerance:.12g}",
                s.axiom_id, s.statement, s.trials,
                f"{s.max_residual:.12g}", f"{s.pass_fraction:.12g}",
                str(s.passed(self.tolerance)).lower(),
            ])
        return buf.getvalue()


def _eval_rows(
    functional: ValueFunctional,
    amplitudes: np.ndarray,
    utilities: np.ndarray,
    basis: OrthonormalBasis,
) -> np.ndarray:
    """Values of row-wise games; batch kernel when available, else a loop."""
    if functional.supports_batch():
        return np.asarray(functional.batch_values(amplitudes, utilities), dtype=np.float64)
    out = np.empty(amplitudes.shape[0])
    for row in range(amplitudes.shape[0]):
        game = QuantumGame(basis, utilities[row], amplitudes[row])
        out[row] = functional.evaluate(game)
    return out


def _haar_rows(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))) / np.sqrt(2.0)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _embedded_pair_rows(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random two-outcome amplitudes at indices (0, 1), zeros elsewhere."""
    pair = _haar_rows(n, 2, rng)
    amps = np.zeros((n, dim), dtype=np.complex128)
    amps[:, :2] = pair
    return amps


def _equal_superposition_rows(n: int, dim: int, phases: np.ndarray) -> np.ndarray:
    amps = np.zeros((n, dim), dtype=np.complex128)
    amps[:, 0] = 1.0 / math.sqrt(2.0)
    amps[:, 1] = np.exp(1j * phases) / math.sqrt(2.0)
    return amps


def _swap_columns(utilities: np.ndarray) -> np.ndarray:
    swapped = np.array(utilities)
    swapped[:, [0, 1]] = swapped[:, [1, 0]]
    return swapped


def _axiom_residuals(
    functional: ValueFunctional,
    axiom_id: str,
    dim: int,
    trials: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, dict]:
    """Residual array for one axiom at one dimension, plus the probe arrays.

    Utilities are uniform in [-10, 10]; amplitudes are Haar-uniform (full
    dimension for the global axioms, a Haar pair embedded at outcomes
    (0, 1) for the two-outcome axioms, the equal superposition with a
    random relative phase for the superposition axioms).
    """
    lo, hi = UTILITY_RANGE
    basis = OrthonormalBasis.computational(dim)
    if axiom_id in ("displacement", "zero_sum"):
        amps = _haar_rows(trials, dim, rng)
    elif axiom_id in ("sum_relation", "general_swap"):
        amps = _embedded_pair_rows(trials, dim, rng)
    elif axiom_id in ("equal_swap", "pivotal"):
        phases = rng.uniform(0.0, 2.0 * math.pi, trials)
        amps = _equal_superposition_rows(trials, dim, phases)
    else:
        raise ValueError(f"unknown axiom id {axiom_id!r}")
    utils = rng.uniform(lo, hi, (trials, dim))
    probes: dict = {"amplitudes": amps, "utilities": utils}

    if axiom_id == "displacement":
        k = rng.uniform(lo, hi, trials)
        probes["k"] = k
        base = _eval_rows(functional, amps, utils, basis)
        shifted = _eval_rows(functional, amps, utils + k[:, None], basis)
        residuals = np.abs(shifted - k - base)
    elif axiom_id == "zero_sum":
        base = _eval_rows(functional, amps, utils, basis)
        negated = _eval_rows(functional, amps, -utils, basis)
        residuals = np.abs(negated + base)
    elif axiom_id == "sum_relation":
        base = _eval_rows(functional, amps, utils, basis)
        swapped = _eval_rows(functional, amps, _swap_columns(utils), basis)
        residuals = np.abs(swapped + base - (utils[:, 0] + utils[:, 1]))
    elif axiom_id in ("equal_swap", "general_swap"):
        base = _eval_rows(functional, amps, utils, basis)
        swapped = _eval_rows(functional, amps, _swap_columns(utils), basis)
        residuals = np.abs(swapped - base)
        if axiom_id == "equal_swap":
            probes["phase"] = phases
    else:  # pivotal
        base = _eval_rows(functional, amps, utils, basis)
        residuals = np.abs(base - (utils[:, 0] + utils[:, 1]) / 2.0)
        probes["phase"] = phases
    return residuals, probes


def _worst_case_payload(
    axiom_id: str, dim: int, row: int, residual: float, probes: dict
) -> dict:
    payload = {
        "residual": residual,
        "dim": dim,
        "amplitudes": [[z.real, z.imag] for z in probes["amplitudes"][row]],
        "utilities": list(probes["utilities"][row]),
    }
    if "k" in probes:
        payload["k"] = float(probes["k"][row])
    if "phase" in probes:
        payload["phase"] = float(probes["phase"][row])
    return payload


def run_suite(
    functional: ValueFunctional,
    *,
    dims: Sequence[int] = DEFAULT_DIMS,
    trials: int = 1000,
    tolerance: float = DEFAULT_TOLERANCE,
    master_seed: int = 0,
    axiom_ids: Sequence[str] | None = None,
) -> AxiomReport:
    """Run every axiom checker over seeded random games.

    ``trials`` probes are drawn per axiom per dimension from generators
    derived as (master_seed, "axioms", axiom id, dim), so any sub-run is
    independently reproducible. The report records, per axiom, the total
    trial count, the maximum residual, the fraction passing the tolerance,
    and the worst probe observed.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not dims:
        raise ValueError("need at least one dimension")
    for dim in dims:
        if dim < 2:
            raise ValueError(f"axiom probes need dimension >= 2, got {dim}")
    ids = tuple(axiom_ids) if axiom_ids is not None else AXIOM_IDS
    for axiom_id in ids:
        if axiom_id not in AXIOM_IDS:
            raise ValueError(f"unknown axiom id {axiom_id!r}")

    from . import _kernels  # local import: backend choice is process-wide

    stats = []
    for axiom_id in ids:
        total = 0
        max_residual = -1.0
        pass_count = 0
        worst: dict | None = None
        for dim in dims:
            rng = derive_rng(master_seed, "axioms", axiom_id, dim)
            residuals, probes = _axiom_residuals(functional, axiom_id, dim, trials, rng)
            total += residuals.size
            pass_count += int(np.count_nonzero(residuals <= tolerance))
            row = int(np.argmax(residuals))
            if float(residuals[row]) > max_residual:
                max_residual = float(residuals[row])
                worst = _worst_case_payload(axiom_id, dim, row, max_residual, probes)
        stats.append(
            AxiomStats(
                axiom_id=axiom_id,
                statement=STATEMENTS[axiom_id],
                trials=total,
                max_residual=max_residual,
                pass_fraction=pass_count / total,
                worst_case=worst,
            )
        )
    return AxiomReport(
        functional=functional.name,
        functional_info=functional.describe(),
        seed=int(master_seed),
        tolerance=float(tolerance),
        trials_per_dim=int(trials),
        dims=tuple(int(d) for d in dims),
        backend=_kernels.BACKEND_NAME,
        axioms=tuple(stats),
    )


def run_single_game_suite(
    functional: ValueFunctional,
    game: QuantumGame,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    master_seed: int = 0,
) -> AxiomReport:
    """Check every axiom once against one supplied game.

    The displacement offset k is drawn from the master seed; the
    superposition axioms probe the game's own eigenbasis with its first
    two utilities. Reports in the same shape as :func:`run_suite` with a
    single trial per axiom.
    """
    if game.dim < 2:
        raise ValueError("axiom checks need a game with at least two outcomes")
    rng = derive_rng(master_seed, "axioms", "single-game")
    k = float(rng.uniform(*UTILITY_RANGE))
    x1, x2 = float(game.utilities[0]), float(game.utilities[1])
    checks = [
        check_displacement(functional, game, k),
        check_zero_sum(functional, game),
        check_sum_relation(functional, game),
        check_equal_swap(functional, x1, x2, game.eigenbasis),
        check_general_swap(functional, game),
        check_pivotal(functional, x1, x2, game.eigenbasis),
    ]

    from . import _kernels  # local import: backend choice is process-wide

    stats = []
    for check in checks:
        probe = check.game
        worst = {
            "residual": check.residual,
            "dim": probe.dim,
            "amplitudes": [[z.real, z.imag] for z in probe.amplitudes],
            "utilities": list(probe.utilities),
            **{key: value for key, value in check.parameters.items()},
        }
        stats.append(
            AxiomStats(
                axiom_id=check.axiom,
                statement=STATEMENTS[check.axiom],
                trials=1,
                max_residual=check.residual,
                pass_fraction=1.0 if check.residual <= tolerance else 0.0,
                worst_case=worst,
            )
        )
    return AxiomReport(
        functional=functional.name,
        functional_info=functional.describe(),
        seed=int(master_seed),
        tolerance=float(tolerance),
        trials_per_dim=1,
        dims=(game.dim,),
        backend=_kernels.BACKEND_NAME,
        axioms=tuple(stats),
    )


# ---------------------------------------------------------------------------
# implication meta-check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImplicationReport:
    """Does (displacement and zero-sum) force the sum relation, numerically?

    The derivation chain: shifting the swapped game by k = -(x1 + x2)
    produces the negated original game, so any rule with both the
    displacement and zero-sum properties must satisfy the sum relation.
    Each trial checks the premises on the specific instances the chain
    uses; when both hold within ``tolerance`` the conclusion must hold
    within 3x that tolerance. With no premise-satisfying trials the
    implication is vacuous and reported as such.
    """

    functional: str
    trials: int
    tolerance: float
    premise_hold_count: int
    conclusion_hold_count: int
    max_conclusion_residual: float
    worst_case: dict | None

    @property
    def vacuous(self) -> bool:
        return self.premise_hold_count == 0

    @property
    def holds(self) -> bool:
        return self.conclusion_hold_count == self.premise_hold_count

    def to_json_dict(self) -> dict:
        return _json_ready({
            "functional": self.functional,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "conclusion_tolerance": 3.0 * self.tolerance,
            "premise_hold_count": self.premise_hold_count,
            "conclusion_hold_count": self.conclusion_hold_count,
            "max_conclusion_residual": (
                None if math.isnan(self.max_conclusion_residual)
                else self.max_conclusion_residual
            ),
            "vacuous": self.vacuous,
            "holds": self.holds,
            "worst_case": self.worst_case,
        })


def check_implication_displacement_zerosum_to_sum(
    functional: ValueFunctional,
    trials: int,
    rng: np.random.Generator,
    *,
    dim: int = 2,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ImplicationReport:
    """Numerically replay the chain from displacement + zero-sum to the sum relation.

    For each random two-outcome game g with utilities (x1, x2):

    * premise A: displacement at the swapped game with k = -(x1 + x2)
    * premise B: zero-sum at g
    * conclusion: V(swap(g)) + V(g) = x1 + x2 within 3 * tolerance

    Residuals are evaluated on the exact game instances the derivation
    chains together, so premises at ``tolerance`` bound the conclusion by
    2x tolerance plus rounding; 3x gives honest slack.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if dim < 2:
        raise ValueError("need dimension >= 2")
    basis = OrthonormalBasis.computational(dim)
    lo, hi = UTILITY_RANGE
    premise_hold = 0
    conclusion_hold = 0
    max_conclusion = -1.0
    worst: dict | None = None
    for _ in range(trials):
        amps = _embedded_pair_rows(1, dim, rng)[0]
        utils = rng.uniform(lo, hi, dim)
        game = QuantumGame(basis, utils, amps)
        x1, x2 = float(utils[0]), float(utils[1])
        swapped = swap_utilities(game, 0, 1)
        k = -(x1 + x2)
        r_disp = check_displacement(functional, swapped, k).residual
        r_zero = check_zero_sum(functional, game).residual
        r_sum = check_sum_relation(functional, game).residual
        if r_disp <= tolerance and r_zero <= tolerance:
            premise_hold += 1
            if r_sum <= 3.0 * tolerance:
                conclusion_hold += 1
            if r_sum > max_conclusion:
                max_conclusion = r_sum
                worst = {
                    "residual_displacement": r_disp,
                    "residual_zero_sum": r_zero,
                    "residual_sum_relation": r_sum,
                    "utilities": list(utils),
                    "amplitudes": [[z.real, z.imag] for z in amps],
                }
    return ImplicationReport(
        functional=functional.name,
        trials=trials,
        tolerance=float(tolerance),
        premise_hold_count=premise_hold,
        conclusion_hold_count=conclusion_hold,
        max_conclusion_residual=max_conclusion if premise_hold else float("nan"),
        worst_case=worst,
    )
