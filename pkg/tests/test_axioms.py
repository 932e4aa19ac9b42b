"""Axiom checkers, the suite runner, and the implication replay."""
from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab import _kernels
from qdlab.axioms import (
    AXIOM_IDS,
    STATEMENTS,
    AxiomResidual,
    check_displacement,
    check_equal_swap,
    check_general_swap,
    check_implication_displacement_zerosum_to_sum,
    check_pivotal,
    check_sum_relation,
    check_zero_sum,
    expected_axioms,
    run_single_game_suite,
    run_suite,
)
from qdlab.games import (
    BornValue,
    ConstantValue,
    DeterministicValue,
    FMeanValue,
    QuantumGame,
    UniformSupportValue,
    computational_game,
    exponential_transform,
    identity_transform,
    swap_utilities,
)
from qdlab.hilbert import OrthonormalBasis, derive_rng

INV_SQRT2 = 1.0 / np.sqrt(2.0)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
utility = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)

BORN = BornValue()
UNIFORM = UniformSupportValue()
DETERMINISTIC = DeterministicValue()
FMEAN_EXP = FMeanValue(exponential_transform(1.0))

BASIS2 = OrthonormalBasis.computational(2)

WEIGHTED = computational_game([0.6, 0.8], [0.0, 1.0])


def rebuild_game(payload: dict) -> QuantumGame:
    amps = np.array([complex(re, im) for re, im in payload["amplitudes"]])
    return computational_game(amps, payload["utilities"])


# ---------------------------------------------------------------------------
# individual checkers
# ---------------------------------------------------------------------------


class TestCheckers:
    def test_born_satisfies_five_axioms_on_fixture(self):
        assert check_displacement(BORN, WEIGHTED, 3.7).residual < 1e-12
        assert check_zero_sum(BORN, WEIGHTED).residual < 1e-12
        assert check_sum_relation(BORN, WEIGHTED).residual < 1e-12
        assert check_equal_swap(BORN, 3.0, 7.0, BASIS2).residual < 1e-12
        assert check_pivotal(BORN, 3.0, 7.0, BASIS2).residual < 1e-12

    def test_born_general_swap_residual_closed_form(self):
        # |V(swap g) - V(g)| = |(p0 - p1)(x0 - x1)| = |0.36 - 0.64| * 1
        res = check_general_swap(BORN, WEIGHTED)
        assert res.residual == pytest.approx(0.28, abs=1e-12)

    def test_uniform_passes_everything_on_fixture(self):
        assert check_general_swap(UNIFORM, WEIGHTED).residual < 1e-12
        assert check_equal_swap(UNIFORM, 3.0, 7.0, BASIS2).residual < 1e-12
        assert check_pivotal(UNIFORM, 3.0, 7.0, BASIS2).residual < 1e-12

    def test_deterministic_arithmetic_axioms_exact(self):
        assert check_displacement(DETERMINISTIC, WEIGHTED, -2.5).residual < 1e-12
        assert check_zero_sum(DETERMINISTIC, WEIGHTED).residual == 0.0
        assert check_sum_relation(DETERMINISTIC, WEIGHTED).residual < 1e-12

    def test_deterministic_swap_residual_is_utility_gap(self):
        # the rule returns x1 on the equal superposition, so swapping the
        # utilities moves the value by exactly |x1 - x2|
        res = check_equal_swap(DETERMINISTIC, 7.0, 3.0, BASIS2)
        assert res.residual == pytest.approx(4.0, abs=1e-15)
        piv = check_pivotal(DETERMINISTIC, 7.0, 3.0, BASIS2)
        assert piv.residual == pytest.approx(2.0, abs=1e-15)

    def test_fmean_exponential_displacement_and_swap(self):
        game = computational_game([INV_SQRT2, INV_SQRT2], [0.0, 1.0])
        assert check_displacement(FMEAN_EXP, game, 4.2).residual < 1e-9
        assert check_equal_swap(FMEAN_EXP, 0.0, 1.0, BASIS2).residual < 1e-12

    def test_fmean_exponential_zero_sum_residual_closed_form(self):
        # log((1+e)/2) + log((1+1/e)/2) = log((2 + e + 1/e)/4)
        game = computational_game([INV_SQRT2, INV_SQRT2], [0.0, 1.0])
        res = check_zero_sum(FMEAN_EXP, game)
        assert res.residual == pytest.approx(np.log((2 + np.e + 1 / np.e) / 4), abs=1e-12)

    def test_fmean_exponential_pivotal_residual_closed_form(self):
        res = check_pivotal(FMEAN_EXP, 0.0, 1.0, BASIS2)
        assert res.residual == pytest.approx(np.log((1 + np.e) / 2) - 0.5, abs=1e-12)

    def test_residual_records_probe_parameters(self):
        res = check_displacement(BORN, WEIGHTED, 1.5)
        assert res.axiom == "displacement"
        assert res.parameters["k"] == 1.5
        assert res.game is WEIGHTED

    def test_negative_residual_rejected(self):
        with pytest.raises(ValueError):
            AxiomResidual("displacement", -0.1, WEIGHTED)

    def test_sum_relation_needs_two_outcomes(self):
        single = computational_game([1.0], [5.0])
        with pytest.raises(ValueError):
            check_sum_relation(BORN, single)
        with pytest.raises(ValueError):
            check_general_swap(BORN, single)

    @given(utility, utility, seeds)
    def test_equal_swap_checker_symmetric_in_utilities(self, x1, x2, seed):
        phase = derive_rng(seed, "phase").uniform(0, 2 * np.pi)
        for f in (BORN, UNIFORM, DETERMINISTIC):
            a = check_equal_swap(f, x1, x2, BASIS2, phase).residual
            b = check_equal_swap(f, x2, x1, BASIS2, phase).residual
            assert a == b

    @given(utility, utility)
    def test_born_checkers_phase_invariant(self, x1, x2):
        for phase in (0.0, 1.234, np.pi):
            assert check_pivotal(BORN, x1, x2, BASIS2, phase).residual < 1e-9
            assert check_equal_swap(BORN, x1, x2, BASIS2, phase).residual < 1e-12


# ---------------------------------------------------------------------------
# suite runner
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def born_report():
    return run_suite(BORN, trials=400, master_seed=5)


class TestRunSuite:
    def test_born_fails_only_general_swap(self, born_report):
        for axiom_id in AXIOM_IDS:
            stats = born_report.stats(axiom_id)
            if axiom_id == "general_swap":
                assert not stats.passed(1e-9)
                assert stats.max_residual > 0.05
                assert stats.pass_fraction < 0.01
            else:
                assert stats.passed(1e-9), (axiom_id, stats.max_residual)

    def test_uniform_passes_all(self):
        report = run_suite(UNIFORM, trials=400, master_seed=5)
        for axiom_id in AXIOM_IDS:
            assert report.stats(axiom_id).passed(1e-9)

    def test_deterministic_passes_exactly_the_arithmetic_axioms(self):
        report = run_suite(DETERMINISTIC, trials=400, master_seed=5)
        for axiom_id in ("displacement", "zero_sum", "sum_relation"):
            assert report.stats(axiom_id).passed(1e-9)
        for axiom_id in ("equal_swap", "general_swap", "pivotal"):
            stats = report.stats(axiom_id)
            assert not stats.passed(1e-9)
            assert stats.pass_fraction == 0.0

    def test_fmean_exponential_keeps_displacement_and_equal_swap(self):
        report = run_suite(FMEAN_EXP, trials=400, master_seed=5)
        assert report.stats("displacement").passed(1e-9)
        assert report.stats("equal_swap").passed(1e-9)
        for axiom_id in ("zero_sum", "sum_relation", "general_swap", "pivotal"):
            assert not report.stats(axiom_id).passed(1e-9)

    def test_observed_pattern_matches_expected_table(self):
        for functional in (BORN, UNIFORM, DETERMINISTIC):
            table = expected_axioms(functional)
            report = run_suite(functional, trials=300, master_seed=9)
            observed = {
                axiom_id: report.stats(axiom_id).passed(report.tolerance)
                for axiom_id in AXIOM_IDS
            }
            assert observed == table

    def test_expected_table_for_fmean(self):
        assert expected_axioms(FMeanValue(identity_transform())) == expected_axioms(BORN)
        assert expected_axioms(FMEAN_EXP) is None
        assert expected_axioms(ConstantValue()) is None

    def test_reports_are_reproducible(self):
        a = run_suite(BORN, trials=50, master_seed=12)
        b = run_suite(BORN, trials=50, master_seed=12)
        c = run_suite(BORN, trials=50, master_seed=13)
        assert a.to_json() == b.to_json()
        assert a.to_json() != c.to_json()

    def test_worst_case_reproduces_recorded_residual(self, born_report):
        # rebuild each recorded worst probe and replay it through the scalar
        # route; the two paths must agree on the residual
        for stats in born_report.axioms:
            payload = stats.worst_case
            game = rebuild_game(payload)
            if stats.axiom_id == "displacement":
                replay = check_displacement(BORN, game, payload["k"]).residual
            elif stats.axiom_id == "zero_sum":
                replay = check_zero_sum(BORN, game).residual
            elif stats.axiom_id == "sum_relation":
                replay = check_sum_relation(BORN, game).residual
            elif stats.axiom_id in ("equal_swap", "general_swap"):
                replay = abs(BORN(swap_utilities(game, 0, 1)) - BORN(game))
            else:
                x0, x1 = game.utilities[0], game.utilities[1]
                replay = abs(BORN(game) - (x0 + x1) / 2.0)
            assert replay == pytest.approx(stats.max_residual, abs=1e-9)

    def test_trial_counts_and_metadata(self, born_report):
        assert born_report.functional == "born"
        assert born_report.dims == (2, 3)
        assert born_report.trials_per_dim == 400
        assert born_report.backend == _kernels.BACKEND_NAME
        for stats in born_report.axioms:
            assert stats.trials == 800  # two dims

    def test_axiom_subset_and_ordering(self):
        report = run_suite(BORN, trials=20, master_seed=1,
                           axiom_ids=("pivotal", "zero_sum"))
        assert tuple(s.axiom_id for s in report.axioms) == ("pivotal", "zero_sum")
        with pytest.raises(KeyError):
            report.stats("displacement")

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            run_suite(BORN, trials=0)
        with pytest.raises(ValueError):
            run_suite(BORN, dims=())
        with pytest.raises(ValueError):
            run_suite(BORN, dims=(1,))
        with pytest.raises(ValueError):
            run_suite(BORN, axiom_ids=("nope",))

    def test_batch_and_scalar_paths_agree(self):
        # a subclass that hides the batch entry point falls back to the
        # per-game loop; statistics must match the vectorized run
        class NoBatch(BornValue):
            def supports_batch(self) -> bool:
                return False

        fast = run_suite(BORN, trials=60, master_seed=3)
        slow = run_suite(NoBatch(), trials=60, master_seed=3)
        for axiom_id in AXIOM_IDS:
            assert fast.stats(axiom_id).max_residual == pytest.approx(
                slow.stats(axiom_id).max_residual, abs=1e-12
            )
            assert fast.stats(axiom_id).pass_fraction == slow.stats(axiom_id).pass_fraction


class TestSingleGameSuite:
    def test_born_on_weighted_game(self):
        report = run_single_game_suite(BORN, WEIGHTED)
        for stats in report.axioms:
            assert stats.trials == 1
            if stats.axiom_id == "general_swap":
                assert stats.max_residual == pytest.approx(0.28, abs=1e-12)
            else:
                assert stats.passed(1e-9)

    def test_deterministic_on_weighted_game(self):
        report = run_single_game_suite(DETERMINISTIC, WEIGHTED)
        assert report.stats("equal_swap").max_residual == pytest.approx(1.0, abs=1e-12)
        assert report.stats("pivotal").max_residual == pytest.approx(0.5, abs=1e-12)
        assert report.stats("zero_sum").passed(1e-9)

    def test_needs_two_outcomes(self):
        with pytest.raises(ValueError):
            run_single_game_suite(BORN, computational_game([1.0], [5.0]))


# ---------------------------------------------------------------------------
# implication replay
# ---------------------------------------------------------------------------


class TestImplication:
    @pytest.mark.parametrize("functional", [BORN, UNIFORM, DETERMINISTIC],
                             ids=lambda f: f.name)
    def test_holds_for_rules_with_both_premises(self, functional, rng):
        report = check_implication_displacement_zerosum_to_sum(functional, 200, rng)
        assert not report.vacuous
        assert report.premise_hold_count == 200
        assert report.holds
        assert report.max_conclusion_residual <= 3e-9

    def test_vacuous_for_constant_rule(self, rng):
        # V == 0 satisfies zero-sum but never displacement, so no trial
        # establishes the premises and the implication says nothing
        report = check_implication_displacement_zerosum_to_sum(ConstantValue(0.0), 100, rng)
        assert report.vacuous
        assert report.premise_hold_count == 0
        assert report.holds  # vacuously
        assert report.to_json_dict()["max_conclusion_residual"] is None

    def test_worst_case_payload_replayable(self, rng):
        report = check_implication_displacement_zerosum_to_sum(BORN, 50, rng)
        payload = report.worst_case
        game = rebuild_game(payload)
        assert check_sum_relation(BORN, game).residual == pytest.approx(
            payload["residual_sum_relation"], abs=1e-12
        )

    def test_serialization_fields(self, rng):
        doc = check_implication_displacement_zerosum_to_sum(BORN, 20, rng).to_json_dict()
        assert doc["conclusion_tolerance"] == pytest.approx(3e-9)
        assert doc["vacuous"] is False and doc["holds"] is True
        json.dumps(doc)  # must be serializable

    def test_rejects_bad_arguments(self, rng):
        with pytest.raises(ValueError):
            check_implication_displacement_zerosum_to_sum(BORN, 0, rng)
        with pytest.raises(ValueError):
            check_implication_displacement_zerosum_to_sum(BORN, 10, rng, dim=1)


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def report():
    return run_suite(BORN, trials=40, master_seed=2)


class TestReportSerialization:
    def test_json_parses_and_is_rendered(self, report):
        doc = json.loads(report.to_json())
        assert doc["functional"] == "born"
        assert [a["id"] for a in doc["axioms"]] == list(AXIOM_IDS)
        for axiom in doc["axioms"]:
            # every float survived the 12-significant-digit rendering
            assert axiom["max_residual"] == float(f"{axiom['max_residual']:.12g}")
            assert axiom["statement"] == STATEMENTS[axiom["id"]]

    def test_markdown_has_one_row_per_axiom(self, report):
        text = report.to_markdown()
        for axiom_id in AXIOM_IDS:
            assert f"| {axiom_id} |" in text
        assert "| general_swap |" in text and "FAIL" in text

    def test_csv_round_trips(self, report):
        rows = list(csv.DictReader(io.StringIO(report.to_csv())))
        assert len(rows) == len(AXIOM_IDS)
        by_id = {row["axiom"]: row for row in rows}
        assert by_id["general_swap"]["passed"] == "false"
        assert by_id["displacement"]["passed"] == "true"
        assert float(by_id["pivotal"]["max_residual"]) <= 1e-9

    def test_statements_cover_all_axioms(self):
        assert set(STATEMENTS) == set(AXIOM_IDS)
        for statement in STATEMENTS.values():
            assert "V(" in statement
