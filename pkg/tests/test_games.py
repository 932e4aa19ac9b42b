"""Games, value rules, monotone transforms, and the game file format."""
from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab.games import (
    BornValue,
    ConstantValue,
    DeterministicValue,
    EmptySupportError,
    FMeanValue,
    GameValidationError,
    QuantumGame,
    UniformSupportValue,
    born_probabilities,
    born_value,
    computational_game,
    deterministic_value,
    displace,
    exponential_transform,
    fmean_value,
    game_state,
    game_to_doc,
    identity_transform,
    load_game,
    make_game,
    negate,
    parse_game,
    power_transform,
    resolve_functional,
    resolve_transform,
    support_indices,
    swap_utilities,
    uniform_support_probabilities,
    uniform_support_value,
    utility_operator,
)
from qdlab.hilbert import (
    StateVector,
    derive_rng,
    expectation,
    haar_state_batch,
    random_basis,
    random_state,
)

INV_SQRT2 = 1.0 / np.sqrt(2.0)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
utility = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


def equal_superposition(x1: float, x2: float, phase: float = 0.0) -> QuantumGame:
    amps = np.array([1.0, np.exp(1j * phase)]) * INV_SQRT2
    return computational_game(amps, [x1, x2])


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


class TestQuantumGame:
    def test_rejects_unnormalized_amplitudes(self):
        with pytest.raises(GameValidationError, match="unit-norm"):
            computational_game([1.0, 1.0], [0.0, 1.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(GameValidationError):
            computational_game([1.0, 0.0], [0.0, 1.0, 2.0])

    def test_arrays_read_only(self):
        game = equal_superposition(0.0, 1.0)
        with pytest.raises(ValueError):
            game.utilities[0] = 5.0

    def test_make_game_projects_onto_eigenbasis(self):
        e0 = StateVector.computational(2, 0)
        e1 = StateVector.computational(2, 1)
        state = StateVector(np.array([0.6, 0.8]))
        game = make_game(state, [(5.0, e0), (9.0, e1)])
        assert np.allclose(game.amplitudes, [0.6, 0.8], atol=1e-12)
        assert np.array_equal(game.utilities, [5.0, 9.0])

    def test_make_game_rejects_skewed_eigenvectors(self):
        e0 = StateVector.computational(2, 0)
        with pytest.raises(GameValidationError):
            make_game(e0, [(1.0, e0), (2.0, e0)])

    def test_make_game_rejects_dim_mismatch(self):
        with pytest.raises(GameValidationError):
            make_game(
                StateVector.computational(3, 0),
                [(1.0, StateVector.computational(2, 0)),
                 (2.0, StateVector.computational(2, 1))],
            )

    def test_game_state_round_trip(self, rng):
        basis = random_basis(3, rng)
        state = random_state(3, rng)
        game = make_game(state, list(zip([1.0, 2.0, 3.0], basis)))
        assert np.allclose(game_state(game).amplitudes, state.amplitudes, atol=1e-12)

    def test_utility_operator_spectral_form(self, rng):
        basis = random_basis(3, rng)
        game = make_game(random_state(3, rng), list(zip([1.5, -2.0, 4.0], basis)))
        op = utility_operator(game)
        for x, vec in zip(game.utilities, basis):
            assert expectation(op, vec) == pytest.approx(x, abs=1e-10)


class TestGameOperations:
    def test_displace_shifts_utilities_only(self):
        game = equal_superposition(1.5, 2.25)
        shifted = displace(game, -3.0)
        assert np.array_equal(shifted.utilities, [-1.5, -0.75])
        assert np.array_equal(shifted.amplitudes, game.amplitudes)

    def test_displace_by_minus_sum_mirrors_swap_of_negation(self):
        # (x1, x2) + k with k = -(x1 + x2) lands exactly on (-x2, -x1)
        game = equal_superposition(1.5, 2.25)
        a = displace(game, -(1.5 + 2.25))
        b = swap_utilities(negate(game), 0, 1)
        assert np.array_equal(a.utilities, b.utilities)

    def test_negate_is_an_involution(self):
        game = equal_superposition(1.0, -2.0)
        assert np.array_equal(negate(game).utilities, [-1.0, 2.0])
        assert np.array_equal(negate(negate(game)).utilities, game.utilities)

    def test_swap_exchanges_selected_pair(self):
        game = computational_game([1.0, 0.0, 0.0], [1.0, 2.0, 3.0])
        assert np.array_equal(swap_utilities(game, 0, 2).utilities, [3.0, 2.0, 1.0])
        assert np.array_equal(swap_utilities(game, 1, 1).utilities, game.utilities)

    def test_swap_out_of_range(self):
        game = equal_superposition(0.0, 1.0)
        with pytest.raises(IndexError):
            swap_utilities(game, 0, 2)


# ---------------------------------------------------------------------------
# the four value rules
# ---------------------------------------------------------------------------


class TestBornValue:
    def test_weighted_pair(self):
        game = computational_game([0.6, 0.8], [0.0, 1.0])
        assert born_value(game) == pytest.approx(0.64, abs=1e-12)

    def test_equal_superposition_is_midpoint_for_any_phase(self):
        for phase in (0.0, 0.7, np.pi):
            game = equal_superposition(3.0, 7.0, phase)
            assert born_value(game) == pytest.approx(5.0, abs=1e-12)

    def test_concentrated_state(self):
        assert born_value(computational_game([1.0, 0.0], [3.0, 7.0])) == 3.0

    def test_matches_operator_expectation(self):
        # dual route: sum p_j x_j vs <psi|X|psi>, 1000 random games, dims 2..5
        checked = 0
        for dim in (2, 3, 4, 5):
            rng = derive_rng(23, "born-routes", dim)
            for _ in range(250):
                basis = random_basis(dim, rng)
                utils = rng.uniform(-10, 10, size=dim)
                game = make_game(random_state(dim, rng), list(zip(utils, basis)))
                direct = born_value(game)
                operator = expectation(utility_operator(game), game_state(game))
                assert abs(direct - operator) < 1e-9
                checked += 1
        assert checked == 1000


class TestUniformSupportValue:
    def test_full_support_ignores_weights(self):
        game = computational_game([0.6, 0.8], [3.0, 7.0])
        assert uniform_support_value(game) == pytest.approx(5.0, abs=1e-12)

    def test_support_restriction(self):
        game = computational_game([1.0, 0.0], [3.0, 7.0])
        assert uniform_support_value(game) == 3.0
        assert np.array_equal(support_indices(game), [0])

    def test_three_outcome_mean(self):
        game = computational_game([0.5, 0.5, INV_SQRT2], [1.0, 2.0, 6.0])
        assert uniform_support_value(game) == pytest.approx(3.0, abs=1e-12)

    def test_epsilon_controls_support(self):
        amps = np.array([1e-6, np.sqrt(1.0 - 1e-12)])
        game = computational_game(amps, [3.0, 7.0])
        assert uniform_support_value(game, epsilon=1e-9) == pytest.approx(5.0)
        assert uniform_support_value(game, epsilon=1e-3) == 7.0

    def test_empty_support_raises(self):
        game = equal_superposition(3.0, 7.0)
        with pytest.raises(EmptySupportError):
            uniform_support_value(game, epsilon=0.9)

    @given(seeds)
    def test_permutation_invariance(self, seed):
        # permuting (amplitude, utility) pairs together never changes the value
        rng = derive_rng(seed, "perm")
        dim = int(rng.integers(2, 6))
        amps = haar_state_batch(1, dim, rng)[0]
        utils = rng.uniform(-10, 10, size=dim)
        perm = rng.permutation(dim)
        base = uniform_support_value(computational_game(amps, utils))
        shuffled = uniform_support_value(computational_game(amps[perm], utils[perm]))
        assert base == pytest.approx(shuffled, abs=1e-12)

    def test_probabilities_sum_to_one(self, rng):
        game = computational_game([0.5, 0.5, INV_SQRT2], [1.0, 2.0, 6.0])
        probs = uniform_support_probabilities(game)
        assert np.allclose(probs, [1 / 3, 1 / 3, 1 / 3])


class TestDeterministicValue:
    def test_picks_lowest_supported_index(self):
        assert deterministic_value(computational_game([0.6, 0.8], [3.0, 7.0])) == 3.0
        assert deterministic_value(computational_game([0.0, 1.0], [3.0, 7.0])) == 7.0

    def test_equal_superposition_ignores_second_outcome(self):
        assert deterministic_value(equal_superposition(7.0, 3.0)) == 7.0
        assert deterministic_value(equal_superposition(3.0, 7.0)) == 3.0

    def test_respects_epsilon(self):
        amps = np.array([1e-6, np.sqrt(1.0 - 1e-12)])
        game = computational_game(amps, [3.0, 7.0])
        assert deterministic_value(game, epsilon=1e-3) == 7.0

    def test_empty_support_raises(self):
        with pytest.raises(EmptySupportError):
            deterministic_value(equal_superposition(3.0, 7.0), epsilon=0.9)


class TestFMeanValue:
    def test_identity_transform_reduces_to_born(self, rng):
        fm = FMeanValue(identity_transform())
        for _ in range(50):
            amps = haar_state_batch(1, 3, rng)[0]
            utils = rng.uniform(-10, 10, size=3)
            game = computational_game(amps, utils)
            assert fm(game) == pytest.approx(born_value(game), abs=1e-10)

    def test_uniform_map_with_identity_reduces_to_uniform(self, rng):
        fm = FMeanValue(identity_transform(), probability_map="uniform")
        for _ in range(50):
            amps = haar_state_batch(1, 3, rng)[0]
            utils = rng.uniform(-10, 10, size=3)
            game = computational_game(amps, utils)
            assert fm(game) == pytest.approx(uniform_support_value(game), abs=1e-10)

    def test_exponential_closed_form(self):
        # probs (1/2, 1/2), x = (0, 1), rate 1: F^-1 = log((1 + e)/2)
        game = equal_superposition(0.0, 1.0)
        value = fmean_value(game, [0.5, 0.5], exponential_transform(1.0))
        assert value == pytest.approx(np.log((1.0 + np.e) / 2.0), abs=1e-12)

    def test_negative_rate_two_routes(self):
        game = equal_superposition(0.0, 1.0)
        value = fmean_value(game, [0.5, 0.5], exponential_transform(-2.0))
        by_hand = np.log((np.exp(0.0) + np.exp(-2.0)) / 2.0) / -2.0
        assert value == pytest.approx(by_hand, abs=1e-12)

    def test_power_closed_form(self):
        game = equal_superposition(0.0, 1.0)
        value = fmean_value(game, [0.5, 0.5], power_transform(2.0))
        assert value == pytest.approx(np.sqrt(0.5), abs=1e-12)

    def test_constant_utilities_fixed_point(self):
        game = equal_superposition(4.0, 4.0)
        for transform in (identity_transform(), exponential_transform(0.7), power_transform(3.0)):
            assert fmean_value(game, [0.5, 0.5], transform) == pytest.approx(4.0, abs=1e-10)

    def test_rejects_bad_probabilities(self):
        game = equal_superposition(0.0, 1.0)
        with pytest.raises(ValueError):
            fmean_value(game, [0.7, 0.7], identity_transform())
        with pytest.raises(ValueError):
            fmean_value(game, [-0.1, 1.1], identity_transform())
        with pytest.raises(ValueError):
            fmean_value(game, [1.0], identity_transform())

    def test_domain_violation_raises(self):
        game = equal_superposition(-1.0, 1.0)
        with pytest.raises(ValueError, match="domain"):
            fmean_value(game, [0.5, 0.5], power_transform(2.0))

    @given(seeds)
    def test_value_between_min_and_max_utility(self, seed):
        rng = derive_rng(seed, "fmean-bounds")
        amps = haar_state_batch(1, 3, rng)[0]
        utils = rng.uniform(-10, 10, size=3)
        game = computational_game(amps, utils)
        value = fmean_value(game, born_probabilities(game), exponential_transform(0.5))
        assert np.min(utils) - 1e-9 <= value <= np.max(utils) + 1e-9

    @given(seeds)
    def test_monotone_in_each_utility(self, seed):
        # raising one utility (with positive probability) never lowers the value
        rng = derive_rng(seed, "fmean-mono")
        amps = haar_state_batch(1, 3, rng)[0]
        utils = rng.uniform(-10, 10, size=3)
        j = int(rng.integers(0, 3))
        bumped = np.array(utils)
        bumped[j] += rng.uniform(0.1, 5.0)
        fm = FMeanValue(exponential_transform(1.0))
        low = fm(computational_game(amps, utils))
        high = fm(computational_game(amps, bumped))
        assert high >= low - 1e-9


class TestValueOrdering:
    def test_induced_preference_is_transitive(self, rng):
        # values are reals, so sorting games by value is a total preorder;
        # spot-check transitivity explicitly on random triples
        fm = BornValue()
        for _ in range(50):
            games = [
                computational_game(haar_state_batch(1, 3, rng)[0], rng.uniform(-10, 10, 3))
                for _ in range(3)
            ]
            a, b, c = (fm(g) for g in games)
            if a >= b and b >= c:
                assert a >= c


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


class TestMonotoneTransforms:
    @pytest.mark.parametrize(
        "transform,grid",
        [
            (identity_transform(), np.linspace(-10, 10, 41)),
            (exponential_transform(1.0), np.linspace(-10, 10, 41)),
            (exponential_transform(0.25), np.linspace(-10, 10, 41)),
            (exponential_transform(-1.5), np.linspace(-10, 10, 41)),
            (power_transform(2.0), np.linspace(0, 10, 41)),
            (power_transform(0.5), np.linspace(0, 10, 41)),
        ],
        ids=["identity", "exp1", "exp.25", "exp-1.5", "pow2", "pow.5"],
    )
    def test_round_trip_and_monotonicity(self, transform, grid):
        values = transform.forward(grid)
        assert np.all(np.diff(values) > 0)  # strictly increasing
        assert np.max(np.abs(transform.inverse(values) - grid)) < 1e-9

    def test_exponential_rejects_zero_rate(self):
        with pytest.raises(ValueError):
            exponential_transform(0.0)

    def test_power_rejects_nonpositive_exponent(self):
        with pytest.raises(ValueError):
            power_transform(0.0)
        with pytest.raises(ValueError):
            power_transform(-1.0)

    def test_power_domain_includes_zero(self):
        t = power_transform(2.0)
        t.check_domain(np.array([0.0, 5.0]))  # must not raise
        with pytest.raises(ValueError):
            t.check_domain(np.array([-0.1, 5.0]))

    def test_resolve_transform_specs(self):
        assert resolve_transform("identity").name == "identity"
        assert resolve_transform("exponential").kernel_spec[1] == 1.0
        assert resolve_transform("exponential:0.5").kernel_spec[1] == 0.5
        assert resolve_transform("power:3").kernel_spec[1] == 3.0

    def test_resolve_transform_errors(self):
        with pytest.raises(ValueError):
            resolve_transform("bogus")
        with pytest.raises(ValueError):
            resolve_transform("identity:3")
        with pytest.raises(ValueError):
            resolve_transform("power:abc")


# ---------------------------------------------------------------------------
# functional objects
# ---------------------------------------------------------------------------


class TestFunctionalObjects:
    @pytest.mark.parametrize(
        "functional",
        [
            BornValue(),
            UniformSupportValue(),
            DeterministicValue(),
            FMeanValue(exponential_transform(1.0)),
            FMeanValue(identity_transform(), probability_map="uniform"),
            ConstantValue(2.5),
        ],
        ids=lambda f: f.name,
    )
    def test_batch_matches_scalar_evaluation(self, functional, rng):
        amps = haar_state_batch(64, 3, rng)
        utils = rng.uniform(0.0, 10.0, size=(64, 3))  # domain-safe for all
        batch = functional.batch_values(amps, utils)
        scalar = np.array([
            functional(computational_game(a, u)) for a, u in zip(amps, utils)
        ])
        assert np.max(np.abs(batch - scalar)) < 1e-12

    def test_deterministic_on_repeated_input(self, rng):
        game = computational_game(haar_state_batch(1, 4, rng)[0], rng.uniform(-10, 10, 4))
        fm = FMeanValue(exponential_transform(0.3))
        assert fm(game) == fm(game)

    def test_describe_round_trips_key_parameters(self):
        desc = FMeanValue(exponential_transform(0.5), probability_map="uniform").describe()
        assert desc["probability_map"] == "uniform"
        assert "exponential" in desc["transform"]
        assert UniformSupportValue(1e-6).describe()["support_threshold"] == 1e-6

    def test_resolve_functional(self):
        assert isinstance(resolve_functional("born"), BornValue)
        assert isinstance(resolve_functional("uniform"), UniformSupportValue)
        assert isinstance(resolve_functional("deterministic"), DeterministicValue)
        fm = resolve_functional("fmean", transform="exponential:2")
        assert isinstance(fm, FMeanValue)
        assert fm.transform.kernel_spec[1] == 2.0
        with pytest.raises(ValueError):
            resolve_functional("nope")

    def test_constant_value_ignores_game(self):
        c = ConstantValue(1.25)
        assert c(equal_superposition(0.0, 1.0)) == 1.25
        assert np.array_equal(
            c.batch_values(np.eye(2, dtype=complex), np.zeros((2, 2))), [1.25, 1.25]
        )


# ---------------------------------------------------------------------------
# game files
# ---------------------------------------------------------------------------


class TestGameFiles:
    def test_round_trip_computational(self):
        game = equal_superposition(3.0, 7.0, phase=0.4)
        doc = game_to_doc(game)
        again = parse_game(doc)
        assert np.allclose(again.amplitudes, game.amplitudes, atol=1e-15)
        assert np.array_equal(again.utilities, game.utilities)
        assert "eigenvectors" not in doc

    def test_round_trip_with_eigenvectors(self, rng):
        basis = random_basis(3, rng)
        game = make_game(random_state(3, rng), list(zip([1.0, 2.0, 3.0], basis)))
        doc = game_to_doc(game)
        assert "eigenvectors" in doc
        again = parse_game(doc)
        assert np.allclose(again.eigenbasis.matrix, game.eigenbasis.matrix, atol=1e-15)
        assert np.allclose(again.amplitudes, game.amplitudes, atol=1e-15)

    def test_load_game(self, tmp_path):
        path = tmp_path / "game.json"
        path.write_text(json.dumps({
            "dim": 2,
            "amplitudes": [[0.6, 0.0], [0.8, 0.0]],
            "utilities": [0.0, 1.0],
        }))
        game = load_game(path)
        assert born_value(game) == pytest.approx(0.64, abs=1e-12)

    def test_missing_field_named(self):
        with pytest.raises(GameValidationError, match="amplitudes"):
            parse_game({"dim": 2, "utilities": [0.0, 1.0]})

    def test_bad_dim_named(self):
        with pytest.raises(GameValidationError, match="dim"):
            parse_game({"dim": -1, "amplitudes": [], "utilities": []})

    def test_length_invariant_named(self):
        with pytest.raises(GameValidationError, match="length invariant"):
            parse_game({
                "dim": 3,
                "amplitudes": [[1.0, 0.0], [0.0, 0.0]],
                "utilities": [0.0, 1.0, 2.0],
            })

    def test_norm_invariant_named(self):
        with pytest.raises(GameValidationError, match="unit-norm"):
            parse_game({
                "dim": 2,
                "amplitudes": [[1.0, 0.0], [1.0, 0.0]],
                "utilities": [0.0, 1.0],
            })

    def test_orthonormality_invariant_named(self):
        with pytest.raises(GameValidationError, match="orthonormality"):
            parse_game({
                "dim": 2,
                "amplitudes": [[1.0, 0.0], [0.0, 0.0]],
                "utilities": [0.0, 1.0],
                "eigenvectors": [[[1.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]],
            })

    def test_malformed_pair_named(self):
        with pytest.raises(GameValidationError, match="pair"):
            parse_game({
                "dim": 2,
                "amplitudes": [[1.0], [0.0, 0.0]],
                "utilities": [0.0, 1.0],
            })

    def test_invalid_json_named(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(GameValidationError, match="JSON"):
            load_game(path)
