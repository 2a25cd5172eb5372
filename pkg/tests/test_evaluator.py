from fractions import Fraction

import numpy as np
import pytest

from cfrplus.evaluator import (Profile, ProfileError, best_response_action_values,
                               best_response_strategy,
                               best_response_value, expected_value, exploitability, value_vector)
from cfrplus.game_tree import P1, P2, build_one_card_poker

import oracles
from conftest import profile_from_oracle, random_profile


class TestExpectedValue:
    def test_uniform_deck3_matches_enumeration(self, deck3):
        profile = Profile.uniform(deck3)
        sigma = oracles.uniform(3)
        for p in (P1, P2):
            assert expected_value(deck3, profile, p) == pytest.approx(
                oracles.expected_value(3, sigma, p), abs=1e-15)
        assert expected_value(deck3, profile, P1) == pytest.approx(
            -expected_value(deck3, profile, P2), abs=1e-15)

    @pytest.mark.parametrize("deck", [2, 3, 5])
    def test_random_profiles_zero_sum_and_oracle(self, deck):
        tree = build_one_card_poker(deck)
        rng = np.random.default_rng(deck)
        for _ in range(10):
            profile = random_profile(tree, rng)
            v1 = expected_value(tree, profile, P1)
            assert v1 + expected_value(tree, profile, P2) == pytest.approx(0.0, abs=1e-15)
            assert v1 == pytest.approx(
                oracles.expected_value(deck, oracles.from_profile(profile), P1), abs=1e-13)

    @pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1, 4), Fraction(1, 3)])
    def test_kuhn_equilibrium_value(self, deck3, alpha):
        sigma = oracles.kuhn_equilibrium(alpha)
        assert oracles.expected_value(3, sigma, P1) == Fraction(-1, 18)
        profile = profile_from_oracle(deck3, sigma)
        assert expected_value(deck3, profile, P1) == pytest.approx(-1 / 18, abs=1e-15)
        report = exploitability(deck3, profile)
        assert abs(report.exploitability_milli) <= 1e-9


class TestBestResponse:
    def test_vs_uniform_deck2_matches_brute_force(self):
        tree = build_one_card_poker(2)
        profile = Profile.uniform(tree)
        for responder in (P1, P2):
            assert best_response_value(tree, profile, responder) == pytest.approx(
                oracles.brute_force_best_response(2, oracles.uniform(2), responder), abs=1e-12)

    @pytest.mark.parametrize("deck", [2, 3, 4, 6])
    def test_dominates_own_strategy(self, deck):
        tree = build_one_card_poker(deck)
        rng = np.random.default_rng(100 + deck)
        for _ in range(20):
            profile = random_profile(tree, rng)
            for p in (P1, P2):
                assert best_response_value(tree, profile, p) >= \
                    expected_value(tree, profile, p) - 1e-15

    def test_exploits_fold_after_check_bet(self, deck3):
        sigma = oracles.uniform(3)
        for c in (1, 2, 3):
            sigma[P1][("cb", c)] = (1.0, 0.0)
        profile = profile_from_oracle(deck3, sigma)
        after_check = next(n for n in deck3.nodes if n.history == "c")
        check, bet = best_response_action_values(deck3, profile, P2, after_check)
        assert np.all(bet >= check)
        # with the top card checking also wins the pot, so only 1 and 2 are strict
        assert np.all(bet[:2] > check[:2])
        for c in (1, 2, 3):
            for values, symbol in ((check, "c"), (bet, "b")):
                assert values[c - 1] == pytest.approx(
                    oracles.counterfactual_value(3, sigma, P2, "c", c, symbol), abs=1e-15)
        br = best_response_strategy(deck3, profile, P2)
        base = deck3.row_base(after_check)
        assert np.all(br[base:base + 2, 1] == 1.0)

    def test_ignores_responder_rows(self, deck3):
        profile = Profile.uniform(deck3)
        broken = Profile(deck3, (np.zeros_like(profile.strategies[P1]), profile.strategies[P2]))
        assert best_response_value(deck3, broken, P1) == best_response_value(deck3, profile, P1)
        with pytest.raises(ProfileError):
            best_response_value(deck3, broken, P2)

    def test_kernels_agree(self, kernel):
        tree = build_one_card_poker(9)
        profile = random_profile(tree, np.random.default_rng(5))
        for p in (P1, P2):
            for br in (True, False):
                from cfrplus import _pykernel
                expected = value_vector(profile, p, best_response=br, kernel=_pykernel)
                np.testing.assert_array_equal(
                    value_vector(profile, p, best_response=br, kernel=kernel), expected)


class TestExploitability:
    def test_uniform_deck3(self, deck3):
        report = exploitability(deck3, Profile.uniform(deck3))
        sigma = oracles.uniform(3)
        gain = (oracles.brute_force_best_response(3, sigma, P1)
                + oracles.brute_force_best_response(3, sigma, P2)) / 2
        assert report.exploitability_milli > 0
        assert report.exploitability_milli == pytest.approx(1000 * gain, abs=1e-9)

    def test_nonnegative_on_random_profiles(self):
        tree = build_one_card_poker(7)
        rng = np.random.default_rng(11)
        for _ in range(50):
            assert exploitability(tree, random_profile(tree, rng)).exploitability_milli >= -1e-9

    def test_report_fields(self, deck3):
        profile = Profile.uniform(deck3)
        report = exploitability(deck3, profile)
        assert report.br_value_vs_p1 == best_response_value(deck3, profile, P2)
        assert report.br_value_vs_p2 == best_response_value(deck3, profile, P1)


class TestValidation:
    def test_incomplete_mapping(self, deck3):
        mappings = Profile.uniform(deck3).to_mapping()
        mappings[P2].pop(next(iter(mappings[P2])))
        with pytest.raises(ProfileError):
            Profile.from_mapping(deck3, mappings)

    def test_not_a_distribution(self, deck3):
        mappings = Profile.uniform(deck3).to_mapping()
        first = next(iter(mappings[P1]))
        mappings[P1][first] = [0.7, 0.7]
        with pytest.raises(ProfileError):
            Profile.from_mapping(deck3, mappings)

    def test_wrong_game(self, deck3):
        with pytest.raises(ProfileError):
            expected_value(build_one_card_poker(4), Profile.uniform(deck3), P1)

    def test_wrong_shape(self, deck3):
        profile = Profile.uniform(deck3)
        bad = Profile(deck3, (profile.strategies[P1][:-1], profile.strategies[P2]))
        with pytest.raises(ProfileError):
            exploitability(deck3, bad)

    def test_mapping_round_trip(self, deck3):
        profile = random_profile(deck3, np.random.default_rng(0))
        again = Profile.from_mapping(deck3, profile.to_mapping())
        for p in (P1, P2):
            assert np.array_equal(again.strategies[p], profile.strategies[p])
