import numpy as np
import pytest

from policy_dyn.errors import DimensionError, InvariantError, ValidationError
from policy_dyn.game import Game, JointDistribution, expected_utility
from policy_dyn.markov import FunctionPairDistribution, induced_chain, stationary_residual
from policy_dyn.equilibria import (EquilibriumVerdict, Violation, cce_slacks,
                                   enumerate_function_pairs, equilibrium_slack,
                                   find_cce, is_cce, is_policy_equilibrium)
from .support import random_game

AC, AD, BC, BD = range(4)


def example_pi():
    return FunctionPairDistribution.dirac(2, 2, (0, 0), (0, 1))


def dirac(i, n=4):
    out = np.zeros(n)
    out[i] = 1.0
    return out


def matching_pennies():
    u1 = np.array([[1.0, 0.0], [0.0, 1.0]])
    return Game(['h', 't'], ['h', 't'], u1, 1.0 - u1)


class TestCCE:

    def test_constant_game(self, rng):
        game = Game(['a', 'b'], ['c', 'd'], np.full((2, 2), 0.3), np.ones((2, 2)))
        verdict = is_cce(rng.dirichlet(np.ones(4)), game)
        assert verdict.is_equilibrium
        assert verdict.violations == []

    def test_example_is_not_a_cce(self, game):
        verdict = is_cce(JointDistribution.dirac(2, 2, 0, 0), game)
        assert not verdict.is_equilibrium
        assert verdict.witness is None
        [v] = verdict.violations
        assert (v.player, v.deviation) == (1, 1)
        assert v.slack == pytest.approx(0.25, abs=1e-15)

    def test_tolerance_flips_the_verdict(self, game):
        verdict = is_cce(JointDistribution.dirac(2, 2, 0, 0), game, tol=0.5)
        assert verdict.is_equilibrium
        assert verdict.max_slack() == pytest.approx(0.25)

    def test_matching_pennies(self):
        verdict = is_cce(np.full(4, 0.25), matching_pennies())
        assert verdict.is_equilibrium
        assert all(v.slack == pytest.approx(0.0, abs=1e-15) for v in verdict.slacks)

    def test_wrong_size(self, game):
        with pytest.raises(DimensionError):
            is_cce(np.full(6, 1 / 6), game)

    def test_find_cce(self, rng):
        for _ in range(5):
            game = random_game(rng, 2, 3)
            sigma = find_cce(game)
            assert is_cce(sigma, game).is_equilibrium
            welfare = game.utility_vector(1) + game.utility_vector(2)
            best = find_cce(game, objective=welfare)
            assert is_cce(best, game).is_equilibrium
            assert best @ welfare >= sigma @ welfare - 1e-9

    def test_to_dict(self, game):
        d = is_cce(JointDistribution.dirac(2, 2, 0, 0), game).to_dict(game)
        assert d['equilibrium'] is False
        assert d['witness'] is None
        assert d['violations'] == [{'player': 1, 'deviation': 'b', 'slack': 0.25}]


class TestPolicyEquilibrium:

    def test_example(self, game):
        verdict = is_policy_equilibrium(example_pi(), game)
        assert verdict.is_equilibrium
        assert np.allclose(verdict.witness, dirac(AC))
        assert expected_utility(verdict.witness, game, 1) == pytest.approx(0.75)
        sigma_b = verdict.deviations[1, 1]
        assert np.allclose(sigma_b, dirac(BD))
        assert expected_utility(sigma_b, game, 1) == pytest.approx(0.0)
        assert np.allclose(verdict.deviations[2, 1], dirac(AD))

    def test_constant_utilities(self, rng):
        game = Game(['a', 'b'], ['c', 'd'], np.full((2, 2), 0.5), np.ones((2, 2)))
        for _ in range(5):
            pi = FunctionPairDistribution(2, 2, rng.dirichlet(np.ones(16)))
            assert is_policy_equilibrium(pi, game).is_equilibrium

    def test_constant_functions_are_not(self, game):
        pi = FunctionPairDistribution.dirac(2, 2, (0, 0), (0, 0))
        verdict = is_policy_equilibrium(pi, game)
        assert not verdict.is_equilibrium
        assert verdict.witness is None
        [v] = verdict.violations
        assert (v.player, v.deviation) == (1, 1)
        assert v.slack == pytest.approx(0.25)
        assert np.allclose(verdict.deviations[1, 1], dirac(BC))

    def test_relabeling(self, game):
        # swap a and b: f now always plays index 1, g reads its input reversed
        swapped = game.relabel([1, 0], [0, 1])
        pi = FunctionPairDistribution.dirac(2, 2, (1, 1), (1, 0))
        verdict = is_policy_equilibrium(pi, swapped)
        assert verdict.is_equilibrium
        assert np.allclose(verdict.witness, dirac(BC))

    def test_joint_view(self, game):
        verdict = is_policy_equilibrium(example_pi().to_joint_view(), game)
        assert verdict.is_equilibrium
        assert np.allclose(verdict.witness, dirac(AC))

    def test_welfare_objective(self, game):
        verdict = is_policy_equilibrium(FunctionPairDistribution.uniform(2, 2), game,
                                        tol=1.0, objective='welfare')
        assert verdict.is_equilibrium
        with pytest.raises(ValidationError):
            is_policy_equilibrium(example_pi(), game, objective='other')

    def test_dimension_mismatch(self, rand_game):
        with pytest.raises(DimensionError):
            is_policy_equilibrium(example_pi(), rand_game)

    def test_reproducible(self, game, rng):
        pi = FunctionPairDistribution(2, 2, rng.dirichlet(np.ones(16)))
        a = is_policy_equilibrium(pi, game)
        b = is_policy_equilibrium(pi, game)
        assert [v.slack for v in a.slacks] == [v.slack for v in b.slacks]


def test_equilibrium_slack(game):
    same = dirac(AC)
    assert equilibrium_slack(same, {1: [same, same], 2: [same, same]}, game) == 0.0
    deviations = {1: [dirac(AC), dirac(BD)], 2: [dirac(AC), dirac(AD)]}
    assert equilibrium_slack(dirac(AC), deviations, game) == 0.0
    with pytest.raises(ValidationError):
        equilibrium_slack(same, {}, game)


def test_enumerate_function_pairs():
    assert len(list(enumerate_function_pairs(2, 2))) == 16
    assert list(enumerate_function_pairs(1, 1)) == [((0,), (0,))]
    pairs = list(enumerate_function_pairs(2, 3))
    assert len(pairs) == 72
    assert pairs[0] == ((0, 0, 0), (0, 0))


def test_brute_force_over_pure_pairs(game):
    # every pure pair whose stationary play gives player 1 less than a
    # constant deviation is rejected, and the verdict agrees with the slacks
    for f, g in enumerate_function_pairs(2, 2):
        verdict = is_policy_equilibrium(FunctionPairDistribution.dirac(2, 2, f, g), game)
        assert verdict.is_equilibrium == (not verdict.violations)


def test_cce_slacks_layout(game):
    slacks = cce_slacks(dirac(AC), game)
    assert [(v.player, v.deviation) for v in slacks] == [(1, 0), (1, 1), (2, 0), (2, 1)]


def test_verdict_invariants():
    ok = [Violation(1, 0, -0.1), Violation(2, 1, 1e-9)]
    EquilibriumVerdict(True, dirac(AC), [], ok, tol=1e-8)
    EquilibriumVerdict(False, None, [], [Violation(1, 0, 0.5)], tol=1e-8)
    with pytest.raises(InvariantError, match='witness'):
        EquilibriumVerdict(True, None, [], ok, tol=1e-8)
    with pytest.raises(InvariantError, match='slack'):
        EquilibriumVerdict(True, dirac(AC), [], [Violation(1, 0, 1e-6)], tol=1e-8)


def test_policy_witness_is_stationary(game, rng):
    for _ in range(10):
        pi = FunctionPairDistribution(2, 2, rng.dirichlet(np.full(16, 0.5)))
        verdict = is_policy_equilibrium(pi, game, tol=1e-8)
        if verdict.is_equilibrium:
            assert stationary_residual(induced_chain(pi), verdict.witness) <= 1e-10
        else:
            assert verdict.witness is None
