import json
import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from policy_dyn.errors import ValidationError, DimensionError
from policy_dyn.game import (Game, MixedStrategy, JointDistribution, check_simplex,
                             expected_utility, product_distribution, l1_distance,
                             mixing_weight, perturb_strategy, horizon_perturbation,
                             perturbation_penalty, spectral_norm)

probs = st.integers(2, 6).flatmap(
    lambda n: arrays(float, n, elements=st.floats(0.01, 1.0)).map(lambda a: a / a.sum()))


def test_expected_utility(game):
    ac = JointDistribution.dirac(2, 2, 0, 0)
    assert expected_utility(ac, game, 1) == 0.75
    assert expected_utility(ac, game, 2) == 1.0
    uniform = JointDistribution(np.full(4, 0.25), 2, 2)
    assert expected_utility(uniform, game, 1) == pytest.approx(0.4375, abs=1e-15)


def test_expected_utility_constant_game(rng):
    game = Game(['x', 'y'], ['z', 'w'], np.ones((2, 2)), np.zeros((2, 2)))
    sigma = rng.dirichlet(np.ones(4))
    assert expected_utility(sigma, game, 1) == pytest.approx(1.0)
    assert expected_utility(sigma, game, 2) == 0.0


@given(probs, probs, st.floats(0, 1))
def test_expected_utility_is_linear(p, q, lam):
    if len(p) != len(q):
        q = np.full(len(p), 1 / len(p))
    n = len(p)
    rng = np.random.default_rng(n)
    game = Game(['r%d' % i for i in range(n)], ['c'], rng.random((n, 1)), rng.random((n, 1)))
    for player in (1, 2):
        mixed = expected_utility(lam * p + (1 - lam) * q, game, player)
        parts = (lam * expected_utility(p, game, player) +
                 (1 - lam) * expected_utility(q, game, player))
        assert mixed == pytest.approx(parts, abs=1e-12)


def test_expected_utility_wrong_size(game):
    with pytest.raises(DimensionError) as exc:
        expected_utility(np.full(3, 1 / 3), game, 1)
    assert exc.value.expected == 4
    assert exc.value.actual == 3


def test_product_distribution():
    p = product_distribution(MixedStrategy.dirac(2, 0), MixedStrategy.dirac(2, 0))
    assert list(p.probs) == [1, 0, 0, 0]
    p = product_distribution(MixedStrategy.uniform(2), MixedStrategy.uniform(2))
    assert np.allclose(p.probs, 0.25)
    p = product_distribution([0.3, 0.7], [0.5, 0.5])
    assert np.allclose(p.probs, [0.15, 0.15, 0.35, 0.35], atol=1e-15)


@given(probs, probs)
def test_product_marginals(p1, p2):
    joint = product_distribution(p1, p2)
    assert np.allclose(joint.marginal(1), p1)
    assert np.allclose(joint.marginal(2), p2)


def test_l1_distance():
    assert l1_distance([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert l1_distance([1, 0], [0, 1]) == 2.0
    assert l1_distance([0.3, 0.7], [0.5, 0.5]) == pytest.approx(0.4)
    with pytest.raises(DimensionError):
        l1_distance([1, 0], [1, 0, 0])


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(*[
    arrays(float, n, elements=st.floats(0, 1)) for _ in range(3)])))
def test_l1_triangle_inequality(xyz):
    x, y, z = xyz
    assert l1_distance(x, z) <= l1_distance(x, y) + l1_distance(y, z) + 1e-12


def test_perturb_strategy():
    p = np.array([0.2, 0.8])
    assert np.array_equal(perturb_strategy(p, 0.0, 4).probs, p)
    mixed = perturb_strategy(MixedStrategy.dirac(2, 0), 0.25, 4)
    assert isinstance(mixed, MixedStrategy)
    assert np.allclose(mixed.probs, [0.5, 0.5])
    eps = horizon_perturbation(4096, 4)
    assert mixing_weight(eps, 4) == pytest.approx(8 ** -0.5, abs=1e-12)


@given(probs, st.floats(0.0, 0.25))
def test_perturb_strategy_stays_in_simplex(p, eps):
    q = perturb_strategy(p, eps, 4).probs
    check_simplex(q)
    assert q.min() >= mixing_weight(eps, 4) / len(p) - 1e-15


def test_mixing_weight_out_of_range():
    with pytest.raises(ValidationError):
        mixing_weight(0.5, 4)
    with pytest.raises(ValidationError):
        mixing_weight(-0.1, 4)


def test_perturbation_penalty():
    eps = horizon_perturbation(10000, 4)
    assert perturbation_penalty(10000, eps, 4) == pytest.approx(
        2 * 10000 * np.sqrt(4 * eps))
    assert perturbation_penalty(10000, 0.0, 4) == 0.0


def test_spectral_norm(game):
    assert spectral_norm(np.eye(2)) == pytest.approx(1.0, abs=1e-9)
    assert spectral_norm(np.ones((2, 2))) == pytest.approx(2.0, abs=1e-9)
    assert spectral_norm(game.u1) == pytest.approx(1.25, abs=1e-9)
    assert spectral_norm(np.zeros((2, 3))) == 0.0


def test_spectral_norm_matches_svd(rng):
    m = rng.random((3, 4))
    assert spectral_norm(m) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-8)


def test_spectral_norm_rejects_nan():
    with pytest.raises(ValidationError):
        spectral_norm([[np.nan, 0], [0, 1]])


class TestGame:

    def test_validation(self):
        with pytest.raises(ValidationError):
            Game(['a', 'a'], ['c'], [[0], [1]], [[0], [1]])
        with pytest.raises(ValidationError):
            Game(['a'], ['c'], [[1.5]], [[0]])
        with pytest.raises(DimensionError):
            Game(['a', 'b'], ['c'], [[0, 1]], [[0], [1]])

    def test_arrays_are_read_only(self, game):
        with pytest.raises(ValueError):
            game.u1[0, 0] = 0.5

    def test_payoff_orientation(self, rand_game):
        g = rand_game
        assert g.payoff(1).shape == (2, 3)
        assert g.payoff(2).shape == (3, 2)
        assert g.payoff(2)[1, 0] == g.u2[0, 1]

    def test_labels(self, game):
        assert game.joint_index(1, 0) == 2
        assert game.joint_label(2) == '(b,c)'
        assert game.action_index(2, 'd') == 1
        with pytest.raises(KeyError):
            game.action_index(1, 'z')

    def test_load(self, tmpdir, game):
        path = tmpdir.join('game.json')
        path.write(json.dumps(game.to_dict()))
        loaded = Game.load(path)
        assert loaded.actions1 == ('a', 'b')
        assert np.array_equal(loaded.u1, game.u1)

    def test_from_dict_missing_key(self):
        with pytest.raises(ValidationError, match='u2'):
            Game.from_dict({'actions1': ['a'], 'actions2': ['c'], 'u1': [[0]]})

    def test_relabel(self, rand_game):
        g = rand_game.relabel([1, 0], [2, 0, 1])
        assert g.actions1 == ('r1', 'r0')
        assert g.u1[0, 0] == rand_game.u1[1, 2]
        assert g.u2[1, 2] == rand_game.u2[0, 1]


def test_check_simplex():
    with pytest.raises(ValidationError):
        check_simplex([0.5, 0.6])
    with pytest.raises(ValidationError):
        check_simplex([1.5, -0.5])
    with pytest.raises(DimensionError):
        check_simplex([1.0], size=2)
    p = check_simplex([1 / 3] * 3, renormalize=True)
    assert p.sum() == pytest.approx(1.0, abs=1e-15)


def test_joint_distribution_load_renormalizes(tmpdir):
    path = tmpdir.join('sigma.json')
    raw = [0.5 + 4e-13, 0.5, 0.0, 0.0]
    path.write(json.dumps({'probs': raw}))
    sigma = JointDistribution.load(path, 2, 2)
    assert abs(sigma.probs.sum() - 1.0) <= 1e-15
    bare = JointDistribution.from_text(raw, 2, 2)
    assert np.array_equal(bare.probs, sigma.probs)
    with pytest.raises(DimensionError):
        JointDistribution.from_text(raw, 2, 3)
