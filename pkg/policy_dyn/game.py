"""
Bimatrix games and the distributions played on them.

Joint actions are indexed in row-major order with player 1 major: the joint
action (i, j) has index ``i * n2 + j``. Every module relies on this layout.
"""
import json
import logging
import attr
import numpy as np
import py

from . import conf
from .errors import ValidationError, DimensionError, ConvergenceError

log = logging.getLogger(__name__)


def check_simplex(probs, what='distribution', size=None, renormalize=False):
    """
    Return ``probs`` as a float array after checking that it is a probability
    vector. With ``renormalize=True`` the vector is divided by its sum once,
    which is what we do for vectors that went through a text round-trip.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1:
        raise ValidationError('%s must be a vector, got shape %s' % (what, p.shape))
    if size is not None and p.shape[0] != size:
        raise DimensionError(what, size, p.shape[0])
    if not np.all(np.isfinite(p)):
        raise ValidationError('%s contains non-finite entries' % what)
    if p.min() < -conf.SIMPLEX_TOL:
        raise ValidationError('%s has a negative entry: %r' % (what, p.min()))
    total = p.sum()
    if abs(total - 1.0) > conf.SIMPLEX_TOL:
        raise ValidationError('%s sums to %r, not 1' % (what, total))
    if renormalize:
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
    return p


def _probs(x):
    return x.probs if isinstance(x, (MixedStrategy, JointDistribution)) else x


@attr.s(frozen=True, eq=False)
class MixedStrategy:
    probs = attr.ib(converter=lambda p: check_simplex(p, 'mixed strategy'))

    @classmethod
    def dirac(cls, n, action):
        if not 0 <= action < n:
            raise ValidationError('action %d out of range for %d actions' % (action, n))
        probs = np.zeros(n)
        probs[action] = 1.0
        return cls(probs)

    @classmethod
    def uniform(cls, n):
        return cls(np.full(n, 1.0 / n))

    def __len__(self):
        return len(self.probs)


@attr.s(frozen=True, eq=False)
class JointDistribution:
    probs = attr.ib()
    n1 = attr.ib()
    n2 = attr.ib()

    def __attrs_post_init__(self):
        p = check_simplex(self.probs, 'joint distribution', size=self.n1 * self.n2)
        object.__setattr__(self, 'probs', p)

    @classmethod
    def dirac(cls, n1, n2, i, j):
        probs = np.zeros(n1 * n2)
        probs[i * n2 + j] = 1.0
        return cls(probs, n1, n2)

    def as_matrix(self):
        return self.probs.reshape(self.n1, self.n2)

    def marginal(self, player):
        m = self.as_matrix()
        return m.sum(axis=1) if player == 1 else m.sum(axis=0)

    @classmethod
    def from_text(cls, data, n1, n2):
        """
        From parsed JSON: either {"probs": [...]} or a bare list. The vector is
        renormalized once.
        """
        probs = data['probs'] if isinstance(data, dict) else data
        return cls(check_simplex(probs, 'joint distribution', size=n1 * n2,
                                 renormalize=True), n1, n2)

    @classmethod
    def load(cls, path, n1, n2):
        return cls.from_text(json.loads(py.path.local(path).read()), n1, n2)


@attr.s(frozen=True, eq=False)
class Game:
    actions1 = attr.ib(converter=tuple)
    actions2 = attr.ib(converter=tuple)
    u1 = attr.ib(repr=False)
    u2 = attr.ib(repr=False)

    def __attrs_post_init__(self):
        for name in ('actions1', 'actions2'):
            labels = getattr(self, name)
            if len(labels) < 1:
                raise ValidationError('%s must not be empty' % name)
            if len(set(labels)) != len(labels):
                raise ValidationError('%s has duplicate labels: %r' % (name, labels))
        shape = (len(self.actions1), len(self.actions2))
        for name in ('u1', 'u2'):
            u = np.array(getattr(self, name), dtype=float)
            if u.shape != shape:
                raise DimensionError(name, shape, u.shape)
            if not np.all(np.isfinite(u)) or u.min() < 0.0 or u.max() > 1.0:
                raise ValidationError('%s has entries outside [0, 1]' % name)
            u.setflags(write=False)
            object.__setattr__(self, name, u)

    @property
    def n1(self):
        return len(self.actions1)

    @property
    def n2(self):
        return len(self.actions2)

    @property
    def joint_size(self):
        return self.n1 * self.n2

    def actions(self, player):
        return self.actions1 if player == 1 else self.actions2

    def utility(self, player):
        check_player(player)
        return self.u1 if player == 1 else self.u2

    def payoff(self, player):
        """
        The utility matrix of ``player`` oriented as [own action][opponent action]
        """
        return self.u1 if player == 1 else self.u2.T

    def utility_vector(self, player):
        """
        u_player over the joint index, i.e. the row-major flattening
        """
        return self.utility(player).ravel()

    def joint_index(self, i, j):
        return i * self.n2 + j

    def joint_label(self, index):
        i, j = divmod(index, self.n2)
        return '(%s,%s)' % (self.actions1[i], self.actions2[j])

    def action_index(self, player, label):
        labels = self.actions(player)
        try:
            return labels.index(label)
        except ValueError:
            raise KeyError('player %d has no action %r' % (player, label))

    def relabel(self, perm1, perm2):
        """
        Return the game whose action ``k`` of player 1 is ``perm1[k]`` of self
        (same for player 2)
        """
        perm1 = list(perm1)
        perm2 = list(perm2)
        return Game([self.actions1[k] for k in perm1],
                    [self.actions2[k] for k in perm2],
                    self.u1[np.ix_(perm1, perm2)],
                    self.u2[np.ix_(perm1, perm2)])

    def to_dict(self):
        return {'actions1': list(self.actions1),
                'actions2': list(self.actions2),
                'u1': self.u1.tolist(),
                'u2': self.u2.tolist()}

    @classmethod
    def from_dict(cls, d):
        missing = {'actions1', 'actions2', 'u1', 'u2'} - set(d)
        if missing:
            raise ValidationError('game description is missing %s' % ', '.join(sorted(missing)))
        return cls(d['actions1'], d['actions2'], d['u1'], d['u2'])

    @classmethod
    def load(cls, path):
        path = py.path.local(path)
        log.debug('loading game from %s', path)
        return cls.from_dict(json.loads(path.read()))


def check_player(player):
    if player not in (1, 2):
        raise ValidationError('player must be 1 or 2, got %r' % (player,))


def expected_utility(sigma, game, player):
    """
    E_{(a,b)~sigma}[u_player(a,b)]
    """
    p = np.asarray(_probs(sigma), dtype=float)
    if p.shape != (game.joint_size,):
        raise DimensionError('joint distribution', game.joint_size, p.size)
    return float(p @ game.utility_vector(player))


def product_distribution(p1, p2):
    p1 = check_simplex(_probs(p1), 'p1')
    p2 = check_simplex(_probs(p2), 'p2')
    return JointDistribution(np.outer(p1, p2).ravel(), len(p1), len(p2))


def l1_distance(x, y):
    x = np.asarray(_probs(x), dtype=float)
    y = np.asarray(_probs(y), dtype=float)
    if x.shape != y.shape:
        raise DimensionError('l1_distance', x.shape, y.shape)
    return float(np.abs(x - y).sum())


def mixing_weight(epsilon_tilde, joint_size):
    w = np.sqrt(joint_size * epsilon_tilde) if epsilon_tilde >= 0 else np.nan
    if not 0.0 <= w <= 1.0:
        raise ValidationError('perturbation mixing weight %r is outside [0, 1]' % w)
    return float(w)


def perturb_strategy(p, epsilon_tilde, joint_size):
    """
    Mix ``p`` with the uniform distribution using weight sqrt(|A| eps)
    """
    p = np.asarray(_probs(p), dtype=float)
    w = mixing_weight(epsilon_tilde, joint_size)
    return MixedStrategy((1.0 - w) * p + w / len(p))


def horizon_perturbation(T, joint_size):
    """
    The perturbation size T^(-1/4) / |A| that makes observed and strategy
    level empirical chains agree asymptotically.
    """
    return T ** -0.25 / joint_size


def perturbation_penalty(T, epsilon_tilde, joint_size):
    """
    Upper bound on the regret added by playing perturbed strategies for T
    rounds.
    """
    return 2.0 * T * mixing_weight(epsilon_tilde, joint_size)


def spectral_norm(matrix):
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or not np.all(np.isfinite(m)):
        raise ValidationError('spectral_norm needs a finite 2-d matrix')
    gram = m.T @ m
    # fixed start vector: results must be reproducible
    v = np.random.default_rng(0).standard_normal(gram.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    residual = np.inf
    for _ in range(conf.SPECTRAL_MAX_ITER):
        w = gram @ v
        new_lam = np.linalg.norm(w)
        if new_lam == 0.0:
            return 0.0
        v = w / new_lam
        residual = abs(new_lam - lam) / new_lam
        lam = new_lam
        if residual <= conf.SPECTRAL_TOL:
            return float(np.sqrt(lam))
    raise ConvergenceError('power iteration did not converge', v, residual)
