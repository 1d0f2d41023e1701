"""
Markov chains over the joint action space A = A1 x A2.

States use the joint index of policy_dyn.game. Response functions come in two
views:

  - ``opponent``: f maps player 2's previous action to player 1's next one,
    g maps player 1's previous action to player 2's next one;
  - ``joint``: f and g both read the whole previous joint action.

A function is stored as its table of outputs over the inputs in canonical
order; its index is that table read as a base-n numeral, first input most
significant. The pair (f, g) has index ``f_index * |F2| + g_index``.
"""
import itertools
import json
import logging
import attr
import numpy as np
import py

from . import conf
from .errors import (ValidationError, DimensionError, FunctionSpaceTooLarge,
                     ConvergenceError, InvariantError)
from .game import check_simplex, check_player
from .simplex import linprog

log = logging.getLogger(__name__)

VIEWS = ('opponent', 'joint')


class _Infeasible:

    def __repr__(self):
        return 'INFEASIBLE'

    def __bool__(self):
        return False


INFEASIBLE = _Infeasible()


@attr.s(frozen=True, eq=False)
class TransitionMatrix:
    rows = attr.ib(repr=False)
    dead_states = attr.ib(default=(), converter=tuple)

    def __attrs_post_init__(self):
        M = np.array(self.rows, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValidationError('transition matrix must be square, got shape %s'
                                  % (M.shape,))
        if M.min() < 0.0 or np.abs(M.sum(axis=1) - 1.0).max() > conf.ROW_TOL:
            raise ValidationError('transition matrix is not row-stochastic')
        M.setflags(write=False)
        object.__setattr__(self, 'rows', M)

    @property
    def dim(self):
        return self.rows.shape[0]

    def to_dict(self):
        return {'dim': self.dim, 'rows': self.rows.tolist()}

    @classmethod
    def from_dict(cls, d):
        M = cls(d['rows'])
        if M.dim != d.get('dim', M.dim):
            raise DimensionError('transition matrix', d['dim'], M.dim)
        return M


def function_space_sizes(n1, n2, view='opponent'):
    """
    (|F1|, |F2|) for the given view
    """
    if view not in VIEWS:
        raise ValidationError('unknown function view %r' % (view,))
    if view == 'opponent':
        return n1 ** n2, n2 ** n1
    return n1 ** (n1 * n2), n2 ** (n1 * n2)


def check_function_space(n1, n2, view='opponent', cap=conf.FUNCTION_SPACE_CAP):
    s1, s2 = function_space_sizes(n1, n2, view)
    if s1 * s2 > cap:
        raise FunctionSpaceTooLarge(s1 * s2, cap)
    return s1, s2


def function_tables(n_out, n_in):
    """
    All maps from n_in inputs to n_out outputs, one table per row, in index
    order
    """
    return np.array(list(itertools.product(range(n_out), repeat=n_in)),
                    dtype=int).reshape(n_out ** n_in, n_in)


def constant_function_index(n_out, n_in, action):
    return sum(action * n_out ** k for k in range(n_in))


@attr.s(frozen=True, eq=False)
class FunctionPairDistribution:
    n1 = attr.ib()
    n2 = attr.ib()
    probs = attr.ib(repr=False)
    view = attr.ib(default='opponent')
    cap = attr.ib(default=conf.FUNCTION_SPACE_CAP, repr=False)

    def __attrs_post_init__(self):
        s1, s2 = check_function_space(self.n1, self.n2, self.view, self.cap)
        p = check_simplex(self.probs, 'function pair distribution', size=s1 * s2)
        object.__setattr__(self, 'probs', p)

    @property
    def sizes(self):
        return function_space_sizes(self.n1, self.n2, self.view)

    def as_matrix(self):
        return self.probs.reshape(self.sizes)

    def marginal(self, player):
        m = self.as_matrix()
        return m.sum(axis=1) if player == 1 else m.sum(axis=0)

    def tables(self):
        return next_action_tables(self.n1, self.n2, self.view)

    def successors(self):
        return successor_states(self.n1, self.n2, self.view)

    def to_joint_view(self):
        if self.view == 'joint':
            return self
        n1, n2 = self.n1, self.n2
        F, G = self.tables()
        # index of each opponent-view function inside the joint-view space
        f_idx = F @ (n1 ** np.arange(n1 * n2)[::-1])
        g_idx = G @ (n2 ** np.arange(n1 * n2)[::-1])
        s1, s2 = function_space_sizes(n1, n2, 'joint')
        probs = np.zeros(s1 * s2)
        np.add.at(probs, (f_idx[:, None] * s2 + g_idx[None, :]).ravel(), self.probs)
        return FunctionPairDistribution(n1, n2, probs, 'joint', self.cap)

    @classmethod
    def dirac(cls, n1, n2, f_table, g_table, view='opponent'):
        s1, s2 = check_function_space(n1, n2, view)
        f_index = _table_index(f_table, n1)
        g_index = _table_index(g_table, n2)
        probs = np.zeros(s1 * s2)
        probs[f_index * s2 + g_index] = 1.0
        return cls(n1, n2, probs, view)

    @classmethod
    def uniform(cls, n1, n2, view='opponent'):
        s1, s2 = check_function_space(n1, n2, view)
        return cls(n1, n2, np.full(s1 * s2, 1.0 / (s1 * s2)), view)

    def to_dict(self):
        d = {'n1': self.n1, 'n2': self.n2, 'probs': self.probs.tolist()}
        if self.view != 'opponent':
            d['view'] = self.view
        return d

    @classmethod
    def from_dict(cls, d):
        s1, s2 = check_function_space(d['n1'], d['n2'], d.get('view', 'opponent'))
        probs = check_simplex(d['probs'], 'function pair distribution',
                              size=s1 * s2, renormalize=True)
        return cls(d['n1'], d['n2'], probs, d.get('view', 'opponent'))

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(py.path.local(path).read()))


def next_action_tables(n1, n2, view):
    """
    (F, G): next-action tables of every f and every g, indexed by the
    function index and then by the *joint* state
    """
    if view == 'joint':
        return function_tables(n1, n1 * n2), function_tables(n2, n1 * n2)
    f = function_tables(n1, n2)     # f[b]
    g = function_tables(n2, n1)     # g[a]
    states = np.arange(n1 * n2)
    return f[:, states % n2], g[:, states // n2]


def successor_states(n1, n2, view):
    """
    S[k, x]: the state the function pair with index k sends state x to
    """
    F, G = next_action_tables(n1, n2, view)
    S = F[:, None, :] * n2 + G[None, :, :]
    return S.reshape(-1, n1 * n2)


def _table_index(table, n_out):
    index = 0
    for a in table:
        if not 0 <= a < n_out:
            raise ValidationError('function output %r out of range' % (a,))
        index = index * n_out + int(a)
    return index


def _finish_rows(N, D):
    """
    Divide the weights N by the visit weights D; rows with no weight become a
    self-loop and are reported as dead.
    """
    dim = len(D)
    rows = np.zeros((dim, dim))
    dead = []
    for i in range(dim):
        if D[i] > 0.0 and N[i].sum() > 0.0:
            rows[i] = N[i] / D[i]
            rows[i] /= rows[i].sum()
        else:
            rows[i, i] = 1.0
            dead.append(i)
    return TransitionMatrix(rows, dead)


def _strategy_array(strategies):
    P = np.array([getattr(p, 'probs', p) for p in strategies], dtype=float)
    if P.ndim != 2 or len(P) == 0:
        raise ValidationError('need a non-empty sequence of joint distributions')
    return P


def empirical_chain(strategies, lagged=False):
    """
    M[i, j] = sum_t p_t(i) p_t(j) / sum_t p_t(i) (same-t products), or
    sum_t p_{t-1}(i) p_t(j) / sum_t p_{t-1}(i) with ``lagged=True``.
    """
    P = _strategy_array(strategies)
    if lagged:
        if len(P) < 2:
            raise ValidationError('the lagged chain needs at least two rounds')
        N = P[:-1].T @ P[1:]
        return _finish_rows(N, N.sum(axis=1))
    return _finish_rows(P.T @ P, P.sum(axis=0))


def joint_actions(history):
    return history.actions1 * history.game.n2 + history.actions2


def observed_chain(history):
    """
    Transition counts between consecutive realized joint actions
    """
    if history.T < 2:
        raise ValidationError('the observed chain needs at least two rounds')
    x = joint_actions(history)
    dim = history.game.joint_size
    C = np.zeros((dim, dim))
    np.add.at(C, (x[:-1], x[1:]), 1.0)
    return _finish_rows(C, C.sum(axis=1))


def induced_chain(pi):
    dim = pi.n1 * pi.n2
    S = pi.successors()
    rows = np.array([np.bincount(S[:, x], weights=pi.probs, minlength=dim)
                     for x in range(dim)])
    return TransitionMatrix(rows)


def deviation_chain(pi, player, action):
    """
    Player ``player`` replaces its function by the constant ``action``; the
    other player's functions keep their marginal.
    """
    check_player(player)
    n = pi.n1 if player == 1 else pi.n2
    if not 0 <= action < n:
        raise ValidationError('action %r out of range for player %d' % (action, player))
    s1, s2 = pi.sizes
    probs = np.zeros((s1, s2))
    if player == 1:
        c = constant_function_index(pi.n1, _inputs(pi, 1), action)
        probs[c, :] = pi.marginal(2)
    else:
        c = constant_function_index(pi.n2, _inputs(pi, 2), action)
        probs[:, c] = pi.marginal(1)
    dev = FunctionPairDistribution(pi.n1, pi.n2, probs.ravel(), pi.view, pi.cap)
    return dev, induced_chain(dev)


def _inputs(pi, player):
    if pi.view == 'joint':
        return pi.n1 * pi.n2
    return pi.n2 if player == 1 else pi.n1


def stationary_residual(M, sigma):
    M = getattr(M, 'rows', M)
    s = np.asarray(getattr(sigma, 'probs', sigma), dtype=float)
    if s.shape != (M.shape[0],):
        raise DimensionError('stationary_residual', M.shape[0], s.size)
    return float(np.abs(s @ M - s).sum())


def ergodic_projector(M):
    """
    lim (1/K) sum_k M^k, computed as the limit of powers of the lazy chain
    (I + M) / 2, which has the same stationary distributions and is aperiodic.
    Row x of the result is the long-run distribution started from x.
    """
    M = getattr(M, 'rows', M)
    P = 0.5 * (np.eye(M.shape[0]) + M)
    for _ in range(conf.PROJECTOR_SQUARINGS):
        P = P @ P
        P /= P.sum(axis=1, keepdims=True)
    residual = max(np.abs(P @ M - P).max(), np.abs(P @ P - P).max())
    if residual > conf.PROJECTOR_TOL:
        raise ConvergenceError('ergodic projector did not converge', P, residual)
    return P


def deviation_stationary(pi, player, action, start=None):
    """
    The stationary distribution reached when ``player`` switches to the
    constant ``action``.

    On the opponent view it does not depend on where play starts: all mass
    sits on the deviator's action and the other coordinate is distributed as
    the other player's response to it. On the joint view the long-run
    distribution depends on the starting distribution ``start``.
    """
    _, M_dev = deviation_chain(pi, player, action)
    n1, n2 = pi.n1, pi.n2
    if pi.view == 'opponent':
        F, G = pi.tables()
        sigma = np.zeros((n1, n2))
        if player == 1:
            # g's response to `action`: column of any state (action, .)
            col = G[:, action * n2]
            sigma[action, :] = np.bincount(col, weights=pi.marginal(2), minlength=n2)
        else:
            col = F[:, action]
            sigma[:, action] = np.bincount(col, weights=pi.marginal(1), minlength=n1)
        sigma = sigma.ravel()
    else:
        if start is None:
            raise ValidationError('joint-view deviations need a start distribution')
        start = check_simplex(getattr(start, 'probs', start), 'start', size=n1 * n2)
        sigma = start @ ergodic_projector(M_dev)
    residual = stationary_residual(M_dev, sigma)
    if residual > conf.CERTIFY_TOL:
        raise InvariantError('deviation distribution is not stationary '
                             '(residual %.3e)' % residual)
    return sigma


def empirical_function_distribution(strategies, n1=None, n2=None,
                                    cap=conf.FUNCTION_SPACE_CAP):
    """
    pi_hat(f, g) = prod_x M_hat[x, (f(x), g(x))] on the joint view, where M_hat
    is the same-t empirical chain (dead states keep their self-loop). Its
    induced chain is exactly M_hat.

    ``strategies`` are JointDistributions, or plain vectors together with
    ``n1`` and ``n2``.
    """
    if n1 is None:
        first = strategies[0]
        if not hasattr(first, 'n1'):
            raise ValidationError('pass n1 and n2 with plain strategy vectors')
        n1, n2 = first.n1, first.n2
    P = _strategy_array(strategies)
    dim = P.shape[1]
    if dim != n1 * n2:
        raise DimensionError('joint strategies', n1 * n2, dim)
    check_function_space(n1, n2, 'joint', cap)
    M = empirical_chain(P).rows
    S = successor_states(n1, n2, 'joint')
    probs = np.prod(M[np.arange(dim)[None, :], S], axis=1)
    return FunctionPairDistribution(n1, n2, probs, 'joint', cap)


def stationary_constraints(M, slack=conf.LP_STATIONARY_SLACK):
    """
    sigma^T M = sigma as a pair of inequality blocks with ``slack``
    """
    M = getattr(M, 'rows', M)
    D = M.T - np.eye(M.shape[0])
    A_ub = np.vstack([D, -D])
    b_ub = np.full(2 * M.shape[0], slack)
    return A_ub, b_ub


def solve_constrained_stationary(M, linear_inequalities=(), objective=None):
    """
    Find sigma >= 0, sum(sigma) = 1, stationary for M and with c.sigma >= r for
    every (c, r) in ``linear_inequalities``. ``objective`` (a vector over
    states) picks the feasible point maximizing it. Returns INFEASIBLE if no
    such sigma exists.
    """
    M = getattr(M, 'rows', M)
    dim = M.shape[0]
    A_ub, b_ub = stationary_constraints(M)
    extra_A = [-np.asarray(c, dtype=float) for c, r in linear_inequalities]
    extra_b = [-float(r) for c, r in linear_inequalities]
    if extra_A:
        A_ub = np.vstack([A_ub, np.array(extra_A).reshape(-1, dim)])
        b_ub = np.concatenate([b_ub, extra_b])
    result = linprog(objective, A_ub, b_ub, np.ones((1, dim)), [1.0], n=dim)
    log.debug('constrained stationary LP: %s after %d pivots',
              result.status, result.iterations)
    if not result.feasible:
        return INFEASIBLE
    sigma = np.clip(result.x, 0.0, None)
    return project_stationary(M, sigma / sigma.sum())


def project_stationary(M, sigma):
    """
    Move ``sigma``, stationary for M only up to the LP slack, onto a stationary
    distribution through the ergodic projector. Raises InvariantError if the
    result still misses CERTIFY_TOL.
    """
    M = getattr(M, 'rows', M)
    sigma = np.asarray(getattr(sigma, 'probs', sigma), dtype=float)
    if stationary_residual(M, sigma) <= conf.CERTIFY_TOL:
        return sigma
    projected = np.clip(sigma @ ergodic_projector(M), 0.0, None)
    projected /= projected.sum()
    residual = stationary_residual(M, projected)
    if residual > conf.CERTIFY_TOL:
        raise InvariantError('LP point is not stationary after projection '
                             '(residual %.3e)' % residual)
    log.debug('projected LP point onto the stationary set (moved %.3e)',
              np.abs(projected - sigma).sum())
    return projected
