"""
Certification of coarse correlated equilibria and policy equilibria.
"""
import itertools
import logging
import attr
import numpy as np

from . import conf
from .errors import DimensionError, InvariantError, ValidationError
from .game import check_simplex, expected_utility
from .markov import (INFEASIBLE, check_function_space, function_tables,
                     induced_chain, deviation_chain, deviation_stationary,
                     ergodic_projector, solve_constrained_stationary)
from .simplex import linprog

log = logging.getLogger(__name__)


@attr.s(frozen=True)
class Violation:
    player = attr.ib()
    deviation = attr.ib()       # action index
    slack = attr.ib()           # E_deviation[u] - E_sigma[u]


@attr.s(frozen=True, eq=False)
class EquilibriumVerdict:
    is_equilibrium = attr.ib()
    witness = attr.ib(repr=False)
    violations = attr.ib(factory=list)
    slacks = attr.ib(factory=list, repr=False)
    # (player, action) -> distribution reached by that deviation
    deviations = attr.ib(factory=dict, repr=False)
    tol = attr.ib(default=conf.EXACT_TOL)

    def __attrs_post_init__(self):
        if not self.is_equilibrium:
            return
        if self.witness is None:
            raise InvariantError('equilibrium verdict without a witness')
        worst = max((v.slack for v in self.slacks), default=None)
        if worst is not None and worst > self.tol:
            raise InvariantError('equilibrium verdict with slack %.3e above tol %.3e'
                                 % (worst, self.tol))

    def max_slack(self):
        return max(v.slack for v in self.slacks)

    def to_dict(self, game):
        return {
            'equilibrium': bool(self.is_equilibrium),
            'witness': None if self.witness is None else list(map(float, self.witness)),
            'violations': [{'player': v.player,
                            'deviation': game.actions(v.player)[v.deviation],
                            'slack': float(v.slack)}
                           for v in self.violations],
        }


def _check_sigma(sigma, game):
    return check_simplex(getattr(sigma, 'probs', sigma), 'joint distribution',
                         size=game.joint_size)


def _verdict(feasible, witness, slacks, tol, deviations=None):
    violations = [v for v in slacks if v.slack > tol]
    return EquilibriumVerdict(feasible, witness if feasible else None,
                              violations, slacks, deviations or {}, tol)


def cce_slacks(sigma, game):
    s = _check_sigma(sigma, game).reshape(game.n1, game.n2)
    marg1, marg2 = s.sum(axis=1), s.sum(axis=0)
    value1 = expected_utility(s.ravel(), game, 1)
    value2 = expected_utility(s.ravel(), game, 2)
    slacks = [Violation(1, a, float(game.u1[a, :] @ marg2 - value1))
              for a in range(game.n1)]
    slacks += [Violation(2, b, float(marg1 @ game.u2[:, b] - value2))
               for b in range(game.n2)]
    return slacks


def is_cce(sigma, game, tol=conf.EXACT_TOL):
    """
    No player gains more than ``tol`` by committing to a fixed action while
    the opponent keeps playing its marginal of sigma.
    """
    slacks = cce_slacks(sigma, game)
    ok = all(v.slack <= tol for v in slacks)
    return _verdict(ok, _check_sigma(sigma, game), slacks, tol)


def cce_constraints(game):
    """
    Rows c with c.sigma >= 0 for every CCE sigma, one per (player, action)
    """
    rows = []
    for a in range(game.n1):
        rows.append((game.u1 - game.u1[a, :][None, :]).ravel())
    for b in range(game.n2):
        rows.append((game.u2 - game.u2[:, b][:, None]).ravel())
    return np.array(rows)


def find_cce(game, objective=None):
    """
    A vertex of the CCE polytope maximizing ``objective`` (a vector over joint
    actions; None returns any CCE).
    """
    C = cce_constraints(game)
    result = linprog(objective, -C, np.zeros(len(C)), np.ones((1, game.joint_size)),
                     [1.0], n=game.joint_size)
    if not result.feasible:
        # a CCE always exists: this is a numerical failure
        return INFEASIBLE
    sigma = np.clip(result.x, 0.0, None)
    return sigma / sigma.sum()


def _deviation_projectors(pi):
    """
    (player, action) -> matrix whose row x is the long-run distribution of the
    deviation chain started from x
    """
    out = {}
    dim = pi.n1 * pi.n2
    for player, n in ((1, pi.n1), (2, pi.n2)):
        for action in range(n):
            if pi.view == 'opponent':
                sigma_dev = deviation_stationary(pi, player, action)
                out[player, action] = np.tile(sigma_dev, (dim, 1))
            else:
                _, M_dev = deviation_chain(pi, player, action)
                out[player, action] = ergodic_projector(M_dev)
    return out


def is_policy_equilibrium(pi, game, tol=conf.EXACT_TOL, objective=None):
    """
    Search the stationary distributions of the chain induced by ``pi`` for one
    that no constant deviation of either player beats by more than ``tol``.

    ``objective`` may be 'welfare' to return the witness maximizing
    E[u1] + E[u2] among the feasible ones.
    """
    if (pi.n1, pi.n2) != (game.n1, game.n2):
        raise DimensionError('function pair distribution', (game.n1, game.n2),
                             (pi.n1, pi.n2))
    if objective == 'welfare':
        objective = game.utility_vector(1) + game.utility_vector(2)
    elif objective is not None:
        raise ValidationError('unknown objective %r' % (objective,))
    M = induced_chain(pi)
    projectors = _deviation_projectors(pi)
    # keep the LP strictly inside the tolerance so neither round-off nor the
    # stationary projection pushes a witness over it
    bound = -tol + min(tol / 10.0, conf.LP_WITNESS_MARGIN)
    constraints = []
    for (player, action), proj in projectors.items():
        u = game.utility_vector(player)
        constraints.append((u - proj @ u, bound))
    sigma = solve_constrained_stationary(M, constraints, objective)
    feasible = sigma is not INFEASIBLE
    if not feasible:
        # report the violations of an unconstrained stationary point
        sigma = solve_constrained_stationary(M, (), objective)
    slacks = []
    deviations = {}
    for (player, action), proj in projectors.items():
        sigma_dev = sigma @ proj
        deviations[player, action] = sigma_dev
        slack = (expected_utility(sigma_dev, game, player) -
                 expected_utility(sigma, game, player))
        slacks.append(Violation(player, action, float(slack)))
    if feasible and any(v.slack > tol for v in slacks):
        log.warning('LP witness violates a deviation by %.3e',
                    max(v.slack for v in slacks) - tol)
        feasible = False
    log.debug('policy equilibrium check: %s', 'feasible' if feasible else 'infeasible')
    return _verdict(feasible, sigma, slacks, tol, deviations)


def equilibrium_slack(sigma_hat, deviation_sigmas, game):
    """
    max over players and deviations of E_deviation[u_player] - E_sigma_hat[u_player]
    """
    best = None
    for player in (1, 2):
        value = expected_utility(getattr(sigma_hat, 'probs', sigma_hat), game, player)
        for sigma_dev in deviation_sigmas.get(player, ()):
            s = expected_utility(getattr(sigma_dev, 'probs', sigma_dev), game, player) - value
            best = s if best is None else max(best, s)
    if best is None:
        raise ValidationError('equilibrium_slack needs at least one deviation')
    return float(best)


def enumerate_function_pairs(n1, n2, view='opponent', cap=conf.FUNCTION_SPACE_CAP):
    """
    Yield (f table, g table) for every function pair, in index order
    """
    check_function_space(n1, n2, view, cap)
    n_in1, n_in2 = (n2, n1) if view == 'opponent' else (n1 * n2, n1 * n2)
    F = [tuple(int(a) for a in f) for f in function_tables(n1, n_in1)]
    G = [tuple(int(b) for b in g) for g in function_tables(n2, n_in2)]
    return itertools.product(F, G)
