"""
A single learner against the m-memory reactive utility: the fixed arm has
large external regret and no policy regret, the MWU arm the other way round.
"""
import logging
import attr
import numpy as np

from .. import conf
from ..errors import ConfigError
from ..learners import ReactiveUtility, mwu_state, mwu_step, strategy, inverse_cdf
from ..regret import PlayHistory, external_regret, policy_regret
from .config import derive_seed
from .report import IncompatRow

log = logging.getLogger(__name__)

ARMS = ('fixed', 'mwu')


@attr.s(frozen=True, eq=False)
class IncompatArm:
    arm = attr.ib()
    history = attr.ib(repr=False)
    memory = attr.ib()

    def external_regret(self, t=None):
        return external_regret(self._at(t), 1)

    def policy_regrets(self, t=None):
        hist = self._at(t)
        return [policy_regret(hist, 1, self.memory, a) for a in (0, 1)]

    def policy_regret(self, t=None):
        """
        Against the best constant action
        """
        return max(self.policy_regrets(t))

    def _at(self, t):
        return self.history if t is None else self.history.prefix(t)

    def rows(self, checkpoints):
        out = []
        for t in checkpoints:
            pol = self.policy_regrets(t)
            out.append(IncompatRow(self.arm, t, self.external_regret(t), max(pol), pol))
        return out


def play_fixed(rule, rounds, action=1):
    return PlayHistory.from_sequence(rule, np.full(rounds, action, dtype=int),
                                     strategies=np.tile(np.eye(2)[action], (rounds, 1)))


def play_mwu(rule, rounds, seed=0, eta_scale=1.0):
    """
    Full-information MWU: after each round it sees the utility both of its
    actions would have earned given its own past.
    """
    state = mwu_state(2, rounds, seed, eta_scale)
    actions = []
    strategies = np.empty((rounds, 2))
    for t in range(rounds):
        p = strategy(state)
        strategies[t] = p
        actions.append(inverse_cdf(p, state.stream.current()))
        past = rule.window(actions, t)[:-1]
        state, _ = mwu_step(state, [rule(past + (0,)), rule(past + (1,))])
    return PlayHistory.from_sequence(rule, actions, strategies=strategies)


def play_arms(rounds, memory, arms=ARMS, seed=0, eta_scale=1.0):
    """
    arm name -> IncompatArm
    """
    if memory < conf.MIN_REACTIVE_MEMORY:
        raise ConfigError('the incompatibility construction needs memory >= %d, got %d'
                          % (conf.MIN_REACTIVE_MEMORY, memory))
    if rounds < max(4, memory + 1):
        raise ConfigError('rounds must be >= max(4, memory + 1), got %d' % rounds)
    rule = ReactiveUtility(memory)
    out = {}
    for arm in arms:
        if arm == 'fixed':
            history = play_fixed(rule, rounds)
        elif arm == 'mwu':
            history = play_mwu(rule, rounds, derive_seed(seed, 0, 1), eta_scale)
        else:
            raise ConfigError('unknown arm %r, expected one of %s' % (arm, ', '.join(ARMS)))
        result = IncompatArm(arm, history, memory)
        log.info('%s arm: external regret %.4g, policy regret %.4g',
                 arm, result.external_regret(), result.policy_regret())
        out[arm] = result
    return out


@attr.s(eq=False)
class IncompatReport:
    config = attr.ib()
    rows = attr.ib(factory=list)
    arms = attr.ib(factory=dict, repr=False)

    def final(self, arm):
        return [r for r in self.rows if r.arm == arm][-1]

    def to_dict(self):
        return {'config': self.config,
                'checkpoints': [attr.asdict(r) for r in self.rows]}


def run_incompat(config, arms=ARMS):
    """
    Play every arm of ``arms`` for the rounds and memory of ``config``; one
    row per arm and checkpoint.
    """
    if config.mode != 'incompat':
        raise ConfigError('expected an incompat config, got mode %r' % config.mode)
    results = play_arms(config.rounds, config.memory, arms, config.seed,
                        config.learner1.eta_scale)
    rows = []
    for arm in arms:
        rows.extend(results[arm].rows(config.checkpoints))
    return IncompatReport(config.to_dict(), rows, results)
