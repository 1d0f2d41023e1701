"""
Run configuration, loaded from JSON.
"""
import json
import logging
import os
import attr
import numpy as np
import py

from .. import conf
from ..errors import ConfigError, ValidationError
from ..game import Game, check_simplex, horizon_perturbation
from ..learners import (Agent, LearnerKind, mwu_state, exp3_state, fixed_state,
                        response_state, tracker_state)

log = logging.getLogger(__name__)

MODES = ('selfplay', 'incompat', 'check-eq', 'example')
PUBLIC_STREAM = 0x9b1c


def derive_seed(*parts):
    """
    A 64-bit seed determined by ``parts``; used to give every stream of a run
    its own seed while keeping the whole run a function of the run seed.
    """
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(
        1, dtype=np.uint64)[0])


def _check_keys(d, allowed, what):
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError('unknown %s field(s): %s' % (what, ', '.join(sorted(unknown))))


@attr.s(frozen=True)
class LearnerConfig:
    algo = attr.ib()
    seed = attr.ib(default=0)
    eta_scale = attr.ib(default=1.0)
    gamma_scale = attr.ib(default=1.0)
    target = attr.ib(default=None, repr=False)

    FIELDS = ('algo', 'seed', 'eta_scale', 'gamma_scale', 'target')

    @algo.validator
    def _check_algo(self, attribute, value):
        self.parse_algo(value)

    @staticmethod
    def parse_algo(algo):
        """
        'mwu' | 'exp3' | 'cce-track' | 'fixed:<i>' | 'response:<initial>:<t0>,<t1>,...'
        -> (LearnerKind, arguments)
        """
        if not isinstance(algo, str):
            raise ConfigError('algo must be a string, got %r' % (algo,))
        head, _, rest = algo.partition(':')
        try:
            kind = LearnerKind(head)
        except ValueError:
            raise ConfigError('unknown algo %r' % (algo,))
        try:
            if kind is LearnerKind.FIXED:
                return kind, (int(rest),)
            if kind is LearnerKind.RESPONSE:
                initial, _, table = rest.partition(':')
                return kind, (int(initial), tuple(int(a) for a in table.split(',')))
        except ValueError:
            raise ConfigError('cannot parse algo %r' % (algo,))
        if rest:
            raise ConfigError('algo %r takes no argument' % (algo,))
        return kind, ()

    @property
    def kind(self):
        return self.parse_algo(self.algo)[0]

    @classmethod
    def from_dict(cls, d):
        if isinstance(d, str):
            d = {'algo': d}
        _check_keys(d, cls.FIELDS, 'learner')
        if 'algo' not in d:
            raise ConfigError('learner config needs an algo')
        return cls(**d)

    def to_dict(self):
        d = {'algo': self.algo, 'seed': self.seed, 'eta_scale': self.eta_scale,
             'gamma_scale': self.gamma_scale}
        if self.target is not None:
            d['target'] = (self.target if isinstance(self.target, str)
                           else [float(x) for x in self.target])
        return d

    def load_target(self, game, base=None):
        target = self.target
        if target is None:
            raise ConfigError('cce-track needs a target distribution')
        if isinstance(target, str):
            path = py.path.local(base).join(target) if base else py.path.local(target)
            data = json.loads(path.read())
            target = data['probs'] if isinstance(data, dict) else data
        return check_simplex(target, 'cce-track target', size=game.joint_size,
                             renormalize=True)

    def build(self, game, player, horizon, run_seed, perturb=False, base=None):
        """
        The replayable Agent for ``player``
        """
        kind, args = self.parse_algo(self.algo)
        n = game.n1 if player == 1 else game.n2
        seed = derive_seed(run_seed, self.seed, player)
        if kind is LearnerKind.MWU:
            state = mwu_state(n, horizon, seed, self.eta_scale)
        elif kind is LearnerKind.EXP3:
            state = exp3_state(n, horizon, seed, self.gamma_scale)
        elif kind is LearnerKind.FIXED:
            state = fixed_state(n, args[0], horizon, seed)
        elif kind is LearnerKind.RESPONSE:
            initial, table = args
            opp = game.n2 if player == 1 else game.n1
            if len(table) != opp:
                raise ConfigError('response table needs %d entries, got %d'
                                  % (opp, len(table)))
            state = response_state(n, table, initial, horizon, seed)
        else:
            if perturb:
                raise ConfigError('perturbed strategies are not supported with cce-track')
            state = tracker_state(self.load_target(game, base), game.n1, game.n2,
                                  player, horizon,
                                  public_seed=derive_seed(run_seed, PUBLIC_STREAM),
                                  seed=seed, gamma_scale=self.gamma_scale)
        eps = horizon_perturbation(horizon, game.joint_size) if perturb else None
        return Agent(player, game.payoff(player), state, eps, game.joint_size)


def _learner(value):
    if isinstance(value, LearnerConfig):
        return value
    return LearnerConfig.from_dict(value)


@attr.s(frozen=True)
class RunConfig:
    mode = attr.ib(default='selfplay')
    game = attr.ib(default=None)
    rounds = attr.ib(default=1000)
    memory = attr.ib(default=1)
    learner1 = attr.ib(default='mwu', converter=_learner)
    learner2 = attr.ib(default='mwu', converter=_learner)
    lagged_empirical = attr.ib(default=False)
    perturb = attr.ib(default=False)
    record_every = attr.ib(default=None)
    out = attr.ib(default=None)
    seed = attr.ib(default=0)
    # directory relative paths are resolved against; not serialized
    base = attr.ib(default=None, repr=False)

    FIELDS = ('mode', 'game', 'rounds', 'memory', 'learner1', 'learner2',
              'lagged_empirical', 'perturb', 'record_every', 'out', 'seed')

    def __attrs_post_init__(self):
        if self.mode not in MODES:
            raise ConfigError('mode must be one of %s, got %r' % (', '.join(MODES), self.mode))
        if not isinstance(self.rounds, int) or not isinstance(self.memory, int):
            raise ConfigError('rounds and memory must be integers')
        if self.memory < 1:
            raise ConfigError('memory must be >= 1, got %d' % self.memory)
        if self.rounds < max(4, self.memory + 1):
            raise ConfigError('rounds must be >= max(4, memory + 1), got %d' % self.rounds)
        if self.mode == 'incompat' and self.memory < conf.MIN_REACTIVE_MEMORY:
            raise ConfigError('the incompatibility construction needs memory >= %d, got %d'
                              % (conf.MIN_REACTIVE_MEMORY, self.memory))
        every = self.record_every
        if every is not None and not (isinstance(every, int) and 1 <= every <= self.rounds):
            raise ConfigError('record_every must be an integer in [1, rounds], got %r'
                              % (every,))
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError('seed must be a 64-bit unsigned integer')

    @property
    def checkpoints(self):
        """
        record_every * 2^k for every such value below T, then T itself
        """
        T = self.rounds
        every = self.record_every or T
        out = []
        c = every
        while c < T:
            out.append(c)
            c *= 2
        out.append(T)
        return out

    def resolve(self, path):
        if path is None:
            return None
        if self.base is not None and not os.path.isabs(path):
            return py.path.local(self.base).join(path)
        return py.path.local(path)

    def load_game(self):
        if self.game is None:
            raise ConfigError('mode %s needs a game file' % self.mode)
        try:
            return Game.load(self.resolve(self.game))
        except ValidationError:
            raise
        except (OSError, py.error.Error) as e:
            raise ConfigError('cannot read game file %s: %s' % (self.game, e))

    def build_agents(self, game):
        return (self.learner1.build(game, 1, self.rounds, self.seed, self.perturb, self.base),
                self.learner2.build(game, 2, self.rounds, self.seed, self.perturb, self.base))

    def to_dict(self):
        d = {name: getattr(self, name) for name in self.FIELDS}
        d['learner1'] = self.learner1.to_dict()
        d['learner2'] = self.learner2.to_dict()
        return d

    @classmethod
    def from_dict(cls, d, base=None):
        _check_keys(d, cls.FIELDS, 'run config')
        return cls(base=base, **d)

    @classmethod
    def load(cls, path):
        path = py.path.local(path)
        try:
            d = json.loads(path.read())
        except (OSError, py.error.Error) as e:
            raise ConfigError('cannot read config %s: %s' % (path, e))
        except ValueError as e:
            raise ConfigError('config %s is not valid JSON: %s' % (path, e))
        return cls.from_dict(d, base=str(path.dirpath()))
