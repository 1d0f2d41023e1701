"""
Online learners as pure state machines.

Every learner is a ``LearnerState`` value plus step functions that return a
new state; nothing is mutated. Randomness comes from a counter-indexed
``RandomStream``: round t always uses draw t, so replaying a learner from a
snapshot consumes exactly the same random numbers as the realized run.
"""
import enum
import logging
import math
import attr
import numpy as np

from . import conf
from .errors import ValidationError, InvariantError
from .game import MixedStrategy, check_simplex, l1_distance, perturb_strategy

log = logging.getLogger(__name__)


class LearnerKind(enum.Enum):
    MWU = 'mwu'
    EXP3 = 'exp3'
    FIXED = 'fixed'
    RESPONSE = 'response'
    CCE_TRACKER = 'cce-track'


class TrackerMode(enum.Enum):
    TRACK = 'track'
    PENDING_SWITCH = 'pending-switch'
    EXP3_MODE = 'exp3'


@attr.s(frozen=True, eq=False)
class RandomStream:
    uniforms = attr.ib(repr=False)
    position = attr.ib(default=0)

    @classmethod
    def from_seed(cls, seed, length):
        gen = np.random.Generator(np.random.PCG64(seed))
        return cls(gen.random(length))

    def current(self):
        if self.position >= len(self.uniforms):
            raise ValidationError('random stream exhausted after %d draws'
                                  % len(self.uniforms))
        return self.uniforms[self.position]

    def advance(self):
        return RandomStream(self.uniforms, self.position + 1)


def inverse_cdf(probs, u):
    cdf = np.cumsum(probs)
    return min(int(np.searchsorted(cdf, u * cdf[-1], side='right')), len(probs) - 1)


def sample_action(strategy, stream):
    """
    Draw an action by inverse CDF over the canonical action order. Returns
    ``(action, advanced_stream)``.
    """
    p = strategy.probs if isinstance(strategy, MixedStrategy) else strategy
    return inverse_cdf(p, stream.current()), stream.advance()


def sample_actions(strategy, stream, count):
    """
    Vectorized version of sample_action for a fixed strategy.
    """
    p = strategy.probs if isinstance(strategy, MixedStrategy) else np.asarray(strategy)
    end = stream.position + count
    if end > len(stream.uniforms):
        raise ValidationError('random stream exhausted after %d draws'
                              % len(stream.uniforms))
    cdf = np.cumsum(p)
    u = stream.uniforms[stream.position:end] * cdf[-1]
    actions = np.minimum(np.searchsorted(cdf, u, side='right'), len(p) - 1)
    return actions, RandomStream(stream.uniforms, end)


@attr.s(frozen=True, eq=False)
class TrackerState:
    target = attr.ib(repr=False)    # joint distribution sigma, row-major
    n1 = attr.ib()
    n2 = attr.ib()
    player = attr.ib()
    epoch_length = attr.ib()
    public = attr.ib(repr=False)    # RandomStream shared by both trackers
    exp3 = attr.ib(repr=False)      # embedded Exp3 LearnerState
    epoch = attr.ib(default=0)      # number of completed epochs
    mode = attr.ib(default=TrackerMode.TRACK)
    switch_round = attr.ib(default=None)

    @property
    def marginal(self):
        m = self.target.reshape(self.n1, self.n2)
        return m.sum(axis=1) if self.player == 1 else m.sum(axis=0)


@attr.s(frozen=True, eq=False)
class LearnerState:
    kind = attr.ib()
    weights = attr.ib(repr=False)
    horizon = attr.ib()
    stream = attr.ib(repr=False)
    seed = attr.ib(default=0)
    step = attr.ib(default=0)
    eta = attr.ib(default=None)
    gamma = attr.ib(default=None)
    fixed_action = attr.ib(default=None)
    response = attr.ib(default=None)        # (initial action, table)
    last_opponent = attr.ib(default=None)
    tracker = attr.ib(default=None)

    @property
    def n_actions(self):
        return len(self.weights)


def _check_horizon(horizon):
    if horizon < 1:
        raise ValidationError('horizon must be >= 1, got %r' % (horizon,))


def _uniform_weights(n):
    if n < 1:
        raise ValidationError('a learner needs at least one action')
    return np.full(n, 1.0 / n)


def mwu_state(n, horizon, seed=0, eta_scale=1.0):
    _check_horizon(horizon)
    eta = eta_scale / math.sqrt(horizon)
    if not eta > 0:
        raise ValidationError('eta must be positive, got %r' % eta)
    return LearnerState(LearnerKind.MWU, _uniform_weights(n), horizon,
                        RandomStream.from_seed(seed, horizon), seed=seed, eta=eta)


def exp3_state(n, horizon, seed=0, gamma_scale=1.0):
    _check_horizon(horizon)
    gamma = gamma_scale / math.sqrt(horizon)
    if not 0 < gamma <= 1:
        raise ValidationError('gamma must be in (0, 1], got %r' % gamma)
    return LearnerState(LearnerKind.EXP3, _uniform_weights(n), horizon,
                        RandomStream.from_seed(seed, horizon), seed=seed, gamma=gamma)


def fixed_state(n, action, horizon, seed=0):
    _check_horizon(horizon)
    weights = fixed_action_strategy(action, n).probs
    return LearnerState(LearnerKind.FIXED, weights, horizon,
                        RandomStream.from_seed(seed, horizon), seed=seed,
                        fixed_action=action)


def response_state(n, table, initial, horizon, seed=0):
    """
    A learner that plays ``table[b]`` after the opponent played ``b``, and
    ``initial`` in round 0.
    """
    _check_horizon(horizon)
    table = tuple(int(a) for a in table)
    for a in table + (initial,):
        if not 0 <= a < n:
            raise ValidationError('response action %d out of range for %d actions' % (a, n))
    return LearnerState(LearnerKind.RESPONSE, fixed_action_strategy(initial, n).probs,
                        horizon, RandomStream.from_seed(seed, horizon), seed=seed,
                        response=(initial, table))


def tracker_state(target, n1, n2, player, horizon, public_seed, seed=0,
                  gamma_scale=1.0):
    """
    CCE tracker for ``player``. Both players must use the same target and the
    same ``public_seed``: their recommendations come from one shared draw.
    """
    _check_horizon(horizon)
    target = check_simplex(target, 'tracker target', size=n1 * n2)
    n = n1 if player == 1 else n2
    tracker = TrackerState(target, n1, n2, player,
                           epoch_length=math.ceil(math.sqrt(horizon)),
                           public=RandomStream.from_seed(public_seed, horizon),
                           exp3=exp3_state(n, horizon, seed, gamma_scale))
    return LearnerState(LearnerKind.CCE_TRACKER, tracker.marginal, horizon,
                        RandomStream.from_seed(seed, horizon), seed=seed,
                        tracker=tracker)


def _advance(state, **changes):
    return attr.evolve(state, step=state.step + 1, stream=state.stream.advance(),
                       **changes)


def exp3_mix(weights, gamma):
    q = weights / weights.sum()
    return (1.0 - gamma) * q + gamma / len(q)


def strategy(state):
    """
    The mixed strategy the learner plays in round ``state.step``
    """
    kind = state.kind
    if kind is LearnerKind.EXP3:
        return exp3_mix(state.weights, state.gamma)
    if kind is LearnerKind.RESPONSE:
        initial, table = state.response
        a = initial if state.last_opponent is None else table[state.last_opponent]
        return fixed_action_strategy(a, state.n_actions).probs
    if kind is LearnerKind.CCE_TRACKER:
        tr = state.tracker
        if tr.mode is TrackerMode.EXP3_MODE:
            return strategy(tr.exp3)
        return tr.marginal
    return state.weights


def _check_utilities(u, what):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)) or u.min() < 0.0 or u.max() > 1.0:
        raise ValidationError('%s must lie in [0, 1], got %r' % (what, u))
    return u


def mwu_step(state, utility_vector):
    u = _check_utilities(utility_vector, 'utility vector')
    if u.shape != state.weights.shape:
        raise ValidationError('utility vector has %d entries, expected %d'
                              % (u.size, state.n_actions))
    w = state.weights * np.exp(state.eta * u)
    w /= w.sum()
    new = _advance(state, weights=w)
    return new, w


def exp3_step(state, played_action, observed_utility, played_prob=None):
    """
    Bandit update: only the played action's weight moves, by the importance
    weighted utility. ``played_prob`` defaults to the probability the mixed
    strategy gave the played action; pass it explicitly when the action was
    drawn from a perturbed strategy.
    """
    (u,) = _check_utilities([observed_utility], 'observed utility')
    if played_prob is None:
        played_prob = exp3_mix(state.weights, state.gamma)[played_action]
    if played_prob <= 0.0:
        raise InvariantError('played action %d had probability %r'
                             % (played_action, played_prob))
    w = state.weights.copy()
    k = len(w)
    w[played_action] *= math.exp(state.gamma * u / (k * played_prob))
    w /= w.sum()
    new = _advance(state, weights=w)
    return new, exp3_mix(w, state.gamma)


def fixed_action_strategy(action, n):
    return MixedStrategy.dirac(n, action)


def fixed_step(state):
    new = _advance(state)
    return new, new.weights


def response_step(state, opponent_action):
    new = _advance(state, last_opponent=int(opponent_action))
    return new, strategy(new)


def tracker_threshold(horizon, joint_size, epoch):
    return joint_size / (epoch * horizon ** (1.0 / 6.0))


def tracker_recommendation(state):
    """
    The own action recommended by the shared draw of round ``state.step``
    """
    tr = state.tracker
    joint = inverse_cdf(tr.target, tr.public.uniforms[state.step])
    i, j = divmod(joint, tr.n2)
    return i if tr.player == 1 else j


def is_tracking(state):
    return (state.kind is LearnerKind.CCE_TRACKER and
            state.tracker.mode is not TrackerMode.EXP3_MODE)


def cce_tracker_step(state, empirical_sigma=None, own_utility_feedback=None,
                     played_prob=None):
    """
    Advance a CCE tracker by one round.

    ``empirical_sigma`` is the oracle's running empirical distribution; it is
    required at the end of each epoch while tracking and must not be given at
    any other round. ``own_utility_feedback`` is ``(played_action, utility)``
    and feeds the embedded Exp3 once the tracker has switched.
    """
    tr = state.tracker
    step = state.step + 1
    at_boundary = step % tr.epoch_length == 0
    if empirical_sigma is not None and not at_boundary:
        raise ValidationError('the empirical distribution oracle is only '
                              'consulted at epoch boundaries (round %d)' % step)
    if tr.mode is TrackerMode.EXP3_MODE and own_utility_feedback is not None:
        played, utility = own_utility_feedback
        exp3, _ = exp3_step(tr.exp3, played, utility, played_prob)
        tr = attr.evolve(tr, exp3=exp3)
    if at_boundary:
        epoch = step // tr.epoch_length
        if tr.mode is TrackerMode.TRACK:
            if empirical_sigma is None:
                raise ValidationError('tracker needs the empirical distribution '
                                      'at the end of epoch %d' % epoch)
            sigma = getattr(empirical_sigma, 'probs', empirical_sigma)
            dist = l1_distance(sigma, tr.target)
            threshold = tracker_threshold(state.horizon, len(tr.target), epoch)
            if dist > threshold:
                log.info('player %d: tracking test failed at epoch %d '
                         '(%.4g > %.4g), switching after one more epoch',
                         tr.player, epoch, dist, threshold)
                tr = attr.evolve(tr, mode=TrackerMode.PENDING_SWITCH)
        elif tr.mode is TrackerMode.PENDING_SWITCH:
            log.info('player %d: switching to Exp3 at round %d', tr.player, step)
            tr = attr.evolve(tr, mode=TrackerMode.EXP3_MODE, switch_round=step)
        tr = attr.evolve(tr, epoch=epoch)
    new = _advance(state, tracker=tr)
    return new, strategy(new)


@attr.s(frozen=True)
class ReactiveUtility:
    """
    The m-memory adversary that punishes switching away from a run of 1s
    less than it rewards it. Actions are binary; rounds before the start of
    the sequence count as action 1.
    """
    memory = attr.ib()

    @memory.validator
    def _check_memory(self, attribute, value):
        if value < conf.MIN_REACTIVE_MEMORY:
            raise ValidationError('reactive utility needs memory >= %d, got %r'
                                  % (conf.MIN_REACTIVE_MEMORY, value))

    def __call__(self, window):
        return reactive_utility_eval(self, window)

    def window(self, actions, t):
        """
        The last ``memory`` actions ending at round t (inclusive), padded with
        1s before round 0
        """
        m = self.memory
        start = t - m + 1
        if start >= 0:
            return tuple(actions[start:t + 1])
        return (1,) * (-start) + tuple(actions[:t + 1])

    def at(self, actions, t):
        return self(self.window(actions, t))


def reactive_utility_eval(rule, last_m_actions):
    window = tuple(int(a) for a in last_m_actions)
    if len(window) != rule.memory:
        raise ValidationError('window has length %d, expected %d'
                              % (len(window), rule.memory))
    if all(a == 1 for a in window):
        return 0.5
    if all(a == 1 for a in window[:-1]):
        # the run of 1s was broken at the last position
        return 1.0
    return 0.0


@attr.s(eq=False)
class Agent:
    """
    One player's learner bound to its side of a game.

    The agent turns game outcomes into the feedback its learner expects: MWU
    sees the full utility column (full information), Exp3 and the embedded
    Exp3 of a tracker only the realized utility (bandit). It is replayable:
    ``initial`` is a pure function of the configuration.
    """
    player = attr.ib()
    payoff = attr.ib(repr=False)        # [own action][opponent action]
    initial = attr.ib(repr=False)
    epsilon_tilde = attr.ib(default=None)
    joint_size = attr.ib(default=None)

    def strategy(self, state):
        p = strategy(state)
        if self.epsilon_tilde is not None and not is_tracking(state):
            p = perturb_strategy(p, self.epsilon_tilde, self.joint_size).probs
        return p

    def act(self, state, p=None):
        if is_tracking(state):
            return tracker_recommendation(state)
        if p is None:
            p = self.strategy(state)
        return inverse_cdf(p, state.stream.current())

    def observe(self, state, own_action, opponent_action, oracle=None, p=None):
        kind = state.kind
        if kind is LearnerKind.MWU:
            new, _ = mwu_step(state, self.payoff[:, opponent_action])
        elif kind is LearnerKind.EXP3:
            prob = None if p is None else p[own_action]
            new, _ = exp3_step(state, own_action,
                               self.payoff[own_action, opponent_action], prob)
        elif kind is LearnerKind.FIXED:
            new, _ = fixed_step(state)
        elif kind is LearnerKind.RESPONSE:
            new, _ = response_step(state, opponent_action)
        elif kind is LearnerKind.CCE_TRACKER:
            feedback = (own_action, self.payoff[own_action, opponent_action])
            prob = None if p is None or is_tracking(state) else p[own_action]
            new, _ = cce_tracker_step(state, oracle, feedback, prob)
        else:
            raise InvariantError('unknown learner kind %r' % (kind,))
        return new

    def needs_oracle(self, state):
        tr = state.tracker
        return (tr is not None and tr.mode is TrackerMode.TRACK and
                (state.step + 1) % tr.epoch_length == 0)
