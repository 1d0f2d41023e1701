"""
External regret, m-memory policy regret and the counterfactual deviation
traces behind them.

A history is either played on a bimatrix game (``PlayHistory.game`` is set)
or is a single player's action sequence against a ``ReactiveUtility``
(``PlayHistory.rule`` is set). Game-mode policy regret needs the opponent's
learner: it is replayed from snapshots with the deviating player's last m
actions replaced.
"""
import collections
import logging
import attr
import numpy as np

from .errors import ValidationError, DimensionError
from .game import JointDistribution, check_player, spectral_norm
from .markov import empirical_chain, empirical_function_distribution

log = logging.getLogger(__name__)


def _other(player):
    return 2 if player == 1 else 1


@attr.s(frozen=True, eq=False)
class PlayHistory:
    actions1 = attr.ib(converter=lambda a: np.asarray(a, dtype=int))
    actions2 = attr.ib(default=None)
    strategies1 = attr.ib(default=None, repr=False)
    strategies2 = attr.ib(default=None, repr=False)
    utilities1 = attr.ib(default=None, repr=False)
    utilities2 = attr.ib(default=None, repr=False)
    game = attr.ib(default=None)
    rule = attr.ib(default=None)
    joints = attr.ib(default=None, repr=False)
    oracle = attr.ib(factory=dict, repr=False)   # round -> sigma_hat handed to trackers

    def __attrs_post_init__(self):
        T = len(self.actions1)
        for name in ('actions2', 'strategies1', 'strategies2', 'utilities1',
                     'utilities2', 'joints'):
            value = getattr(self, name)
            if value is not None and len(value) != T:
                raise DimensionError(name, T, len(value))
        if (self.game is None) == (self.rule is None):
            raise ValidationError('a history is played either on a game or '
                                  'against a reactive utility')

    @property
    def T(self):
        return len(self.actions1)

    @property
    def mode(self):
        return 'game' if self.game is not None else 'sequence'

    @classmethod
    def from_game_play(cls, game, actions1, actions2, strategies1, strategies2,
                       joints=None, oracle=None):
        actions1 = np.asarray(actions1, dtype=int)
        actions2 = np.asarray(actions2, dtype=int)
        strategies1 = np.asarray(strategies1, dtype=float).reshape(len(actions1), game.n1)
        strategies2 = np.asarray(strategies2, dtype=float).reshape(len(actions2), game.n2)
        if joints is None:
            joints = np.einsum('ti,tj->tij', strategies1, strategies2).reshape(
                len(actions1), game.joint_size)
        return cls(actions1, actions2, strategies1, strategies2,
                   utilities1=game.u1[actions1, actions2],
                   utilities2=game.u2[actions1, actions2],
                   game=game, joints=np.asarray(joints, dtype=float),
                   oracle=dict(oracle or {}))

    @classmethod
    def from_sequence(cls, rule, actions, strategies=None):
        actions = np.asarray(actions, dtype=int)
        if actions.size and (actions.min() < 0 or actions.max() > 1):
            raise ValidationError('reactive sequences are binary')
        utilities = np.array([rule.at(actions, t) for t in range(len(actions))])
        return cls(actions, strategies1=strategies, utilities1=utilities, rule=rule)

    def actions(self, player):
        return self.actions1 if player == 1 else self.actions2

    def strategies(self, player):
        return self.strategies1 if player == 1 else self.strategies2

    def utilities(self, player):
        return self.utilities1 if player == 1 else self.utilities2

    def opponent_marginals(self, player):
        """
        Per-round marginal of the opponent under p_t (differs from the opponent's
        own strategy only for correlated play)
        """
        g = self.game
        j = self.joints.reshape(self.T, g.n1, g.n2)
        return j.sum(axis=1) if player == 1 else j.sum(axis=2)

    def expected_utilities(self, player):
        """
        Per-round E_{p_t}[u_player]
        """
        return self.joints @ self.game.utility_vector(player)

    def sigma_hat(self):
        return JointDistribution(self.joints.mean(axis=0), self.game.n1, self.game.n2)

    def sigma_tilde(self):
        g = self.game
        counts = np.bincount(self.actions1 * g.n2 + self.actions2,
                             minlength=g.joint_size)
        return JointDistribution(counts / self.T, g.n1, g.n2)

    def prefix(self, t):
        def cut(x):
            return None if x is None else x[:t]
        return PlayHistory(self.actions1[:t], cut(self.actions2),
                           cut(self.strategies1), cut(self.strategies2),
                           cut(self.utilities1), cut(self.utilities2),
                           game=self.game, rule=self.rule, joints=cut(self.joints),
                           oracle={s: v for s, v in self.oracle.items() if s < t})


@attr.s(frozen=True, eq=False)
class DeviationTrace:
    deviation_action = attr.ib()
    deviating_player = attr.ib()
    memory = attr.ib()
    strategies = attr.ib(repr=False)    # counterfactual opponent strategies, T x n_opp
    n1 = attr.ib()
    n2 = attr.ib()

    @property
    def T(self):
        return len(self.strategies)

    @property
    def joint(self):
        """
        Per-round (p_a)_t = delta_a x counterfactual opponent strategy
        """
        T = self.T
        if self.deviating_player == 1:
            j = np.zeros((T, self.n1, self.n2))
            j[:, self.deviation_action, :] = self.strategies
        else:
            j = np.zeros((T, self.n1, self.n2))
            j[:, :, self.deviation_action] = self.strategies
        return j.reshape(T, self.n1 * self.n2)

    def prefix(self, t):
        return attr.evolve(self, strategies=self.strategies[:t])


class CounterfactualReplay:
    """
    Replays the opponent's learner on deviated input.

    ``push`` is called once per realized round with the opponent's state at
    the start of that round; only the last ``memory`` rounds are kept
    (``memory=None`` keeps everything, i.e. the whole history is replaced).
    """

    def __init__(self, agent, memory):
        if memory is not None and memory < 1:
            raise ValidationError('memory must be >= 1, got %r' % (memory,))
        self.agent = agent
        self.memory = memory
        self._rounds = collections.deque(maxlen=memory)

    def push(self, state, oracle=None):
        self._rounds.append((state, oracle))

    def counterfactual(self, current, deviation):
        """
        The strategy the opponent would play now had the deviating player
        played ``deviation`` in each of the remembered rounds.
        """
        agent = self.agent
        if not self._rounds:
            return agent.strategy(current)
        state = self._rounds[0][0]
        for _, oracle in self._rounds:
            p = agent.strategy(state)
            own = agent.act(state, p)
            if not agent.needs_oracle(state):
                oracle = None
            state = agent.observe(state, own, deviation, oracle=oracle, p=p)
        return agent.strategy(state)


def external_regret(history, player, expected=False):
    """
    max_a sum_t [u_t(a_{1:t-1}, a) - u_t(a_{1:t})]

    On a game the counterfactual is u_player(a, opponent's action at t); with
    ``expected=True`` both terms are expectations under the recorded
    strategies. Against a reactive utility the true prefix is kept and only
    position t is replaced.
    """
    check_player(player)
    if history.T == 0:
        return 0.0
    if history.mode == 'sequence':
        if player != 1:
            raise ValidationError('a reactive sequence has a single player')
        rule = history.rule
        acts = list(history.actions1)
        best = -np.inf
        for a in (0, 1):
            total = 0.0
            for t in range(history.T):
                window = rule.window(acts, t)
                total += rule(window[:-1] + (a,))
            best = max(best, total)
        return float(best - history.utilities1.sum())
    payoff = history.game.payoff(player)
    if expected:
        opp = history.opponent_marginals(player).sum(axis=0)
        realized = history.expected_utilities(player).sum()
        return float((payoff @ opp).max() - realized)
    opp_actions = history.actions(_other(player))
    counterfactual = payoff[:, opp_actions].sum(axis=1)
    return float(counterfactual.max() - history.utilities(player).sum())


def _sequence_policy_utilities(rule, actions, m, deviation):
    # rounds before the start count as 1 unless they fall inside the
    # replaced window
    pad = rule.memory
    ext = [1] * pad + [int(a) for a in actions]
    out = np.empty(len(actions))
    for t in range(len(actions)):
        end = t + pad + 1
        lo = 0 if m is None else max(0, end - m)
        window = ext[end - pad:end]
        for k in range(max(lo, end - pad), end):
            window[k - (end - pad)] = deviation
        out[t] = rule(tuple(window))
    return out


def policy_regret(history, player, m, deviation, opponent_replayer=None, trace=None):
    """
    m-memory policy regret of ``player`` against the constant ``deviation``.

    ``m=None`` replaces the whole history (the full-deviation comparator). In
    game mode pass either a precomputed ``trace`` or the opponent's ``Agent``
    as ``opponent_replayer``.
    """
    check_player(player)
    if m is not None and m < 1:
        raise ValidationError('memory must be >= 1, got %r' % (m,))
    if history.mode == 'sequence':
        if player != 1:
            raise ValidationError('a reactive sequence has a single player')
        cf = _sequence_policy_utilities(history.rule, history.actions1, m, deviation)
        return float(cf.sum() - history.utilities1.sum())
    if trace is None:
        if opponent_replayer is None:
            raise ValidationError('game-mode policy regret needs the opponent '
                                  'replayer or a deviation trace')
        trace = deviation_trace(history, player, deviation, m, opponent_replayer)
    if (trace.deviating_player, trace.deviation_action) != (player, deviation):
        raise ValidationError('trace is for player %d deviating to %d'
                              % (trace.deviating_player, trace.deviation_action))
    row = history.game.payoff(player)[deviation]
    counterfactual = (trace.strategies[:history.T] @ row).sum()
    return float(counterfactual - history.expected_utilities(player).sum())


def deviation_trace(history, deviating_player, deviation, m, opponent_replayer):
    """
    Rebuild the opponent's realized states from the history and replay each
    round with the last m actions of ``deviating_player`` replaced.
    """
    check_player(deviating_player)
    if history.mode != 'game':
        raise ValidationError('deviation traces need a game history')
    g = history.game
    n_dev = g.n1 if deviating_player == 1 else g.n2
    if not 0 <= deviation < n_dev:
        raise ValidationError('deviation %r out of range' % (deviation,))
    agent = opponent_replayer
    opp = _other(deviating_player)
    if agent.player != opp:
        raise ValidationError('the replayer plays for player %d, not %d'
                              % (agent.player, opp))
    replay = CounterfactualReplay(agent, m)
    own_actions = history.actions(opp)
    dev_actions = history.actions(deviating_player)
    recorded = history.strategies(opp)
    state = agent.initial
    out = []
    for t in range(history.T):
        p = agent.strategy(state)
        if recorded is not None and not np.allclose(p, recorded[t], atol=1e-12):
            raise ValidationError('replayer does not reproduce the recorded '
                                  'strategy of player %d at round %d' % (opp, t))
        out.append(replay.counterfactual(state, deviation))
        oracle = history.oracle.get(t) if agent.needs_oracle(state) else None
        replay.push(state, oracle)
        state = agent.observe(state, int(own_actions[t]), int(dev_actions[t]),
                              oracle=oracle, p=p)
    n_opp = g.n2 if deviating_player == 1 else g.n1
    strategies = np.array(out).reshape(history.T, n_opp)
    return DeviationTrace(deviation, deviating_player, m, strategies, g.n1, g.n2)


def deviation_empirical(trace):
    if trace.T == 0:
        raise ValidationError('empty deviation trace')
    return JointDistribution(trace.joint.mean(axis=0), trace.n1, trace.n2)


def deviation_chain_hat(trace, lagged=False):
    """
    Empirical chain of the deviation sequence (p_a)_t. Its stationary
    distribution includes ``deviation_empirical(trace)``.
    """
    if trace.T == 0:
        raise ValidationError('empty deviation trace')
    return empirical_chain(trace.joint, lagged=lagged)


def deviation_function_distribution(trace):
    """
    Joint-view function pair distribution whose induced chain is the
    deviation's same-t empirical chain.
    """
    if trace.T == 0:
        raise ValidationError('empty deviation trace')
    return empirical_function_distribution(trace.joint, trace.n1, trace.n2)


def measured_stability(history, trace):
    """
    sum_t ||counterfactual - realized||_1 of the opponent's strategies: the
    S(T) actually achieved along this history.
    """
    realized = history.opponent_marginals(trace.deviating_player)
    return float(np.abs(trace.strategies[:history.T] - realized).sum())


def policy_regret_bound(game, player, S_T, R_T):
    """
    ||P|| S(T) + R(T). Stability is measured in l1, which bounds the l2
    stability the estimate is stated for.
    """
    if S_T < 0 or R_T < 0:
        raise ValidationError('S_T and R_T must be >= 0')
    return spectral_norm(game.utility(player)) * S_T + R_T
