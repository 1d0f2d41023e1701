"""
Self-play on a bimatrix game, with the counterfactual deviation traces and
the per-checkpoint metrics of the run report.
"""
import logging
import attr
import numpy as np

from ..game import expected_utility, l1_distance
from ..learners import LearnerKind, is_tracking
from ..markov import empirical_chain, observed_chain, stationary_residual
from ..regret import (PlayHistory, DeviationTrace, CounterfactualReplay,
                      external_regret, policy_regret, deviation_empirical,
                      deviation_chain_hat)
from ..equilibria import equilibrium_slack
from .report import RunReport, CheckpointRow

log = logging.getLogger(__name__)


@attr.s(frozen=True, eq=False)
class SelfPlayResult:
    config = attr.ib()
    game = attr.ib()
    agents = attr.ib(repr=False)
    history = attr.ib(repr=False)
    # (deviating player, action) -> DeviationTrace
    traces = attr.ib(repr=False)
    correlated = attr.ib(default=False)


def shares_device(agent1, agent2):
    """
    Both players track the same joint distribution off the same public draws
    """
    s1, s2 = agent1.initial, agent2.initial
    if not (s1.kind is s2.kind is LearnerKind.CCE_TRACKER):
        return False
    t1, t2 = s1.tracker, s2.tracker
    return (np.array_equal(t1.target, t2.target) and
            np.array_equal(t1.public.uniforms, t2.public.uniforms))


def simulate(config, game=None):
    """
    Play ``config.rounds`` rounds and record, for every constant deviation of
    either player, the opponent's strategy replayed with the last
    ``config.memory`` actions replaced.
    """
    if game is None:
        game = config.load_game()
    agent1, agent2 = config.build_agents(game)
    T, m = config.rounds, config.memory
    n1, n2 = game.n1, game.n2
    correlated = shares_device(agent1, agent2)
    if correlated:
        log.info('both players track the same device: play is correlated')

    actions1 = np.empty(T, dtype=int)
    actions2 = np.empty(T, dtype=int)
    strategies1 = np.empty((T, n1))
    strategies2 = np.empty((T, n2))
    joints = np.empty((T, game.joint_size))
    cf = {(1, a): np.empty((T, n2)) for a in range(n1)}
    cf.update({(2, b): np.empty((T, n1)) for b in range(n2)})
    # the replay for player k's deviations runs the opponent's learner
    replays = {1: CounterfactualReplay(agent2, m), 2: CounterfactualReplay(agent1, m)}
    oracle = {}
    joint_sum = np.zeros(game.joint_size)

    s1, s2 = agent1.initial, agent2.initial
    for t in range(T):
        p1 = agent1.strategy(s1)
        p2 = agent2.strategy(s2)
        if correlated and is_tracking(s1) and is_tracking(s2):
            joint = s1.tracker.target
        else:
            joint = np.outer(p1, p2).ravel()
        a = agent1.act(s1, p1)
        b = agent2.act(s2, p2)
        for dev in range(n1):
            cf[1, dev][t] = replays[1].counterfactual(s2, dev)
        for dev in range(n2):
            cf[2, dev][t] = replays[2].counterfactual(s1, dev)

        actions1[t], actions2[t] = a, b
        strategies1[t], strategies2[t] = p1, p2
        joints[t] = joint
        joint_sum += joint

        o1 = o2 = None
        if agent1.needs_oracle(s1) or agent2.needs_oracle(s2):
            sigma_hat = joint_sum / (t + 1)
            oracle[t] = sigma_hat
            o1 = sigma_hat if agent1.needs_oracle(s1) else None
            o2 = sigma_hat if agent2.needs_oracle(s2) else None
        replays[1].push(s2, o2)
        replays[2].push(s1, o1)
        s1 = agent1.observe(s1, a, b, oracle=o1, p=p1)
        s2 = agent2.observe(s2, b, a, oracle=o2, p=p2)

    history = PlayHistory.from_game_play(game, actions1, actions2, strategies1,
                                         strategies2, joints=joints, oracle=oracle)
    traces = {key: DeviationTrace(key[1], key[0], m, strategies, n1, n2)
              for key, strategies in cf.items()}
    return SelfPlayResult(config, game, (agent1, agent2), history, traces, correlated)


def checkpoint(result, t):
    """
    The report row and the per-deviation details after the first t rounds
    """
    game, config = result.game, result.config
    hist = result.history.prefix(t)
    sigma_hat = hist.sigma_hat()
    sigma_tilde = hist.sigma_tilde()
    policy = {}
    deviation_sigmas = {1: [], 2: []}
    deviation_residuals = {}
    for (player, action), trace in sorted(result.traces.items()):
        trace_t = trace.prefix(t)
        policy[player, action] = policy_regret(hist, player, config.memory, action,
                                               trace=trace_t)
        deviation_sigmas[player].append(deviation_empirical(trace_t))
        deviation_residuals[player, action] = stationary_residual(
            deviation_chain_hat(trace_t), deviation_sigmas[player][-1].probs)
    slack = equilibrium_slack(sigma_hat, deviation_sigmas, game)
    M_hat = empirical_chain(hist.joints, lagged=config.lagged_empirical and t >= 2)
    stat_hat = stationary_residual(M_hat, sigma_hat.probs)
    if t >= 2:
        stat_tilde = stationary_residual(observed_chain(hist), sigma_tilde.probs)
    else:
        # a single observed state is its own stationary distribution
        stat_tilde = 0.0
    row = CheckpointRow(
        round=t,
        ext1=external_regret(hist, 1, expected=True),
        ext2=external_regret(hist, 2, expected=True),
        pol1_max=max(v for (p, _), v in policy.items() if p == 1),
        pol2_max=max(v for (p, _), v in policy.items() if p == 2),
        slack=slack,
        l1_sigma_tilde_hat=l1_distance(sigma_tilde.probs, sigma_hat.probs),
        stat_res_hat=stat_hat,
        stat_res_tilde=stat_tilde,
    )
    detail = {
        'round': t,
        'policy_regret': [{'player': p, 'deviation': game.actions(p)[a], 'value': v}
                          for (p, a), v in sorted(policy.items())],
        'deviation_values': [
            {'player': p, 'deviation': game.actions(p)[a],
             'value': expected_utility(sigma.probs, game, p)}
            for p in (1, 2) for a, sigma in enumerate(deviation_sigmas[p])],
        'deviation_stat_res': [
            {'player': p, 'deviation': game.actions(p)[a], 'value': v}
            for (p, a), v in sorted(deviation_residuals.items())],
        'sigma_hat': [float(x) for x in sigma_hat.probs],
        'sigma_tilde': [float(x) for x in sigma_tilde.probs],
    }
    return row, detail


def run_selfplay(config, game=None):
    """
    Simulate and evaluate at every checkpoint of ``config``; returns a RunReport.
    """
    result = simulate(config, game)
    rows, details = [], []
    for t in config.checkpoints:
        row, detail = checkpoint(result, t)
        log.info('round %d: ext=(%.4g, %.4g) pol=(%.4g, %.4g) slack=%.4g',
                 t, row.ext1, row.ext2, row.pol1_max, row.pol2_max, row.slack)
        rows.append(row)
        details.append(detail)
    return RunReport(config.to_dict(), rows, details, result=result)
