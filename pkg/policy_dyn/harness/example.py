"""
The two-action example whose policy equilibrium is not a coarse correlated
equilibrium, checked end to end.
"""
import logging
import attr
import numpy as np

from .. import conf
from ..errors import ConfigError
from ..game import Game, JointDistribution, expected_utility
from ..markov import FunctionPairDistribution
from ..equilibria import is_cce, is_policy_equilibrium

log = logging.getLogger(__name__)

EXAMPLE_GAME = {
    'actions1': ['a', 'b'],
    'actions2': ['c', 'd'],
    'u1': [[0.75, 0.0], [1.0, 0.0]],
    'u2': [[1.0, 1.0], [1.0, 1.0]],
}

# player 1 always plays a; player 2 answers a with c and b with d
EXAMPLE_F = (0, 0)
EXAMPLE_G = (0, 1)


def example_game():
    return Game.from_dict(EXAMPLE_GAME)


def example_pi():
    return FunctionPairDistribution.dirac(2, 2, EXAMPLE_F, EXAMPLE_G)


@attr.s(frozen=True)
class Check:
    name = attr.ib()
    passed = attr.ib()
    detail = attr.ib(default='')


@attr.s(frozen=True, eq=False)
class ExampleResult:
    policy = attr.ib(repr=False)
    cce = attr.ib(repr=False)
    checks = attr.ib()

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    @property
    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    @property
    def exit_code(self):
        return 0 if self.ok else 1

    def summary(self):
        lines = []
        for c in self.checks:
            lines.append('%-20s %s  %s' % (c.name, 'ok' if c.passed else 'FAILED', c.detail))
        if not self.ok:
            lines.append('failed: %s' % ', '.join(self.failed))
        return '\n'.join(lines)


def _close(x, y):
    return abs(x - y) <= conf.CERTIFY_TOL


def run_example(config=None, tol=conf.EXACT_TOL):
    """
    Check the worked example; ``config``, when given, must be an example-mode
    RunConfig.
    """
    if config is not None and config.mode != 'example':
        raise ConfigError('expected an example config, got mode %r' % config.mode)
    game = example_game()
    pi = example_pi()
    policy = is_policy_equilibrium(pi, game, tol)
    ac = JointDistribution.dirac(2, 2, 0, 0)
    cce = is_cce(ac, game, tol)
    checks = [Check('policy-equilibrium', bool(policy.is_equilibrium),
                    'max deviation slack %.3g' % policy.max_slack())]

    witness = policy.witness
    if witness is None:
        checks.append(Check('witness', False, 'no witness'))
    else:
        value = expected_utility(witness, game, 1)
        checks.append(Check('witness',
                            np.abs(witness - ac.probs).sum() <= conf.CERTIFY_TOL and
                            _close(value, 0.75),
                            'E[u1] = %.6g at %s' % (value, game.joint_label(int(np.argmax(witness))))))

    dev = policy.deviations.get((1, game.action_index(1, 'b')))
    dev_value = None if dev is None else expected_utility(dev, game, 1)
    checks.append(Check('deviation-value', dev_value is not None and _close(dev_value, 0.0),
                        'E[u1] after deviating to b = %s' % dev_value))

    slack = max(v.slack for v in cce.slacks)
    checks.append(Check('cce-rejected', not cce.is_equilibrium and _close(slack, 0.25),
                        'best fixed deviation gains %.6g' % slack))
    result = ExampleResult(policy, cce, checks)
    for c in checks:
        log.debug('%s: %s (%s)', c.name, c.passed, c.detail)
    return result
