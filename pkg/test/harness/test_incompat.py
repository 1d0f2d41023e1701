import pytest

from policy_dyn.errors import ConfigError
from policy_dyn.harness.config import RunConfig
from policy_dyn.harness.incompat import play_arms, run_incompat
from policy_dyn.harness.report import IncompatCsv


def incompat(**kwargs):
    kwargs.setdefault('rounds', 9000)
    kwargs.setdefault('memory', 3)
    return RunConfig(mode='incompat', **kwargs)


class TestArms:

    def test_fixed_arm(self):
        arms = play_arms(9000, 3, arms=('fixed',))
        fixed = arms['fixed']
        assert fixed.external_regret() == pytest.approx(4500)
        assert fixed.policy_regret() == pytest.approx(0.0)
        # the constant 0 loses every round but the first m
        assert fixed.policy_regrets()[0] < 0

    def test_mwu_arm(self):
        mwu = play_arms(9000, 3, arms=('mwu',))['mwu']
        assert mwu.external_regret() <= 150
        assert mwu.policy_regret() >= 3600

    def test_short_horizon(self):
        arms = play_arms(40, 3)
        assert arms['fixed'].external_regret() == pytest.approx(20)
        assert set(arms) == {'fixed', 'mwu'}

    def test_memory_too_small(self):
        with pytest.raises(ConfigError):
            play_arms(100, 2)

    def test_unknown_arm(self):
        with pytest.raises(ConfigError):
            play_arms(100, 3, arms=('hedge',))

    def test_reproducible(self):
        a = play_arms(300, 3, arms=('mwu',), seed=4)['mwu']
        b = play_arms(300, 3, arms=('mwu',), seed=4)['mwu']
        assert list(a.history.actions1) == list(b.history.actions1)


def test_run_incompat_rows():
    report = run_incompat(incompat(rounds=1000, record_every=250))
    assert [(r.arm, r.round) for r in report.rows] == [
        ('fixed', 250), ('fixed', 500), ('fixed', 1000),
        ('mwu', 250), ('mwu', 500), ('mwu', 1000)]
    final = report.final('fixed')
    assert final.external == pytest.approx(500)
    assert final.policy_max == max(final.policy)
    assert report.to_dict()['config']['mode'] == 'incompat'


def test_run_incompat_single_arm():
    report = run_incompat(incompat(rounds=200), arms=('fixed',))
    assert {r.arm for r in report.rows} == {'fixed'}
    assert report.final('fixed').round == 200


def test_wrong_mode():
    with pytest.raises(ConfigError):
        run_incompat(RunConfig(rounds=100))


def test_memory_validated_by_config():
    with pytest.raises(ConfigError):
        incompat(memory=2)


def test_csv():
    report = run_incompat(incompat(rounds=100))
    lines = IncompatCsv(report).generate().splitlines()
    assert lines[0] == 'arm,round,external,policy_max,policy_0,policy_1'
    assert lines[1].startswith('fixed,100,50,0,')
    assert len(lines) == 3
