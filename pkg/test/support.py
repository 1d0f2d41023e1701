import json
import sys
import subprocess
import zlib
from pathlib import Path
import numpy as np
from filelock import FileLock

from policy_dyn.game import Game
from policy_dyn.harness.example import EXAMPLE_GAME

ROOT = Path(__file__).parent.parent
LOCK = FileLock(ROOT / ".policy_dyn.lock")


def example_game():
    return Game.from_dict(EXAMPLE_GAME)


def make_rng(name):
    return np.random.default_rng(zlib.crc32(str(name).encode('utf-8')))


def random_game(rng, n1, n2):
    return Game(['r%d' % i for i in range(n1)], ['c%d' % j for j in range(n2)],
                rng.random((n1, n2)), rng.random((n1, n2)))


def random_simplex(rng, n):
    return rng.dirichlet(np.ones(n))


def random_strategies(rng, T, n):
    return rng.dirichlet(np.ones(n), size=T)


def atomic_run(*args, **kwargs):
    with LOCK:
        return subprocess.run(*args, **kwargs)


def run_cli(*args, cwd=None):
    """
    Run ``python -m policy_dyn.harness`` in a subprocess
    """
    return atomic_run([sys.executable, '-m', 'policy_dyn.harness'] + [str(a) for a in args],
                      cwd=cwd or ROOT, capture_output=True, text=True)


def write_json(path, data):
    path.write(json.dumps(data))
    return path


def play(game, agent1, agent2, rounds):
    """
    Plain independent play between two agents; returns the PlayHistory
    """
    from policy_dyn.regret import PlayHistory
    s1, s2 = agent1.initial, agent2.initial
    acts1, acts2, strats1, strats2 = [], [], [], []
    for _ in range(rounds):
        p1, p2 = agent1.strategy(s1), agent2.strategy(s2)
        a, b = agent1.act(s1, p1), agent2.act(s2, p2)
        acts1.append(a)
        acts2.append(b)
        strats1.append(p1)
        strats2.append(p2)
        s1 = agent1.observe(s1, a, b, p=p1)
        s2 = agent2.observe(s2, b, a, p=p2)
    return PlayHistory.from_game_play(game, acts1, acts2, strats1, strats2)


def game_file(tmpdir, game=None):
    return write_json(tmpdir.join('game.json'), (game or example_game()).to_dict())
