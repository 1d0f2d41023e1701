"""
Command line entry point: policy-dyn {simulate,incompat,check-eq,example,sweep}
"""
import argparse
import json
import logging
import sys
import attr
import py

from .. import conf
from ..errors import PolicyDynError, ConfigError
from ..game import Game, JointDistribution
from ..markov import FunctionPairDistribution
from ..equilibria import is_cce, is_policy_equilibrium
from .config import RunConfig
from .example import run_example
from .incompat import ARMS, run_incompat
from .report import CsvReport, IncompatCsv, emit_incompat, emit_report, rounded
from .selfplay import run_selfplay
from .sweep import run_sweep

log = logging.getLogger('policy_dyn')


def setup_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')


def cmd_simulate(args):
    config = RunConfig.load(args.config)
    if args.out is not None:
        config = attr.evolve(config, out=str(py.path.local(args.out)))
    if config.mode == 'selfplay':
        report = run_selfplay(config)
        text, emit = CsvReport(report).generate(), emit_report
    elif config.mode == 'incompat':
        report = run_incompat(config)
        text, emit = IncompatCsv(report).generate(), emit_incompat
    elif config.mode == 'example':
        result = run_example(config)
        print(result.summary())
        return result.exit_code
    else:
        raise ConfigError('mode %s runs through the check-eq subcommand' % config.mode)
    if config.out is None:
        sys.stdout.write(text)
    else:
        emit(report, config.resolve(config.out))
    return 0


def cmd_incompat(args):
    config = RunConfig(mode='incompat', rounds=args.rounds, memory=args.memory,
                       seed=args.seed, record_every=args.record_every, out=args.out)
    arms = ARMS if args.arm == 'both' else (args.arm,)
    report = run_incompat(config, arms)
    if config.out is None:
        sys.stdout.write(IncompatCsv(report).generate())
    else:
        emit_incompat(report, config.out)
    return 0


def cmd_check_eq(args):
    game = Game.load(args.game)
    if args.sigma is not None:
        sigma = JointDistribution.load(args.sigma, game.n1, game.n2)
        verdict = is_cce(sigma, game, args.tol)
    else:
        pi = FunctionPairDistribution.load(args.pi)
        verdict = is_policy_equilibrium(pi, game, args.tol, objective=args.objective)
    text = json.dumps(rounded(verdict.to_dict(game)), indent=2) + '\n'
    if args.out is None:
        sys.stdout.write(text)
    else:
        py.path.local(args.out).write(text)
    return 0


def cmd_example(args):
    result = run_example(tol=args.tol)
    print(result.summary())
    return result.exit_code


def cmd_sweep(args):
    config = RunConfig.load(args.config)
    seeds = range(args.first_seed, args.first_seed + args.seeds)
    results = run_sweep(config, seeds, workers=args.workers)
    if config.out is None:
        for seed, report in results:
            final = report.final
            print('seed %d: slack %.6g, pol1_max %.6g, pol2_max %.6g'
                  % (seed, final.slack, final.pol1_max, final.pol2_max))
    return 0


def make_parser():
    parser = argparse.ArgumentParser(prog='policy-dyn')
    parser.add_argument('-v', '--verbose', action='count', default=0)
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('simulate', help='run a configured experiment')
    p.add_argument('--config', required=True)
    p.add_argument('--out', help='output prefix, overrides the config')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('incompat', help='reactive-utility experiment')
    p.add_argument('--rounds', type=int, default=9000)
    p.add_argument('--memory', type=int, default=3)
    p.add_argument('--arm', choices=ARMS + ('both',), default='both')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--record-every', type=int, default=None)
    p.add_argument('--out')
    p.set_defaults(func=cmd_incompat)

    p = sub.add_parser('check-eq', help='certify a CCE or a policy equilibrium')
    p.add_argument('--game', required=True)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument('--pi', help='function pair distribution (policy mode)')
    which.add_argument('--sigma', help='joint distribution (CCE mode)')
    p.add_argument('--tol', type=float, default=conf.EXACT_TOL)
    p.add_argument('--objective', choices=('welfare',), default=None)
    p.add_argument('--out')
    p.set_defaults(func=cmd_check_eq)

    p = sub.add_parser('example', help='check the built-in worked example')
    p.add_argument('--tol', type=float, default=conf.EXACT_TOL)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser('sweep', help='run a selfplay config over many seeds')
    p.add_argument('--config', required=True)
    p.add_argument('--seeds', type=int, required=True)
    p.add_argument('--first-seed', type=int, default=0)
    p.add_argument('--workers', type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except (PolicyDynError, OSError, py.error.Error, ValueError) as e:
        log.debug('command failed', exc_info=True)
        print('policy-dyn: error: %s' % e, file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
