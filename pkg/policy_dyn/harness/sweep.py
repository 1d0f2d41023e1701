"""
Independent self-play runs over a range of seeds, in parallel processes.
"""
import concurrent.futures
import logging
import os
import attr

from .. import conf
from ..errors import ConfigError
from .config import RunConfig
from .report import SummaryCsv, emit_files, emit_report
from .selfplay import run_selfplay

log = logging.getLogger(__name__)


def max_workers(environ=os.environ):
    value = environ.get(conf.THREADS_ENV)
    if value is None:
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        raise ConfigError('%s must be an integer, got %r' % (conf.THREADS_ENV, value))
    if n < 1:
        raise ConfigError('%s must be >= 1, got %d' % (conf.THREADS_ENV, n))
    return n


def seed_prefix(out, seed):
    return '%s-seed%d' % (out, seed)


def _run_one(config, seed):
    config = attr.evolve(config, seed=seed)
    report = run_selfplay(config)
    # the simulation itself does not cross the process boundary
    report.result = None
    if config.out is not None:
        emit_report(report, seed_prefix(config.resolve(config.out), seed))
    return report


def run_sweep(config, seeds, workers=None):
    """
    Run ``config`` once per seed in ``seeds``; returns [(seed, RunReport)] in
    seed order and writes ``<out>-summary.csv`` when ``config.out`` is set.
    """
    if not isinstance(config, RunConfig) or config.mode != 'selfplay':
        raise ConfigError('sweeps run selfplay configs only')
    seeds = list(seeds)
    if not seeds:
        raise ConfigError('a sweep needs at least one seed')
    workers = min(workers or max_workers(), len(seeds))
    log.info('sweeping %d seeds on %d worker(s)', len(seeds), workers)
    if workers == 1:
        reports = [_run_one(config, s) for s in seeds]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_one, [config] * len(seeds), seeds))
    results = list(zip(seeds, reports))
    if config.out is not None:
        emit_files([SummaryCsv(results)], config.resolve(config.out))
    return results
