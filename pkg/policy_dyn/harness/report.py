"""
Run reports and the files they are written to.

Every number is rendered with a fixed count of significant digits, so the
CSV and the JSON of one report agree value for value.
"""
import csv
import io
import json
import logging
import attr
import py
from filelock import FileLock

from .. import conf
from ..errors import ReportError

log = logging.getLogger(__name__)


def fmt(x):
    return format(float(x), '.%dg' % conf.SIGNIFICANT_DIGITS)


def rounded(value):
    """
    ``value`` with every float rounded the way ``fmt`` prints it
    """
    if isinstance(value, float):
        return float(fmt(value))
    if isinstance(value, dict):
        return {k: rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [rounded(v) for v in value]
    return value


@attr.s(frozen=True)
class CheckpointRow:
    round = attr.ib()
    ext1 = attr.ib()
    ext2 = attr.ib()
    pol1_max = attr.ib()
    pol2_max = attr.ib()
    slack = attr.ib()
    l1_sigma_tilde_hat = attr.ib()
    stat_res_hat = attr.ib()
    stat_res_tilde = attr.ib()

    def as_tuple(self):
        return attr.astuple(self)

    def to_dict(self):
        d = attr.asdict(self)
        return {k: (v if k == 'round' else float(v)) for k, v in d.items()}


@attr.s(eq=False)
class RunReport:
    config = attr.ib()
    rows = attr.ib(factory=list)
    details = attr.ib(factory=list, repr=False)
    # the SelfPlayResult the report was computed from, not serialized
    result = attr.ib(default=None, repr=False)

    @property
    def final(self):
        return self.rows[-1] if self.rows else None

    def to_dict(self):
        return {
            'config': self.config,
            'seed': self.config.get('seed'),
            'checkpoints': [row.to_dict() for row in self.rows],
            'details': self.details,
        }


@attr.s(frozen=True)
class IncompatRow:
    arm = attr.ib()
    round = attr.ib()
    external = attr.ib()
    policy_max = attr.ib()
    policy = attr.ib()      # per constant deviation, indexed by action


class ReportFile:
    SUFFIX = None

    def __init__(self, report):
        self.report = report

    def generate(self):
        raise NotImplementedError

    def path(self, prefix):
        return py.path.local(str(prefix) + self.SUFFIX)

    def write(self, prefix):
        path = self.path(prefix)
        text = self.generate()
        try:
            with path.open('w') as f:
                f.write(text)
        except (OSError, py.error.Error) as e:
            raise ReportError(path, getattr(e, 'strerror', None) or e)
        log.debug('wrote %s', path)
        return path


class CsvReport(ReportFile):
    SUFFIX = '.csv'

    def generate(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator='\n')
        w.writerow(conf.CSV_HEADER)
        for row in self.report.rows:
            values = row.as_tuple()
            w.writerow((values[0],) + tuple(fmt(v) for v in values[1:]))
        return buf.getvalue()


class JsonReport(ReportFile):
    SUFFIX = '.json'

    def generate(self):
        return json.dumps(rounded(self.report.to_dict()), indent=2, sort_keys=True) + '\n'


class IncompatCsv(ReportFile):
    SUFFIX = '.csv'
    HEADER = ('arm', 'round', 'external', 'policy_max', 'policy_0', 'policy_1')

    def generate(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator='\n')
        w.writerow(self.HEADER)
        for row in self.report.rows:
            w.writerow((row.arm, row.round, fmt(row.external), fmt(row.policy_max)) +
                       tuple(fmt(v) for v in row.policy))
        return buf.getvalue()


class SummaryCsv(ReportFile):
    SUFFIX = '-summary.csv'

    def generate(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator='\n')
        w.writerow(('seed',) + conf.CSV_HEADER)
        for seed, report in self.report:
            if report.final is None:
                continue
            values = report.final.as_tuple()
            w.writerow((seed, values[0]) + tuple(fmt(v) for v in values[1:]))
        return buf.getvalue()


def _lock(prefix):
    return FileLock(str(prefix) + '.lock')


def emit_files(files, prefix):
    """
    Write ``files`` under ``prefix``, holding the prefix lock so that parallel
    runs never interleave their output.
    """
    prefix = py.path.local(prefix)
    if not prefix.dirpath().check(dir=1):
        raise ReportError(prefix, 'directory %s does not exist' % prefix.dirpath())
    with _lock(prefix):
        return [f.write(prefix) for f in files]


def emit_report(report, prefix):
    """
    ``<prefix>.csv`` (one row per checkpoint) and ``<prefix>.json`` (rows,
    per-deviation details and the configuration)
    """
    paths = emit_files([CsvReport(report), JsonReport(report)], prefix)
    log.info('report written to %s', ', '.join(map(str, paths)))
    return paths


def emit_incompat(report, prefix):
    paths = emit_files([IncompatCsv(report), JsonReport(report)], prefix)
    log.info('report written to %s', ', '.join(map(str, paths)))
    return paths
