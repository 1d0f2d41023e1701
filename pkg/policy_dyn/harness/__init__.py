"""
Experiment orchestration on top of policy_dyn: self-play, the reactive
utility experiment, the worked example and report files.
"""
from .config import RunConfig, LearnerConfig
from .selfplay import run_selfplay, simulate
from .incompat import run_incompat
from .example import run_example
from .report import RunReport, CheckpointRow, emit_report
from .sweep import run_sweep
