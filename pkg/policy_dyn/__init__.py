import numpy
from packaging import version
if version.parse(numpy.__version__) < version.parse('1.17'):
    raise ImportError('policy_dyn needs numpy>=1.17 (numpy.random.Generator)')

try:
    from .version import __version__, __git_revision__
except ImportError:
    __version__ = '0+unknown'
    __git_revision__ = '__UNKNOWN__'

from .errors import (PolicyDynError, ValidationError, DimensionError, ConfigError,
                     FunctionSpaceTooLarge, ConvergenceError, LPError,
                     InvariantError, ReportError)
from .game import (Game, MixedStrategy, JointDistribution, expected_utility,
                   product_distribution, l1_distance, perturb_strategy,
                   horizon_perturbation, perturbation_penalty, spectral_norm)
from .learners import (LearnerKind, Agent, ReactiveUtility, mwu_state, mwu_step,
                       exp3_state, exp3_step, fixed_state, fixed_action_strategy,
                       response_state, tracker_state, cce_tracker_step,
                       sample_action, strategy)
from .regret import (PlayHistory, DeviationTrace, CounterfactualReplay,
                     external_regret, policy_regret, deviation_trace,
                     deviation_empirical, deviation_chain_hat,
                     deviation_function_distribution, measured_stability,
                     policy_regret_bound)
from .markov import (TransitionMatrix, FunctionPairDistribution, INFEASIBLE,
                     empirical_chain, observed_chain, induced_chain,
                     deviation_chain, deviation_stationary, ergodic_projector,
                     empirical_function_distribution, stationary_residual,
                     solve_constrained_stationary, project_stationary)
from .equilibria import (EquilibriumVerdict, Violation, is_cce, find_cce,
                         is_policy_equilibrium, equilibrium_slack,
                         enumerate_function_pairs)
