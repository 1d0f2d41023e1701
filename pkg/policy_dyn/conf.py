# Numeric parameters shared by the whole package

# A probability vector is valid if its entries are >= -SIMPLEX_TOL and its sum
# is within SIMPLEX_TOL of 1. Vectors within tolerance are renormalized once.
SIMPLEX_TOL = 1e-12

# Row-stochasticity tolerance for TransitionMatrix
ROW_TOL = 1e-10

# Certification of exact constructions (closed-form stationary points)
CERTIFY_TOL = 1e-10

# Default tolerances for equilibrium checks: exact/analytic inputs vs
# distributions measured from finite-T simulations
EXACT_TOL = 1e-8
EMPIRICAL_TOL = 0.05

# Simplex solver
LP_PIVOT_TOL = 1e-11
LP_FEASIBILITY_TOL = 1e-9
LP_STATIONARY_SLACK = 1e-9
# deviation constraints are tightened by min(tol / 10, LP_WITNESS_MARGIN) so the
# stationary projection of the LP point stays within tol
LP_WITNESS_MARGIN = 1e-6
LP_MAX_ITERATIONS = 5000

# spectral_norm: power iteration on M^T M
SPECTRAL_TOL = 1e-10
SPECTRAL_MAX_ITER = 10000

# ergodic projector: number of squarings of the lazy chain, and the
# tolerance of the idempotence check
PROJECTOR_SQUARINGS = 64
PROJECTOR_TOL = 1e-10

# Refuse to enumerate function spaces larger than this
FUNCTION_SPACE_CAP = 10**6

# Incompatibility construction needs m >= 3
MIN_REACTIVE_MEMORY = 3

# Reports
CSV_HEADER = ('round', 'ext1', 'ext2', 'pol1_max', 'pol2_max', 'slack',
              'l1_sigma_tilde_hat', 'stat_res_hat', 'stat_res_tilde')
SIGNIFICANT_DIGITS = 12

# environment
THREADS_ENV = 'POLICY_DYN_THREADS'
