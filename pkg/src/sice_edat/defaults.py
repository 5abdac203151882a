"""Default solver constants.

Every default used by the estimator, the baseline and the experiment runner
lives here so that the CLI, config files and the library agree.
"""

# SICE-EDAT
LAMBDA = 0.22
# unset thr0 means thr0 = MU0 * lambda, i.e. an initial step mu0 = MU0; mu0 > 1
# makes the covariance update a non-convex combination that can go indefinite
MU0 = 1.0
DECAY = 0.9
# unset rho0 / rho_growth mean rho_k = thr_k, which keeps the Tikhonov shift
# proportional to the step and pins the covariance-domain fixed point at
# S_hat + lambda * I
RHO0 = None
RHO_GROWTH = None
MAX_ITERS = 100
REL_TOL = 0.0
SKIP_DIAGONAL = True
JITTER_BASE = 1e-8
TIKHONOV_RETRIES = 3
TIKHONOV_RETRY_FACTOR = 10.0

# G-ISTA baseline
BASELINE_LAMBDA = LAMBDA
BASELINE_STEP0 = 1.0
BASELINE_BACKTRACK = 0.5
BASELINE_MAX_ITERS = 2000
BASELINE_OBJ_TOL = 1e-8
BASELINE_PENALIZE_DIAGONAL = False

# reference oracle
REFERENCE_MAX_DIM = 10
REFERENCE_MAX_ITERS = 10**6

# synthetic problems
NNZ_PER_DIM = 10      # random graphs: target_nnz = NNZ_PER_DIM * p
NNZ_BAND = 0.2
NNZ_MAX_ATTEMPTS = 50
RNG_ALGORITHM = "PCG64"
