# Dirichlet Composition Lab - Configuration File
# Edit these settings to change numerical defaults; CLI flags and .env override some of them

# Zeta Evaluation
ZETA_TERMS = 64          # Direct-sum cutoff before the Euler-Maclaurin tail
ZETA_EM_ORDER = 4        # Number of Bernoulli correction terms (<= 8)
ZETA_DOMAIN_DELTA = 0.0  # Require Re s > 1 + delta

# Dirichlet Series Truncation
N_DEFAULT = 256          # Default truncation order for series and generic symbols
N_CLI_MAX = 4096         # Largest truncation accepted from the command line
N_BASIS_DEFAULT = 64     # Input basis size for operator matrices
N_TRUNC_DEFAULT = 4096   # Output truncation for operator matrices

# Symbol Validation
BOUNDARY_SAMPLES = 4096               # Points on |z| = 1 when certifying disk lifts
CLASS_TOLERANCE = 1e-6                # Certified Re-margin may dip this far below the half-plane
SECTOR_K_DEFAULT = 32                 # Taylor order of sector lifts
SECTOR_K_MAX = 64
SECTOR_SHRINK_LADDER = [1.0, 0.999, 0.995, 0.99, 0.98, 0.95, 0.9, 0.8, 0.7, 0.5]
SECTOR_ANGLE_SLACK = 1e-6             # Allowed overshoot of the opening angle
VALIDATION_SIGMAS = [1e-4, 1e-2, 0.1, 0.5, 1.0, 3.0]
VALIDATION_T_POINTS = 512
VALIDATION_CHARACTERS = 256

# Counting Function
COUNTING_T_PERIODS = 50       # Horizontal cutoff for disk lifts, in periods 2*pi/log 2
COUNTING_T_GENERIC = 200.0    # Horizontal cutoff for generic symbols
SIGMA_MIN_DEFAULT = 1e-3      # Vertical cutoff toward Re s = 0
SIGMA_CAP = 20.0              # Fallback for the a priori bound on Re of preimages
SLAB_HEIGHT = 2.0             # Height of the horizontal slabs the search box is split into
WINDING_POINTS_PER_UNIT = 64  # Initial sampling density on box edges
WINDING_MAX_DOUBLINGS = 6
WINDING_INTEGER_TOL = 0.2     # Refuse winding numbers further than this from an integer
NEWTON_MAX_ITER = 60
NEWTON_TOL = 1e-10            # Residual |phi(s) - w| accepted after polishing
ROOT_MERGE_TOL = 1e-8
JITTER_RETRIES = 5
NONCONVERGENCE_RATIO = 0.10   # Flag when doubling T moves the value by more than 10%
EXACT_DISK_TOL = 1e-10

# Quadrature
QUAD_ORDER = 8                # Gauss-Legendre points per panel
QUAD_PANELS = 16              # Radial / sigma panels at refinement level 0
QUAD_THETA = 128              # Angular nodes at refinement level 0
QUAD_T_NODES = 48             # Vertical nodes per sigma slice
QUAD_GRADING = 0.5            # Geometric ratio of panels graded toward a singular endpoint
QUAD_SIGMA_CAP = 40.0         # Far-field cutoff for unbounded supports
QUAD_REL_TOL = 1e-4           # Quadrature non-convergence flag threshold
GENERIC_QUAD_SIDE = 12        # Nodes per side for generic symbols (strip enumeration per node)

# Operator Lab
JACOBI_TOL = 1e-12            # Relative off-diagonal Frobenius norm at convergence
JACOBI_MAX_SWEEPS = 50
SCHATTEN_P_DEFAULT = [1, 2, 4]
STANTON_TOL = 1e-3
HS_TOL = 1e-3
TOEPLITZ_TOL = 0.05

# Criteria
DELTA_LADDER = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4]
FINITE_STEPS = [0.05, 0.02, 0.01]     # Last three relative changes of a finite-consistent trace
DIVERGENT_GROWTH = 2.0                # Trace growth required for divergent-consistent
COMPACT_DELTAS = [0.2, 0.1, 0.05, 0.02, 0.01]
COMPACT_THRESHOLD = 0.05
NONCOMPACT_STABILITY = 0.2            # Relative change of the last two ratios for a plateau
SCHUR_RATIO_BOUND = 0.75              # b in the geometric-ratio check
EMBEDDING_CONSTANT = 2.5
CARLESON_LEVELS = 8
CRITERIA_DEFAULT_P = {'lz': 2.0, 's2m': 2.0, 'weighted': 2.0, 'bergman': 4.0}  # bergman needs p >= 4

# Polytorus Monte Carlo
MC_PRIMES = 64
MC_SAMPLES = 100000
MC_BATCHES = 20
MC_SIGMA_BV = 1e-3
MC_TRUNCATION_WARNING = 1e-2
MC_HEAVY_TAIL_GROWTH = 1.5

# Reproducibility
DEFAULT_SEED = 20240101

# Logging Configuration
LOG_LEVEL = 'INFO'  # DEBUG, INFO, WARNING, ERROR, CRITICAL
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
