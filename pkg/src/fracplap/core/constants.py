"""
Constants for fracplap.

This module contains all static numeric defaults used throughout the toolkit.
"""

# Package identity
PACKAGE_NAME = "fracplap"
OUTPUT_DIR_ENV = "FRACPLAP_OUTPUT_DIR"  # Environment variable for output directory
CONFIG_PATH_ENV = "FRACPLAP_CONFIG"  # Environment variable for a default config file
LOG_LEVEL_ENV = "FRACPLAP_LOG_LEVEL"  # Environment variable for log level
DEFAULT_OUTPUT_DIR = "fracplap-out"

# Weight class feasibility search
WITNESS_SCAN_POINTS = 1000  # Uniform grid size over the admissible a-interval
WITNESS_RELATIVE_SLACK = 1e-9  # Minimum relative width of the feasible 1/r interval
TABULATED_R_CANDIDATES = 50  # Candidate 1/r values per a for tabulated weights
TABULATED_MIN_MARGIN = 0.05  # Integrability margin required for tabulated weights
MONTE_CARLO_SAMPLES = 400_000  # Samples for superlevel-set volume cross-checks

# Lorentz numeric branch
LORENTZ_DECADES_PER_REFINEMENT = 40  # Decades of t removed from the cutoff per refinement
LORENTZ_POINTS_PER_DECADE = 24  # Trapezoid nodes per decade in log t
LORENTZ_GROWTH_FACTOR = 2.0  # Growth across two refinements that signals divergence
LORENTZ_CONVERGENCE_TOL = 1e-3  # Relative increment accepted as convergence
LORENTZ_BAND = 0.02  # Half-width of the near-threshold band

# Eigen solvers
DEFAULT_TOL = 1e-10  # Default residual tolerance for eigen solvers
DEFAULT_MAX_ITER = 2000  # Default iteration cap
DEFAULT_STEP0 = 1.0  # Initial Armijo step
DEFAULT_SEED = 0  # Default seed for deterministic starts
ARMIJO_C = 1e-4  # Sufficient decrease constant
ARMIJO_MIN_STEP = 1e-14  # Smallest step before a descent run is declared stalled
NORMALIZATION_TOL = 1e-9  # |∫h|u|^p − 1| allowed on the constraint set
PROJECTION_RETRIES = 5  # Fresh starts after a failed constraint projection
SIMPLICITY_TOL = 1e-6  # Alignment distance for proportional minimizers
PATH_POINTS = 32  # Default number of points on an odd path
PATH_MIN_SPACING = 1e-8  # Consecutive points closer than this are redistributed
PATH_MAX_ITER = 3000  # Relaxation sweeps for the odd-path minimax
PATH_TOL = 1e-10  # Relative change of the path maximum that ends relaxation
SIGN_CHANGE_MAGNITUDE = 1e-6  # Both signs must reach this magnitude

# Dual norm ascent
DUAL_NORM_MAX_ITER = 500  # Ascent iterations
DUAL_NORM_TOL = 1e-12  # Relative improvement that ends the ascent
PSEUDO_DIFF_FLOOR = 1e-12  # Floor on |t| in p−2 powers for p < 2

# De Giorgi iteration
DEGIORGI_N_MAX = 40  # Default number of levels
DEGIORGI_THRESHOLD = 1e-14  # Z_{n_max} < threshold · Z_0 counts as converged
KSTAR_BISECTION_STEPS = 80  # Bisection steps for k*
KSTAR_SAFETY = 1e-9  # max(u)/2 · (1 + safety) always certifies
SCALING_MIN_SOLUTIONS = 5  # Minimum number of solutions for a scaling fit
SCALING_MIN_DECADES = 2.0  # Minimum spread of |u|_q̃ in decades

# Nonlinear solvers
RESONANCE_GUARD = 1e-3  # Excluded relative neighborhood of λ₁
CONDITION_THRESHOLD = 1e10  # Condition number that signals a singular system
FREDHOLM_STARTS = 8  # Deterministic multi-starts for p ≠ 2
NEWTON_MAX_ITER = 100  # Damped Newton iterations
NEWTON_TOL = 1e-10  # Residual tolerance for Newton solves
SMALL_SOLUTION_STARTS = 16  # Multi-starts per level
DEDUP_TOL = 1e-4  # L² distance below which two solutions coincide
HYPOTHESIS_T_MIN = 1e-8  # Smallest |t| on the hypothesis sampling grid
HYPOTHESIS_T_MAX = 1e2  # Largest |t| on the hypothesis sampling grid
HYPOTHESIS_T_POINTS = 400  # Log-spaced samples of |t|
T1_SAFETY = 0.9  # Fraction of the scanned t1 kept as t1
GAMMA_FRACTION = 0.5  # γ as a fraction of its admissible upper bound

# Continuation
BRANCH_EPSILON = 1e-2  # Start amplitude ε of (λ₁, ε e₁)
BRANCH_STEP = 1e-2  # Arclength increment in the E-norm
BRANCH_MIN_STEP = 1e-6  # Branch terminates below this step
BRANCH_MAX_NORM = 1e3  # Branch terminates once ‖u‖ exceeds this
BRANCH_LAMBDA_FACTOR = 10.0  # Branch terminates once λ > factor · λ₂
BIFURCATION_SMALL_NORM = 0.1  # Points with ‖u‖ below this enter extrapolation
BIFURCATION_MIN_POINTS = 5  # Minimum number of small-norm points

# Output formats
CSV_FLOAT_FORMAT = "%.17g"  # Seventeen significant digits
