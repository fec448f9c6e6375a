"""
Constants and Configuration for pshlab
Centralized location for all magic numbers and numerical defaults.
"""

import math

# ============================================================================
# Hopf Coordinates and Charts
# ============================================================================

CHART_SWITCH_LOW = 0.9  # Below this |w| a direction never leaves its chart
CHART_SWITCH_HIGH = 1.1  # Above this |w| a direction is moved to the other chart
ETA_PERIOD = 4.0 * math.pi  # Range of the real Hopf fiber angle eta
FS_TOTAL_MASS = math.pi  # Fubini-Study volume of CP^1

# ============================================================================
# Direction Grids
# ============================================================================

DEFAULT_N_THETA = 64  # Gauss-Legendre nodes in cos(theta)
DEFAULT_N_PHI = 128  # Uniform nodes in phi
MIN_GRID_NODES = 8  # Smallest admissible n_theta / n_phi
TORIC_N_PHI = 8  # phi nodes for toric members (integrands are phi-independent)
ADAPTED_N_PHI = 32  # phi nodes of log-polar grids for non-toric members
PANEL_NODES = 8  # Gauss-Legendre nodes per log-polar panel
PANEL_WIDTH = 1.0  # Width of one log-polar panel in x = log tan(theta/2)
LAYER_MARGIN = 16.0  # Extent of the log-polar grid beyond the deepest layer
MAX_LOG_POLAR_EXTENT = 340.0  # Keeps cosh(x)^2 representable in float64
GRID_WEIGHT_TOL = 1e-10  # Allowed relative deviation of sum(weights) from pi
NON_INVARIANT_N_PSI = 16  # Hopf-fiber phases for functions without S1 symmetry

# ============================================================================
# Finite Differences
# ============================================================================

FD_STEP_T = 1e-4  # Step in t for first derivatives (5-point central)
FD_STEP_T2 = 1e-3  # Step in t for second derivatives
FD_STEP_ANGLE = 1e-3  # Step in theta / phi for spherical stencils
FD_STEP_HESSIAN_REL = 1e-4  # 4D Hessian step relative to |z|
SLOPE_STEP = 1e-5  # Forward difference step for directional slopes
FRIEDRICHS_STEP = 1e-5  # Step in log-radius for r d/dr of u_eps

# ============================================================================
# Tolerances
# ============================================================================

INVARIANCE_TOL = 1e-9  # Relative tolerance of the S1-invariance sampler
INVARIANCE_SAMPLES = 200  # Default number of (point, angle) samples
MONOTONE_TOL = 1e-9  # Allowed negative noise in u_dot and MA densities
CONVERGENCE_REL_TOL = 1e-3  # Last-two-samples spread that triggers a warning
VERDICT_TOL = 1e-2  # Default tolerance of theorem verdicts
COEFF_SNAP_TOL = 1e-12  # Relative size below which rotated coefficients are zero
ROOT_MATCH_TOL = 1e-8  # Leading form is considered zero at a root below this
NORMALIZE_RADIUS = 1.0 - 1e-12  # Sphere used to sample sup over B1
NORMALIZE_TARGET = -1.0  # Required upper bound after normalize
UNBOUNDED_LIMIT = 1e12  # Sampled sup above this is reported as unbounded
COMMON_ZERO_TOL = 1e-12  # Distance to the zero sets of f and g, relative to |z|, of a common zero
COMMON_ZERO_POLISH = 3  # Newton steps applied to a converged root before it is judged

# ============================================================================
# Lelong Numbers and Schedules
# ============================================================================

DEEP_T_ANALYTIC = -40.0  # Deepest t for kinds with analytic jets
DEEP_T_FINITE_DIFF = -25.0  # Deepest t for finite-difference kinds
DEEP_TAIL_T = -500.0  # Below this, profile slopes use exact asymptotics
DEFAULT_T_MAX = -2.0  # Shallowest t of default schedules
DEFAULT_T_STEP = 0.5  # Step of default schedules
DEFAULT_A_SCHEDULE = (2.0, 5.0, 10.0, 20.0)  # Distances A for lambda limits

# ============================================================================
# Monge-Ampere Oracles
# ============================================================================

MA_DENSITY_FACTOR = 8.0  # (dd^c u)^2 = 8 det(u_jk) dlambda
SHELL_INNER_T = -10.0  # log r0 of the inner shell radius
ATOMIC_SHORTCUT_REL = 1e-6  # Shell integral below this fraction of the flux
SHELL_PANEL_WIDTH = 1.0  # t-panel width of the 4D shell quadrature
ORACLE_N_THETA = 16  # Sphere nodes of the 4D shell quadrature
ORACLE_N_PHI = 16
ORACLE_N_PSI = 8
FLUX_N_THETA = 32  # Sphere nodes of the boundary flux
FLUX_N_PHI = 32
MC_SAMPLES = 200000  # Monte Carlo points for shell integrals and L1 norms
DEFAULT_SEED = 20240611  # Seed recorded in every report
VOLUME_T_FLOOR = -10.0  # Deepest t used by the volume oracle in residual_mass

# ============================================================================
# Mollifier
# ============================================================================

MOLLIFIER_RADIAL_NODES = 16  # Gauss-Legendre nodes in s on [0, 1]
MOLLIFIER_HOPF_NODES = 4  # Nodes per Hopf angle (4 x 4 x 4 on S^3)
MIN_ACCEPTED_EPSILON = 5e-3  # Smallest epsilon the acceptance checks use
FRIEDRICHS_DELTA = 0.1  # delta of ||grad u||_L1(B_{1-delta}), fixed per run

# ============================================================================
# Reports and CLI
# ============================================================================

SCHEMA_VERSION = 1  # Top-level "schema" field of JSON reports
CSV_FLOAT_FORMAT = "%.12g"  # Fixed float format of CSV outputs
JSON_FLOAT_DIGITS = 12  # Significant digits kept in JSON floats
TRACE_COLUMNS = ("t", "I", "J", "E", "cross", "K", "nu_r", "script_I")
REPORT_COLUMNS = (
    "name", "parameter", "nu", "nu_lower", "nu_upper", "lambda", "lambda_lower",
    "lambda_upper", "tau", "tau_lower", "tau_upper", "tau_method", "lower_bound",
    "upper_bound", "verdict_lower", "verdict_upper", "s1_invariant",
)
DEFAULT_OUT_DIR = "pshlab_out"  # Output directory of the CLI
DEFAULT_GRID = "64x128"  # --grid default (n_theta x n_phi)
DEFAULT_EPSILONS = (0.01, 0.005)  # --eps default of regularize-check
DEFAULT_A_MAX = 20.0  # --a-max default; the A-schedule must reach 20
SLOPE_WINDOW = (2.0, 3.0)  # (A, B) of the regularized slope check
QUADRATURE_ACCURACY = 1e-8  # Best accuracy the tau/nu/lambda estimators certify
REGULARIZE_GRID = (16, 32)  # Direction grid of the mollified slope searches
REGULARIZE_COLUMNS = (
    "name", "epsilon", "friedrichs_ratio", "M_B_eps", "M_A", "C_fit", "bound", "slope_passed",
)
EXIT_OK = 0
EXIT_FAILED = 1  # Failed verdicts and module errors
EXIT_USAGE = 2  # Unknown functions and invalid arguments

# ============================================================================
# Chart Configuration
# ============================================================================

# Plotly trace colors
CHART_COLOR_I = "#4169E1"  # Royal blue for I(t)
CHART_COLOR_J = "#32CD32"  # Lime green for J(t)
CHART_COLOR_K = "#DC143C"  # Crimson for K(t)
CHART_COLOR_NU = "#FF8C00"  # Dark orange for nu(0, r)
