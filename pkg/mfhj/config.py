import os
from dotenv import load_dotenv


load_dotenv()
WORKERS = int(os.getenv("MFHJ_WORKERS", "1"))
LOG_LEVEL = os.getenv("MFHJ_LOG_LEVEL", "INFO")
LOG_PATH = os.getenv("MFHJ_LOG_PATH")

QUADRATURE_NODES = int(os.getenv("MFHJ_QUADRATURE_NODES", "128"))
ENUMERATION_BUDGET = int(os.getenv("MFHJ_ENUMERATION_BUDGET", "2000000"))

# Solver constants
FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAX_ITER = 10_000
DAMPING = 0.5
SCAN_POINTS = 257
GOLDEN_TOL = 1e-12
TIE_TOL = 1e-12
SHOCK_LINE_TOL = 1e-14
SHOCK_OFFSET = 1e-8
SYMMETRY_TOL = 1e-12
ENTROPY_TOL = 1e-9

QUADRATURE_RTOL = 1e-12
LAPLACE_SIGMAS = 12.0
