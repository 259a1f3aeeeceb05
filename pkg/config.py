"""Configuration settings for the QUBO trainer."""
import os
from dotenv import load_dotenv

load_dotenv()

# Exact solver
QUBO_EXACT_MAX_VARIABLES = int(os.getenv("QUBO_EXACT_MAX_VARIABLES", 25))
QUBO_OPTIMA_TOLERANCE = float(os.getenv("QUBO_OPTIMA_TOLERANCE", 1e-9))
QUBO_SOLVER_WORKERS = int(os.getenv("QUBO_SOLVER_WORKERS", 1))

# Annealing schedule
QUBO_ANNEAL_SWEEPS = int(os.getenv("QUBO_ANNEAL_SWEEPS", 200))
QUBO_ANNEAL_RESTARTS = int(os.getenv("QUBO_ANNEAL_RESTARTS", 50))
QUBO_ANNEAL_T_LO = float(os.getenv("QUBO_ANNEAL_T_LO", 1e-3))
QUBO_ANNEAL_SEED = int(os.getenv("QUBO_ANNEAL_SEED", 0))

# Encoding
QUBO_DEFAULT_PRECISION = os.getenv("QUBO_DEFAULT_PRECISION", "-2,-1,-0.5,0.5,1,2")

# Oracles
QUBO_ORACLE_MAX_POINTS = int(os.getenv("QUBO_ORACLE_MAX_POINTS", 12))
QUBO_ORACLE_MAX_GRID = int(os.getenv("QUBO_ORACLE_MAX_GRID", 1_000_000))

# Application Configuration
QUBO_LOG_LEVEL = os.getenv("QUBO_LOG_LEVEL", "WARNING")
SCHEMA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "schemas")
REPORT_SCHEMA_VERSION = "1.0"
