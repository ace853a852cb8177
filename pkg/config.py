import os
from dotenv import load_dotenv

load_dotenv()

# Worker threads for the finite-field oracle and check suites (0 = one per CPU)
WALLCROSS_JOBS = int(os.getenv("WALLCROSS_JOBS", "1"))

# Curve series precision, as a z-exponent
WALLCROSS_FLOOR = int(os.getenv("WALLCROSS_FLOOR", "-20"))
WALLCROSS_GUARD = int(os.getenv("WALLCROSS_GUARD", "8"))

# Oracle tractability guard: total dimension and field size
WALLCROSS_ORACLE_MAX_DIM = int(os.getenv("WALLCROSS_ORACLE_MAX_DIM", "4"))
WALLCROSS_ORACLE_MAX_Q = int(os.getenv("WALLCROSS_ORACLE_MAX_Q", "4"))

WALLCROSS_SEED = int(os.getenv("WALLCROSS_SEED", "7"))

WALLCROSS_LOG_FILE = os.getenv("WALLCROSS_LOG_FILE", None)
WALLCROSS_OUTPUT_DIR = os.getenv("WALLCROSS_OUTPUT_DIR", "output")
