import os
import pathlib
from importlib import resources
from dotenv import load_dotenv

# Load environment variables from .env file if present
load_dotenv()

# Base paths - handle both development and installed package
try:
    BASE_DIR = pathlib.Path(str(resources.files("rgbose")))
except (ImportError, ModuleNotFoundError, TypeError):
    BASE_DIR = pathlib.Path(__file__).parent.absolute()

SCHEMAS_DIR = BASE_DIR / "schemas"
RUN_CONFIG_SCHEMA_PATH = SCHEMAS_DIR / "run_config.json"
POWERCOUNT_INPUT_SCHEMA_PATH = SCHEMAS_DIR / "powercount_input.json"

# Persistent quadrature cache
CACHE_DIR = pathlib.Path(os.getenv("RGBOSE_CACHE_DIR", str(pathlib.Path.home() / ".cache" / "rg-bose")))
CACHE_ENABLED = os.getenv("RGBOSE_CACHE_ENABLED", "true").lower() == "true"

# Parallel sweeps in the CLI
THREADS = max(1, int(os.getenv("RGBOSE_THREADS", "1")))

# Quadrature defaults
DEFAULT_TOL = float(os.getenv("RGBOSE_TOL", "1e-8"))
DEFAULT_ABS_FLOOR = 1e-13
DEFAULT_MAX_SUBDIVISIONS = 200
DEFAULT_GAUSS_NODES = 96

LOG_LEVEL = os.getenv("RGBOSE_LOG_LEVEL", "INFO").upper()

# Output formatting
CSV_SIGNIFICANT_DIGITS = 17

# Exhaustive tree enumeration limit
TREE_ENUMERATION_MAX = 12

# One-loop 3d counterterm hook: beta^nu_j = lambda eps^-1/2 beta2 (-c1 l_j^2 + c2 l_j nu_j)
NU_HOOK_C1 = float(os.getenv("RGBOSE_NU_HOOK_C1", "1.0"))
NU_HOOK_C2 = float(os.getenv("RGBOSE_NU_HOOK_C2", "2.0"))
