import logging
import os
from pathlib import Path

logger = logging.getLogger(__name__)

# Base directory for the project
BASE_DIR = Path(__file__).parent.parent

# verify-paper writes its machine-readable report here unless --out is given.
REPORT_DIR = BASE_DIR / "reports"
DEFAULT_REPORT_PATH = REPORT_DIR / "verify-paper.json"

# Search budgets applied to every solve unless overridden on the command line
DEFAULT_NODE_BUDGET = 10**9
DEFAULT_TIME_BUDGET = 600.0

# Enumeration guards
ENUMERATION_VERTEX_LIMIT = 12
BRUTE_FORCE_VERTEX_LIMIT = 8
SAT_EXHAUSTIVE_VAR_LIMIT = 30

# Two faces of K4 always touch all four vertices.
DEFAULT_K4_FACES = (0, 1)

# Per-claim budgets for verify-paper (seconds). Node budgets default to DEFAULT_NODE_BUDGET.
CLAIM_TIME_BUDGETS = {
    "gadget-forcing-k2": 300.0,
    "fig1-no-4-coloring": 60.0,
    "k4-composite-no-4-coloring": 600.0,
    "sat-cross-check": 120.0,
}

THREADS_ENV_VAR = "FUMLAB_THREADS"
LOG_LEVEL_ENV_VAR = "FUMLAB_LOG_LEVEL"


def get_thread_count() -> int:
    """
    Reads the worker cap from the environment. Read at call time so a .env
    loaded by app.py is honoured.
    """
    raw = os.getenv(THREADS_ENV_VAR)
    if not raw:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {THREADS_ENV_VAR}={raw!r}; using 1 worker.")
        return 1
    if threads < 1:
        logger.warning(f"Ignoring {THREADS_ENV_VAR}={threads}; using 1 worker.")
        return 1
    return threads


def get_log_level() -> str:
    return os.getenv(LOG_LEVEL_ENV_VAR, "WARNING").upper()
