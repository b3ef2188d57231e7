"""
Floerkit - Configuration Module

All tunable parameters live here. Adjust these to trade search depth
against runtime without touching the algorithms.
"""

import logging
import os

# =============================================================================
# PARALLELISM
# =============================================================================

# Worker processes for enumeration (outer loop over HFK tables)
# Override with FLOERKIT_THREADS env var
THREADS = os.environ.get("FLOERKIT_THREADS", "")

# =============================================================================
# LOGGING
# =============================================================================

LOG_LEVEL = os.environ.get("FLOERKIT_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# =============================================================================
# LINEAR ALGEBRA
# =============================================================================

# Largest chain group the exhaustive cycle/boundary counter will enumerate
BRUTE_FORCE_MAX_GENERATORS = 12

# =============================================================================
# CLASSIFICATION
# =============================================================================

# Filtered equivalence search refuses complexes larger than this (after reduce)
EQUIVALENCE_MAX_GENERATORS = 14

# Free bits allowed in one leading block of the equivalence search; more raises TooLarge
EQUIVALENCE_BLOCK_BITS = 16

# Simplification move budget is this factor times (generator count)^2
SIMPLIFY_BUDGET_FACTOR = 10

# =============================================================================
# ENUMERATION
# =============================================================================

DEFAULT_MAX_STEP = 1

# Tables with more generators than this are skipped by the enumerator
ENUMERATION_MAX_GENERATORS = 14

# =============================================================================
# HTTP API
# =============================================================================

HOST = os.environ.get("HOST", "0.0.0.0")
# Use PORT env var (Railway sets this), default to 5000
PORT = int(os.environ.get("PORT", 5000))

# =============================================================================
# DEBUG SETTINGS (Development Only)
# =============================================================================

# Checks the region-homology fingerprint after every simplification move
DEBUG_MODE = os.environ.get("DEBUG_MODE", "").lower() == "true"


def get_thread_count() -> int:
    """Returns the validated worker count (at least 1)"""
    if not THREADS:
        return os.cpu_count() or 1
    try:
        count = int(THREADS)
    except ValueError:
        logging.getLogger(__name__).warning(
            f"Ignoring non-integer FLOERKIT_THREADS={THREADS!r}"
        )
        return 1
    return max(1, count)


def get_log_level(verbose: bool = False) -> int:
    """Returns the logging level, DEBUG when verbose is requested"""
    if verbose:
        return logging.DEBUG
    return getattr(logging, LOG_LEVEL, logging.INFO)
