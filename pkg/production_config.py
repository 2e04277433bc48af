"""
production_config.py - Centralized TIFS Configuration

All paths, tolerances, caps and render settings in one place.
No hardcoding across the codebase.
"""

import json
import os
import sys
from pathlib import Path

# ============================================================================
# PATHS (Auto-detect project root)
# ============================================================================
PROJECT_ROOT = Path(__file__).parent.absolute()

# Fixture systems (one JSON document per system)
SYSTEMS_DIR = PROJECT_ROOT / "systems"
SYSTEM_FILES = {
    "BIN": SYSTEMS_DIR / "bin.json",
    "FIB": SYSTEMS_DIR / "fib.json",
    "SIER": SYSTEMS_DIR / "sier.json",
    "GD2": SYSTEMS_DIR / "gd2.json",
}

# ============================================================================
# NUMERIC TOLERANCES
# ============================================================================
MAP_TOLERANCE = 1e-9            # tile identity: matrix and translation
ORTHOGONALITY_TOLERANCE = 1e-9  # max |O^T O - I|
COMPOSE_TOLERANCE = 1e-12       # map-level composition identities
HULL_TOLERANCE = 1e-15          # 1D component hull iteration
HULL_MAX_ITERATIONS = 2000

# Hausdorff dimension (bisection on D)
DIMENSION_RADIUS_TOLERANCE = 1e-10
DIMENSION_BRACKET_LOW = 1e-6
DIMENSION_MAX_ITERATIONS = 200

# ============================================================================
# GEOMETRY
# ============================================================================
MAX_CLOUD_WORDS = 2 ** 22   # DepthTooLarge above this
CHAOS_BURN_IN = 64
DEFAULT_RNG_SEED = 20240917
DEFAULT_CHAOS_POINTS = 100000

# Component-overlap diagnosis (warning-level)
OVERLAP_CHECK_DEPTH = 9
OVERLAP_TOLERANCE = 1e-7
OVERLAP_FRACTION = 0.05      # 2D: share of one cloud lying on another

# ============================================================================
# DYNAMICS
# ============================================================================
RIGIDITY_DEPTH = 12
RIGIDITY_TOLERANCE = 1e-6
EQUIVALENCE_BOUND = 8

# ============================================================================
# RENDER
# ============================================================================
RENDER_WIDTH = 800
RENDER_HEIGHT = 800
RENDER_DEPTH = 8
RENDER_MARGIN = 0.02      # viewport padding as a fraction of the span
TILE_HEIGHT_RATIO = 0.10    # 1D tiles: height as a fraction of viewport width
POINT_RADIUS = 0.35         # 2D tile clouds: circle radius in pixels
BACKGROUND_COLOR = (15, 10, 40)
NUMBER_FORMAT = ".17g"

# Prototile classes are coloured in class order
COLOR_PALETTE = [
    (255, 50, 50),    # Red
    (50, 120, 255),   # Blue
    (50, 255, 120),   # Green
    (255, 220, 0),    # Yellow
    (200, 50, 255),   # Purple
    (255, 140, 0),    # Orange
    (20, 200, 230),   # Cyan
    (250, 200, 20),   # Gold
]

# ============================================================================
# LOGGING
# ============================================================================
VERBOSE = False


def log(tag, message, level="INFO"):
    """
    Bracket-tagged diagnostics on standard error.

    INFO lines only show when VERBOSE is set; WARN and ERROR always show.
    Standard output is reserved for command results.
    """
    if level == "INFO" and not VERBOSE:
        return
    marker = "" if level == "INFO" else f"{level} "
    print(f"  [{tag}] {marker}{message}", file=sys.stderr)


def set_verbose(flag):
    global VERBOSE
    VERBOSE = bool(flag)


# ============================================================================
# SYSTEM LOADING
# ============================================================================
def resolve_system_path(name_or_path):
    """Fixture name ("FIB") or a filesystem path -> Path."""
    key = str(name_or_path).upper()
    if key in SYSTEM_FILES:
        return SYSTEM_FILES[key]
    return Path(name_or_path)


def load_system_spec(name_or_path):
    """
    Load a raw system description (JSON object).

    Returns
    -------
    dict : {
        "dimension": 1,
        "base_ratio": "0.5",
        "vertices": [1],
        "maps": [{"a": 1, "O": [[1]], "q": [0], "tail": 1, "head": 1}, ...]
    }
    """
    from tifs_core import ConfigError

    path = resolve_system_path(name_or_path)
    if not os.path.exists(path):
        raise ConfigError(f"system file not found: {path}", field="")

    try:
        with open(path, 'r', encoding='utf-8') as f:
            spec = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})", field="")

    log("config", f"Loaded system from {path}")
    return spec


def load_system(name_or_path):
    """Load and validate a system; returns a TIFS."""
    from tifs_core import validate_tifs
    return validate_tifs(load_system_spec(name_or_path))
