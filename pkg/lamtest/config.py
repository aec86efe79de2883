import os
from dotenv import load_dotenv

# Load variables from .env into environment
load_dotenv()

_invalid: list[str] = []


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        _invalid.append(name)
        return default
    if value < 0:
        _invalid.append(name)
        return default
    return value


# =========================
# SEARCH BOUNDS
# =========================
MAX_STATES = _int_env("LAMTEST_MAX_STATES", 200_000)
MAX_ELEMENTS = _int_env("LAMTEST_MAX_ELEMENTS", 5_000)
SEARCH_DEPTH = _int_env("LAMTEST_SEARCH_DEPTH", 8)  # delta unfoldings of Jg per derivation
STANDARDIZATION_FACTOR = _int_env("LAMTEST_STANDARDIZATION_FACTOR", 4)
FUZZ_MAX_STATES = _int_env("LAMTEST_FUZZ_MAX_STATES", 5_000)  # per search in a fuzz case; larger cases are skipped

# =========================
# INVOCATION DEFAULTS
# =========================
FUEL = _int_env("LAMTEST_FUEL", 1000)
DEPTH = _int_env("LAMTEST_DEPTH", 2)
WIDTH = _int_env("LAMTEST_WIDTH", 2)
SEED = _int_env("LAMTEST_SEED", 0)
PROBE_DEPTH = _int_env("LAMTEST_PROBE_DEPTH", 10)
WINDOW_ATOMS = _int_env("LAMTEST_WINDOW_ATOMS", 6)  # atom range for omega / zed / hf

# =========================
# LOGGING
# =========================
LOG_LEVEL = os.getenv("LAMTEST_LOG_LEVEL", "WARNING").upper()
if LOG_LEVEL not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
    _invalid.append("LAMTEST_LOG_LEVEL")

# =========================
# VALIDATION (FAIL FAST)
# =========================
if _invalid:
    raise RuntimeError(f"Invalid lamtest environment variables: {', '.join(_invalid)}")
