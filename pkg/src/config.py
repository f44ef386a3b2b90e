import os
from pathlib import Path

APP_ROOT = Path(__file__).resolve().parent

APP_NAME = "ordinalia"
APP_VERSION = "1.0.0"
REPORT_SCHEMA_VERSION = "1.0"

FIXTURE_DIR = Path(os.getenv("ORDINALIA_FIXTURE_DIR") or Path.cwd() / "fixtures")

LOG_LEVEL = os.getenv("ORDINALIA_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

MAX_COEFFICIENT = 2**63 - 1
MAX_EXPONENT = 64

SUBSET_STATE_LIMIT = int(os.getenv("ORDINALIA_SUBSET_LIMIT", str(2**16)))
NU_CHOICE_LIMIT = 100_000
NORMALIZE_MAX_STEPS = 100_000
PREDICATE_FAMILY_LIMIT = 20

BLANK = "_"
TUPLE_SEPARATOR = "|"
