"""
Django settings for the bangbang project.

The project has no web surface: it is a set of apps exposing the pulse
synthesis library plus management commands (``python manage.py <command>``).
Every numerical tolerance can be overridden from the environment or from a
``.env`` file at the project root.
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env at project root (development convenience)
try:
    from dotenv import load_dotenv  # type: ignore

    load_dotenv(BASE_DIR / ".env")
except Exception:
    pass


SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "bangbang-local-only-key")

DEBUG = os.environ.get("DJANGO_DEBUG", "0") == "1"

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    "numerics",
    "hypersphere",
    "controls",
    "transfer",
    "timeenergy",
    "unitary",
    "simulator",
    "cli",
]

# No persistence: schedules, states and matrices live in plain files.
DATABASES = {}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

USE_TZ = True
TIME_ZONE = "UTC"


# Numerical tolerances
PULSE_CLUSTER_TOL = float(os.environ.get("PULSE_CLUSTER_TOL", "1e-8"))
PULSE_UNITARY_TOL = float(os.environ.get("PULSE_UNITARY_TOL", "1e-10"))
PULSE_UNIT_TOL = float(os.environ.get("PULSE_UNIT_TOL", "1e-10"))
PULSE_PRUNE_TOL = float(os.environ.get("PULSE_PRUNE_TOL", "1e-12"))
PULSE_ZERO_TOL = float(os.environ.get("PULSE_ZERO_TOL", "1e-12"))
PULSE_DEFLATION_TOL = float(os.environ.get("PULSE_DEFLATION_TOL", "1e-8"))

# Acceptance thresholds used by the commands after propagating a schedule
PULSE_FIDELITY_TOL = float(os.environ.get("PULSE_FIDELITY_TOL", "1e-10"))
PULSE_RESIDUAL_TOL = float(os.environ.get("PULSE_RESIDUAL_TOL", "1e-8"))

# Cost ratio used when a command gets neither --lambda nor --amplitude
PULSE_DEFAULT_LAMBDA = float(os.environ.get("PULSE_DEFAULT_LAMBDA", "1.0"))

# Verification suite
PULSE_VERIFY_TOLERANCE_SCALE = float(os.environ.get("PULSE_VERIFY_TOLERANCE_SCALE", "1.0"))
PULSE_VERIFY_PAIRS = int(os.environ.get("PULSE_VERIFY_PAIRS", "20"))
PULSE_VERIFY_UNITARIES = int(os.environ.get("PULSE_VERIFY_UNITARIES", "5"))
PULSE_VERIFY_MAX_DIM = int(os.environ.get("PULSE_VERIFY_MAX_DIM", "8"))


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": os.environ.get("PULSE_LOG_LEVEL", "WARNING"),
    },
}
