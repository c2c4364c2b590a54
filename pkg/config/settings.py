"""
=============================================================================
DJANGO SETTINGS FOR THE CONFORMAL STABILITY TOOLKIT
=============================================================================

The toolkit is a Django project without a database or web front end: all of
its surface is the `geometry` app's management commands. Every setting below
can be overridden from the environment or a .env file (python-decouple).

CONFIGURATION SECTIONS:

1. INSTALLED APPS
   - geometry: fields, curvature, immersion, conformal, stability and
     ellipsoid modules plus the management commands

2. NUMERICS
   - CONFSTAB_SEED: default seed for every command (--seed wins)
   - CONFSTAB_FD_STEP: default finite-difference step
   - CONFSTAB_OUTER_STEP: step used to difference Christoffel symbols
   - CONFSTAB_CONDITION_LIMIT: condition number above which a metric is
     treated as singular

3. LOGGING
   - Console logging to stderr; the geometry logger level comes from
     CONFSTAB_LOG_LEVEL so data on stdout stays machine-readable

ENVIRONMENT VARIABLES (.env file):
    CONFSTAB_SEED: integer seed (default 0)
    CONFSTAB_FD_STEP: float (default 1e-4)
    CONFSTAB_OUTER_STEP: float (default 1e-3)
    CONFSTAB_CONDITION_LIMIT: float (default 1e10)
    CONFSTAB_LOG_LEVEL: DEBUG/INFO/WARNING/ERROR (default WARNING)

=============================================================================
"""

from pathlib import Path
from decouple import config
import secrets

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Nothing is signed, but Django refuses to start without a key.
SECRET_KEY = config('SECRET_KEY', default=None)
if not SECRET_KEY:
    SECRET_KEY = 'django-insecure-dev-' + secrets.token_hex(32)

DEBUG = config('DEBUG', default=False, cast=bool)


# ====================== APPLICATION DEFINITION ======================

INSTALLED_APPS = [
    'geometry',                          # Numerical toolkit and its management commands
]

# No models, no URLs, no middleware: commands only.
DATABASES = {}
MIDDLEWARE = []


# ====================== INTERNATIONALIZATION ======================

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'                      # Timestamps in run records are UTC
USE_I18N = False
USE_TZ = True


# ====================== NUMERICS ======================

CONFSTAB_VERSION = '1.0.0'                                              # Written into every run record
CONFSTAB_SEED = config('CONFSTAB_SEED', default=0, cast=int)           # Default seed for every command
CONFSTAB_FD_STEP = config('CONFSTAB_FD_STEP', default=1e-4, cast=float)          # Central-difference step
CONFSTAB_OUTER_STEP = config('CONFSTAB_OUTER_STEP', default=1e-3, cast=float)    # Christoffel differencing step
CONFSTAB_CONDITION_LIMIT = config('CONFSTAB_CONDITION_LIMIT', default=1e10, cast=float)  # Metric-singular threshold


# ====================== LOGGING CONFIGURATION ======================

# Console-only logging on stderr; stdout is reserved for command output
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {asctime} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'geometry': {
            'handlers': ['console'],
            'level': config('CONFSTAB_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        },
    },
}
