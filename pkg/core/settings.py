"""
Django settings for the l2sep project.

The project hosts a miniature branch-and-cut solver and the learning pipeline
that chooses which cutting-plane separators to activate per instance and per
separation round. Django provides configuration, the management-command CLI,
the test runner and the bookkeeping database for experiment runs.
"""

import os
from pathlib import Path
import dj_database_url
from dotenv import load_dotenv
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', 'l2sep-local-only')

DEBUG = os.getenv('DEBUG', 'FALSE') == 'TRUE'

ALLOWED_HOSTS = ['localhost', '127.0.0.1']

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'rest_framework',
    'instances',
    'lp',
    'separators',
    'bnc',
    'metrics',
    'subspace',
    'model',
    'bandit',
    'harness',
]

# Database
# Only the experiment bookkeeping (runs, stage checkpoints) lives here.

DATABASES = {
    'default': dj_database_url.config(
        default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}",
        conn_max_age=600,
    )
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

TIME_ZONE = 'UTC'

USE_TZ = True

# ─── Logging ─────────────────────────────────────────────────────────────────
LOG_LEVEL = os.getenv('L2SEP_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': os.getenv('DJANGO_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}

# ─── Solver / learning defaults ──────────────────────────────────────────────
L2SEP = {
    # branch-and-cut
    'SEP_ROUNDS_ROOT': int(os.getenv('L2SEP_SEP_ROUNDS_ROOT', '30')),
    'NODE_SEP_FREQ': int(os.getenv('L2SEP_NODE_SEP_FREQ', '4')),
    'MAX_CUTS_PER_ROUND': int(os.getenv('L2SEP_MAX_CUTS_PER_ROUND', '20')),
    'PARALLELISM_THRESHOLD': float(os.getenv('L2SEP_PARALLELISM_THRESHOLD', '0.9')),
    'NODE_LIMIT': int(os.getenv('L2SEP_NODE_LIMIT', '20000')),
    'EFFORT_WEIGHTS': {
        'pivot': float(os.getenv('L2SEP_W_PIVOT', '1.0')),
        'sepcall': float(os.getenv('L2SEP_W_SEPCALL', '1.0')),
        'node': float(os.getenv('L2SEP_W_NODE', '25.0')),
    },
    'HARD_STOP_RATIO': float(os.getenv('L2SEP_HARD_STOP_RATIO', '3.0')),

    # rewards
    'R_MIN': float(os.getenv('L2SEP_R_MIN', '-1.5')),

    # neural UCB
    'UCB_GAMMA': float(os.getenv('L2SEP_UCB_GAMMA', '0.9375')),
    'UCB_LAMBDA': float(os.getenv('L2SEP_UCB_LAMBDA', '0.001')),

    # harness
    'JOBS': int(os.getenv('L2SEP_JOBS', str(os.cpu_count() or 1))),
    'OUTPUT_DIR': Path(os.getenv('L2SEP_OUTPUT_DIR', BASE_DIR / 'runs')),
}
