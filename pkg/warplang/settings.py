"""
Django settings for the warplang project.
"""
import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Nothing is served, but Django refuses to start without one.
SECRET_KEY = os.getenv('SECRET_KEY', 'warplang-insecure-dev-key')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition
INSTALLED_APPS = [
    # Local apps
    'core',
    'calculus',
]


LOG_LEVEL = os.getenv('WARPLANG_LOG_LEVEL', 'WARNING')

LOGGING = {
      'version': 1,
      'disable_existing_loggers': False,
      'handlers': {
          'console': {'class': 'logging.StreamHandler'},
      },
      'root': {
          'level': 'WARNING',
          'handlers': ['console'],
      },
      'loggers': {
          'core': {'level': LOG_LEVEL, 'handlers': ['console'], 'propagate': False},
          'calculus': {'level': LOG_LEVEL, 'handlers': ['console'], 'propagate': False},
      },
  }


# Database (unused by the language itself; the test runner still wants one)
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True


# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ============================================================
# Warplang Configuration
# ============================================================
WARPLANG = {
    # Fuel used by `warplang eval` when --steps is not given
    'DEFAULT_STEPS': int(os.getenv('WARPLANG_DEFAULT_STEPS', 5)),
    # Upper bound accepted for --steps
    'MAX_STEPS': int(os.getenv('WARPLANG_MAX_STEPS', 64)),
    # Check every top-level value against its type after evaluation
    'CHECK_VALUES': os.getenv('WARPLANG_CHECK_VALUES', 'False') == 'True',
    # Deeply nested terms and long streams recurse in the checker and evaluator
    'RECURSION_LIMIT': int(os.getenv('WARPLANG_RECURSION_LIMIT', 20000)),
}
