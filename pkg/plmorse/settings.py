import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    "DJANGO_SECRET_KEY",
    "django-insecure-plmorse-local-only-0x7f3c9a1e5b2d4f6081a3c5e7",
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get("DJANGO_DEBUG", "True") == "True"

ALLOWED_HOSTS = [
    "localhost",
    "127.0.0.1",
    "*",
]


# Application definition
INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "django.contrib.staticfiles",
    "surfaces.apps.SurfacesConfig",
    "analysis.apps.AnalysisConfig",
    "rest_framework",
    "drf_spectacular",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.middleware.common.CommonMiddleware",
    "plmorse.api_error_handler.ComprehensiveAPIErrorHandler",  # JSON envelopes for every /api/ error
]

ROOT_URLCONF = "plmorse.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.request",
            ],
        },
    },
]

WSGI_APPLICATION = "plmorse.wsgi.application"


# Database (unused by the analysis itself, kept so management commands boot)
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}


# Internationalization
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = True
USE_TZ = True


# Static files (CSS, JavaScript, Images)
STATIC_URL = "static/"
STATIC_ROOT = os.path.join(BASE_DIR, "staticfiles")

# Default primary key field type
DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

REST_FRAMEWORK = {
    "DEFAULT_SCHEMA_CLASS": "drf_spectacular.openapi.AutoSchema",
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [
        "rest_framework.permissions.AllowAny",
    ],
    "UNAUTHENTICATED_USER": None,
    "EXCEPTION_HANDLER": "plmorse.api_error_handler.custom_exception_handler",
}

SPECTACULAR_SETTINGS = {
    "TITLE": "plmorse",
    "DESCRIPTION": "PL Morse fields on triangulated surfaces: Reeb graphs, "
    "Moebius band decompositions and stabilizer group expressions.",
    "VERSION": "1.0.0",
}


# Analysis knobs
PLMORSE_RANDOM_MAX_ATTEMPTS = int(os.environ.get("PLMORSE_RANDOM_MAX_ATTEMPTS", "50"))
PLMORSE_MAX_QUOTIENT_ORDER = int(os.environ.get("PLMORSE_MAX_QUOTIENT_ORDER", "64"))
PLMORSE_BATCH_WORKERS = int(os.environ.get("PLMORSE_BATCH_WORKERS", "4"))
PLMORSE_EDGE_SAMPLE_FRACTIONS = tuple(
    float(part)
    for part in os.environ.get("PLMORSE_EDGE_SAMPLE_FRACTIONS", "0.25,0.5,0.75").split(",")
    if part.strip()
)
PLMORSE_JSON_INDENT = int(os.environ.get("PLMORSE_JSON_INDENT", "2"))


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",  # 'verbose' adds process/thread ids for batch runs
        },
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
        "plmorse": {
            "handlers": ["console"],
            "level": os.environ.get("PLMORSE_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
        "surfaces": {
            "handlers": ["console"],
            "level": os.environ.get("PLMORSE_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
        "analysis": {
            "handlers": ["console"],
            "level": os.environ.get("PLMORSE_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
        "": {  # This is the root logger
            "handlers": ["console"],
            "level": "WARNING",
        },
    },
}
