import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "plmorse.settings")
django.setup()
