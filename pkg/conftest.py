"""Configure Django before test collection so the SimpleTestCase suites run under pytest."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
django.setup()
