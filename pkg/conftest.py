import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'gmerecycle.settings')
django.setup()
