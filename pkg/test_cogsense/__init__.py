import os

os.environ["DJANGO_SETTINGS_MODULE"] = "test_cogsense.settings"


import django

django.setup()
