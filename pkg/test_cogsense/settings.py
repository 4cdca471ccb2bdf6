SECRET_KEY = "Please do not spew DeprecationWarnings"

# Cogsense settings for running tests.
DATABASES = {
    "default": {"ENGINE": "django.db.backends.sqlite3", "NAME": ":memory:"}
}

INSTALLED_APPS = ["cogsense"]

USE_TZ = True

COGSENSE_FUSERS = {
    "and": {"ENGINE": "cogsense.fusion.hard_rules.AndFuser"},
    "or": {"ENGINE": "cogsense.fusion.hard_rules.OrFuser"},
    "majority": {"ENGINE": "cogsense.fusion.hard_rules.MajorityFuser"},
    "k_of_m": {"ENGINE": "cogsense.fusion.hard_rules.KOfMFuser"},
    "nlms": {"ENGINE": "cogsense.fusion.nlms.NlmsFuser", "STEP_SIZE": 0.5},
    "mlp": {"ENGINE": "cogsense.fusion.mlp.MlpEngine", "HIDDEN_UNITS": 10},
    "mock": {"ENGINE": "test_cogsense.mocks.MockFuser", "THRESHOLD": 0.25},
}
