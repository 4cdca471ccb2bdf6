from django.conf import settings

# Hypotheses.
H0 = 0
H1 = 1

# Report modes.
SOFT = "soft"
HARD = "hard"
REPORT_MODES = (SOFT, HARD)

# Statistic conventions for thresholds and theoretical curves.
REAL = "real"
COMPLEX = "complex"
CONVENTIONS = (REAL, COMPLEX)

# Primary signal kinds.
QAM = "qam"
GAUSSIAN = "gaussian"
SIGNAL_KINDS = (QAM, GAUSSIAN)

SUPPORTED_QAM_ORDERS = (4,)

# Sum-of-sinusoids fading. Fewer than 32 sinusoids is rejected.
MIN_FADING_SINUSOIDS = 32
FADING_SINUSOIDS = getattr(settings, "COGSENSE_FADING_SINUSOIDS", 256)

# Guards.
DEEP_FADE_EPSILON = getattr(settings, "COGSENSE_DEEP_FADE_EPSILON", 1e-9)
NLMS_EPSILON = getattr(settings, "COGSENSE_NLMS_EPSILON", 1e-12)

# Hard-mode fusion features are limited to this range at the fusion center.
HARD_FEATURE_RANGE = getattr(settings, "COGSENSE_HARD_FEATURE_RANGE", (0.0, 1.0))

# Signaling midpoint for on-off hard reports.
HARD_BIT_THRESHOLD = 0.5

# Defaults for the adaptive fusers.
DEFAULT_NLMS_STEP_SIZE = 0.5
DEFAULT_ADALINE_THRESHOLD = 0.5
DEFAULT_MLP_HIDDEN = 10
DEFAULT_MLP_MAX_EPOCHS = 1000
DEFAULT_MLP_LEARNING_RATE = 2.0
DEFAULT_MLP_PATIENCE = 6
DEFAULT_MLP_SPLIT = (0.7, 0.15, 0.15)
MLP_INIT_RANGE = 0.5

# Output formatting.
FLOAT_DIGITS = getattr(settings, "COGSENSE_FLOAT_DIGITS", 9)
ERROR_BINS = getattr(settings, "COGSENSE_ERROR_BINS", 20)
SUMMARY_SCHEMA = "cogsense.summary/1"
FUSER_SCHEMA = "cogsense.fuser/1"

# Environment variable controlling diagnostic verbosity.
LOG_ENV_VAR = "COGSENSE_LOG"

DEFAULT_FUSER_ALIASES = ("and", "or", "majority", "nlms", "mlp")

DEFAULT_FUSERS = {
    "and": {"ENGINE": "cogsense.fusion.hard_rules.AndFuser"},
    "or": {"ENGINE": "cogsense.fusion.hard_rules.OrFuser"},
    "majority": {"ENGINE": "cogsense.fusion.hard_rules.MajorityFuser"},
    "k_of_m": {"ENGINE": "cogsense.fusion.hard_rules.KOfMFuser"},
    "nlms": {
        "ENGINE": "cogsense.fusion.nlms.NlmsFuser",
        "STEP_SIZE": DEFAULT_NLMS_STEP_SIZE,
    },
    "mlp": {
        "ENGINE": "cogsense.fusion.mlp.MlpEngine",
        "HIDDEN_UNITS": DEFAULT_MLP_HIDDEN,
    },
}

# Separates a parametrized alias from its argument, e.g. ``k_of_m:3``.
ALIAS_SEPARATOR = ":"
