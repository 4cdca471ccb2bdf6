"""
Scenario configuration.

Scenario files are flat ``key = value`` text. Lists are comma-separated and
may be wrapped in brackets; ``#`` starts a comment. Keys are the field names
of ``ScenarioConfig``::

    preset = paper-iv
    m_users = 3
    snr_db = [-10, -10, -10]
    trials = 100
    seed = 1
"""
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional, Tuple

from cogsense import constants
from cogsense.exceptions import ConfigurationError
from cogsense.utils import loading
from cogsense.utils.streams import MAX_SEED

DEFAULT_REPORT_SNR_DB = 5.0

JAKES_QAM = {
    "fading": (100.0, 1e-5),
    "signal": constants.QAM,
    "mlp_hidden": 10,
}

# "jakes-qam" is an alias of "paper-iv".
PRESETS = {
    "paper-iv": JAKES_QAM,
    "jakes-qam": JAKES_QAM,
    "fusion-comparison": {
        "m_users": 5,
        "snr_db": (-5.0, -8.0, -10.0, -12.0, -15.0),
        "fading": (100.0, 1e-5),
        "signal": constants.QAM,
        "mlp_hidden": 10,
        "report_mode": constants.HARD,
        "reporting": (1.0, 10.0 ** (-DEFAULT_REPORT_SNR_DB / 10.0), True),
        "trials": 20000,
        "fuser": ("majority", "nlms", "mlp"),
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    m_users: int
    snr_db: Tuple[float, ...]
    trials: int
    seed: int
    n_samples: int = 1000
    noise_variance: float = 1.0
    target_pfa: float = 0.1
    report_mode: str = constants.HARD
    reporting: Tuple[float, float, bool] = (
        1.0,
        10.0 ** (-DEFAULT_REPORT_SNR_DB / 10.0),
        True,
    )
    fading: Tuple[float, float] = (100.0, 1e-5)
    fuser: Tuple[str, ...] = ("majority", "nlms", "mlp")
    train_fraction: float = 0.5
    preset: Optional[str] = None
    signal: str = constants.QAM
    sensing_fading: bool = True
    bandwidth_hz: Optional[float] = None
    duration_s: Optional[float] = None
    nlms_step_size: float = constants.DEFAULT_NLMS_STEP_SIZE
    nlms_epochs: int = 1
    mlp_hidden: int = constants.DEFAULT_MLP_HIDDEN
    mlp_max_epochs: int = constants.DEFAULT_MLP_MAX_EPOCHS
    mlp_learning_rate: float = constants.DEFAULT_MLP_LEARNING_RATE
    mlp_patience: int = constants.DEFAULT_MLP_PATIENCE
    mlp_split: Tuple[float, float, float] = field(
        default=constants.DEFAULT_MLP_SPLIT
    )

    def __post_init__(self):
        validate(self)

    @property
    def fading_variance(self):
        return self.reporting[0]

    @property
    def report_noise_variance(self):
        return self.reporting[1]

    @property
    def csi_known(self):
        return self.reporting[2]

    @property
    def max_doppler_hz(self):
        return self.fading[0]

    @property
    def sample_interval_s(self):
        return self.fading[1]

    @property
    def train_trials(self):
        return int(math.floor(self.train_fraction * self.trials))

    def to_dict(self):
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    def override(self, **changes):
        return replace(self, **changes)


def _fail(key, message):
    raise ConfigurationError("%s: %s" % (key, message))


def validate(config):
    if config.m_users < 1:
        _fail("m_users", "must be an integer >= 1, got %r." % (config.m_users,))
    if len(config.snr_db) != config.m_users:
        _fail(
            "snr_db",
            "needs one value per user (m_users = %d), got %d."
            % (config.m_users, len(config.snr_db)),
        )
    if config.trials < 1:
        _fail("trials", "must be an integer >= 1, got %r." % (config.trials,))
    if not 0 <= config.seed <= MAX_SEED:
        _fail("seed", "must lie in [0, 2**64 - 1], got %r." % (config.seed,))
    if config.n_samples < 1:
        _fail("n_samples", "must be an integer >= 1, got %r." % (config.n_samples,))
    if not config.noise_variance > 0:
        _fail("noise_variance", "must be > 0, got %r." % (config.noise_variance,))
    if not 0 < config.target_pfa < 1:
        _fail(
            "target_pfa",
            "must lie in the open interval (0, 1), got %r." % (config.target_pfa,),
        )
    if config.report_mode not in constants.REPORT_MODES:
        _fail(
            "report_mode",
            "must be one of %s, got %r."
            % (", ".join(constants.REPORT_MODES), config.report_mode),
        )
    if len(config.reporting) != 3:
        _fail("reporting", "needs (fading_variance, noise_variance, csi_known).")
    if not config.reporting[0] > 0:
        _fail("reporting", "fading variance must be > 0, got %r." % (config.reporting[0],))
    if not config.reporting[1] >= 0:
        _fail("reporting", "noise variance must be >= 0, got %r." % (config.reporting[1],))
    if len(config.fading) != 2:
        _fail("fading", "needs (max_doppler_hz, sample_interval_s).")
    doppler, interval = config.fading
    if not (doppler > 0 and interval > 0 and doppler * interval < 0.5):
        _fail(
            "fading",
            "needs f_d > 0, T_s > 0 and f_d * T_s < 0.5, got (%r, %r)."
            % (doppler, interval),
        )
    if not config.fuser:
        _fail("fuser", "names at least one fuser.")
    for name in config.fuser:
        alias, argument = loading.split_alias(name)
        if alias not in _configured_aliases():
            _fail("fuser", "unknown fuser %r." % (name,))
        if alias == "k_of_m":
            if argument is None or not argument.isdigit():
                _fail("fuser", "k_of_m needs an integer k, e.g. 'k_of_m:3'.")
            if not 1 <= int(argument) <= config.m_users:
                _fail("fuser", "k must lie in [1, %d], got %s." % (config.m_users, argument))
    if not 0 < config.train_fraction < 1:
        _fail(
            "train_fraction",
            "must lie in the open interval (0, 1), got %r." % (config.train_fraction,),
        )
    if config.preset is not None and config.preset not in PRESETS:
        _fail(
            "preset",
            "must be one of %s, got %r." % (", ".join(sorted(PRESETS)), config.preset),
        )
    if config.signal not in constants.SIGNAL_KINDS:
        _fail(
            "signal",
            "must be one of %s, got %r." % (", ".join(constants.SIGNAL_KINDS), config.signal),
        )
    if (config.bandwidth_hz is None) != (config.duration_s is None):
        _fail("bandwidth_hz", "bandwidth_hz and duration_s must be given together.")
    if config.bandwidth_hz is not None:
        if not (config.bandwidth_hz > 0 and config.duration_s > 0):
            _fail("bandwidth_hz", "bandwidth_hz and duration_s must be > 0.")
        expected = int(round(2 * config.bandwidth_hz * config.duration_s))
        if expected != config.n_samples:
            _fail(
                "n_samples",
                "must equal round(2 * bandwidth_hz * duration_s) = %d, got %d."
                % (expected, config.n_samples),
            )
    if not 0 < config.nlms_step_size < 2:
        _fail(
            "nlms_step_size",
            "must lie in the open interval (0, 2), got %r." % (config.nlms_step_size,),
        )
    if config.nlms_epochs < 1:
        _fail("nlms_epochs", "must be >= 1, got %r." % (config.nlms_epochs,))
    if config.mlp_hidden < 1:
        _fail("mlp_hidden", "must be >= 1, got %r." % (config.mlp_hidden,))
    if config.mlp_max_epochs < 0:
        _fail("mlp_max_epochs", "must be >= 0, got %r." % (config.mlp_max_epochs,))
    if not config.mlp_learning_rate > 0:
        _fail("mlp_learning_rate", "must be > 0, got %r." % (config.mlp_learning_rate,))
    if config.mlp_patience < 1:
        _fail("mlp_patience", "must be >= 1, got %r." % (config.mlp_patience,))
    if len(config.mlp_split) != 3 or abs(sum(config.mlp_split) - 1.0) > 1e-9:
        _fail("mlp_split", "needs three fractions summing to 1, got %r." % (config.mlp_split,))
    if any(fraction < 0 for fraction in config.mlp_split):
        _fail("mlp_split", "fractions must be >= 0, got %r." % (config.mlp_split,))


def _configured_aliases():
    from cogsense.fusion import fusers

    return fusers.fusers_info


def _strip_list(text):
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    return [item.strip() for item in text.split(",") if item.strip()]


def _as_int(key, text):
    try:
        return int(text)
    except ValueError:
        _fail(key, "must be an integer, got %r." % (text,))


def _as_float(key, text):
    try:
        return float(text)
    except ValueError:
        _fail(key, "must be a number, got %r." % (text,))


def _as_bool(key, text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    _fail(key, "must be true or false, got %r." % (text,))


def _as_floats(key, text):
    return tuple(_as_float(key, item) for item in _strip_list(text))


def _as_reporting(key, text):
    items = _strip_list(text)
    if len(items) != 3:
        _fail(key, "needs 'fading_variance, noise_variance, csi_known'.")
    return (_as_float(key, items[0]), _as_float(key, items[1]), _as_bool(key, items[2]))


def _as_fading(key, text):
    items = _as_floats(key, text)
    if len(items) != 2:
        _fail(key, "needs 'max_doppler_hz, sample_interval_s'.")
    return items


def _as_names(key, text):
    return tuple(_strip_list(text))


def _as_text(key, text):
    return text.strip()


PARSERS = {
    "m_users": _as_int,
    "n_samples": _as_int,
    "snr_db": _as_floats,
    "noise_variance": _as_float,
    "target_pfa": _as_float,
    "report_mode": _as_text,
    "reporting": _as_reporting,
    "fading": _as_fading,
    "fuser": _as_names,
    "trials": _as_int,
    "seed": _as_int,
    "train_fraction": _as_float,
    "preset": _as_text,
    "signal": _as_text,
    "sensing_fading": _as_bool,
    "bandwidth_hz": _as_float,
    "duration_s": _as_float,
    "nlms_step_size": _as_float,
    "nlms_epochs": _as_int,
    "mlp_hidden": _as_int,
    "mlp_max_epochs": _as_int,
    "mlp_learning_rate": _as_float,
    "mlp_patience": _as_int,
    "mlp_split": _as_floats,
}

REQUIRED = ("m_users", "snr_db", "trials", "seed")


def build_config(values):
    """Applies the preset named in ``values`` (if any), then ``values`` itself."""
    unknown = set(values) - {item.name for item in fields(ScenarioConfig)}
    if unknown:
        _fail(sorted(unknown)[0], "is not a known configuration key.")

    merged = {}
    preset = values.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            _fail(
                "preset",
                "must be one of %s, got %r." % (", ".join(sorted(PRESETS)), preset),
            )
        merged.update(PRESETS[preset])
    merged.update(values)

    for key in REQUIRED:
        if key not in merged:
            _fail(key, "is required.")
    return ScenarioConfig(**merged)


def parse_config(text, source="<string>"):
    values = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(
                "%s:%d: expected 'key = value', got %r." % (source, number, raw.strip())
            )
        key = key.strip()
        if key not in PARSERS:
            _fail(key, "is not a known configuration key (%s:%d)." % (source, number))
        if key in values:
            _fail(key, "is given more than once (%s:%d)." % (source, number))
        values[key] = PARSERS[key](key, value)
    return build_config(values)


def load_config(path):
    if not os.path.isfile(path):
        raise ConfigurationError("Config file '%s' does not exist." % path)
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigurationError("Config file '%s' can not be read: %s" % (path, exc))
    return parse_config(text, source=path)


def config_from_dict(data):
    values = dict(data)
    for key, value in values.items():
        if isinstance(value, list):
            values[key] = tuple(value)
    return build_config(values)
