import json
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from django.core.exceptions import ImproperlyConfigured

from cogsense import constants
from cogsense.exceptions import InputError, UsageError
from cogsense.utils import loading, round_float


@dataclass(frozen=True)
class FusionInput:
    """
    Feature vector seen by the fusion center for one sensing window.

    The last entry is a constant bias term of exactly one. ``label`` is the
    true hypothesis, used as the desired response while training.
    """

    features: np.ndarray
    label: int
    time_index: int = 0

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        if features.ndim != 1 or len(features) < 2:
            raise InputError("Fusion features need at least one user plus the bias.")
        if features[-1] != 1.0:
            raise InputError("The last fusion feature must be the bias term 1.")
        if self.label not in (constants.H0, constants.H1):
            raise InputError("label must be 0 or 1, got %r." % (self.label,))
        object.__setattr__(self, "features", features)

    @classmethod
    def create(cls, values, label, time_index=0):
        """Appends the bias term to per-user ``values``."""
        return cls(
            features=with_bias(values), label=int(label), time_index=int(time_index)
        )

    @property
    def m_users(self):
        return len(self.features) - 1

    @property
    def values(self):
        return self.features[:-1]


def with_bias(values):
    return np.append(np.asarray(values, dtype=float), 1.0)


def stack_inputs(dataset):
    """Returns ``(X, labels)`` arrays for a sequence of ``FusionInput``."""
    if not len(dataset):
        raise InputError("The dataset is empty.")
    widths = {len(item.features) for item in dataset}
    if len(widths) != 1:
        raise InputError("All fusion inputs must have the same length.")
    features = np.vstack([item.features for item in dataset])
    labels = np.array([item.label for item in dataset], dtype=float)
    return features, labels


def check_dimensions(expected, features):
    features = np.asarray(features, dtype=float)
    if features.shape != (expected,):
        raise UsageError(
            "Expected %d features, got shape %s." % (expected, features.shape)
        )
    return features


@dataclass
class EpochRecord:
    epoch: int
    train_mse: float
    val_mse: float
    test_mse: float
    grad_norm: float


@dataclass
class TrainingRecord:
    epochs: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    stop_epoch: int = 0

    def __len__(self):
        return len(self.epochs)

    def append(self, *args):
        self.epochs.append(EpochRecord(*args))

    def to_dict(self):
        def clean(value):
            return None if math.isnan(value) else round_float(value)

        return {
            "best_epoch": self.best_epoch,
            "stop_epoch": self.stop_epoch,
            "epochs": [
                {
                    "epoch": record.epoch,
                    "train_mse": clean(record.train_mse),
                    "val_mse": clean(record.val_mse),
                    "test_mse": clean(record.test_mse),
                    "grad_norm": clean(record.grad_norm),
                }
                for record in self.epochs
            ],
        }

    @classmethod
    def from_dict(cls, data):
        def restore(value):
            return math.nan if value is None else float(value)

        return cls(
            epochs=[
                EpochRecord(
                    int(item["epoch"]),
                    restore(item["train_mse"]),
                    restore(item["val_mse"]),
                    restore(item["test_mse"]),
                    restore(item["grad_norm"]),
                )
                for item in data.get("epochs", [])
            ],
            best_epoch=int(data.get("best_epoch", 0)),
            stop_epoch=int(data.get("stop_epoch", 0)),
        )


class BaseFuser(object):
    """
    Abstract fusion rule.

    Engines are built by ``fusers.build(alias)`` with the options of their
    ``COGSENSE_FUSERS`` entry. Scores rank windows by how strongly they point
    to H1; ``predict`` compares the score with the output threshold.
    """

    adaptive = False
    default_threshold = 0.5

    def __init__(self, alias, argument=None, **options):
        self.alias = alias
        self.argument = argument
        self.threshold = float(options.get("THRESHOLD", self.default_threshold))
        self.training_record = None

    def __repr__(self):
        return "<%s: %s>" % (self.__class__.__name__, self.alias)

    @property
    def engine_path(self):
        return "%s.%s" % (self.__class__.__module__, self.__class__.__name__)

    @property
    def trained(self):
        return True

    def fit(self, dataset):
        """
        Trains the fuser on labeled ``FusionInput`` windows.

        Fixed rules need no training and return themselves unchanged.
        """
        return self

    def score(self, features):
        """
        Returns the fused soft output for one feature vector.

        This method MUST be implemented by each fuser.
        """
        raise NotImplementedError

    def scores(self, dataset):
        return np.array([self.score(item.features) for item in dataset])

    def training_splits(self, dataset):
        """
        Names the parts ``fit`` made of ``dataset``.

        Engines that hold windows back for validation or testing override this.
        """
        return {"training": list(dataset)}

    def predict(self, features, threshold=None):
        threshold = self.threshold if threshold is None else threshold
        return constants.H1 if self.score(features) > threshold else constants.H0

    def get_state(self):
        """Engine-specific parameters for serialization."""
        return {}

    def set_state(self, state):
        pass

    def to_dict(self):
        data = {
            "schema": constants.FUSER_SCHEMA,
            "alias": self.alias,
            "engine": self.engine_path,
            "threshold": self.threshold,
            "state": self.get_state(),
        }
        if self.training_record is not None:
            data["training_record"] = self.training_record.to_dict()
        return data

    @classmethod
    def from_dict(cls, data, **options):
        fuser = cls(
            alias=data["alias"],
            argument=loading.split_alias(data["alias"])[1],
            THRESHOLD=data.get("threshold", cls.default_threshold),
            **options
        )
        if "training_record" in data:
            fuser.training_record = TrainingRecord.from_dict(data["training_record"])
        fuser.set_state(data.get("state", {}))
        return fuser


def save_fuser(fuser, path):
    """Writes a fuser's parameters as JSON."""
    with open(path, "w") as handle:
        json.dump(fuser.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_fuser(path):
    """Reads a fuser written by ``save_fuser``."""
    with open(path) as handle:
        try:
            data = json.load(handle)
        except ValueError as exc:
            raise InputError("'%s' is not valid JSON: %s" % (path, exc))

    schema = data.get("schema") if isinstance(data, dict) else None
    if schema != constants.FUSER_SCHEMA:
        raise InputError("'%s' is not a saved fuser (schema %r)." % (path, schema))
    for key in ("engine", "alias"):
        if not isinstance(data.get(key), str):
            raise InputError("'%s' has no valid '%s' entry." % (path, key))

    try:
        engine = loading.load_fuser(data["engine"])
    except (ImportError, ImproperlyConfigured) as exc:
        raise InputError("'%s' names an unknown engine: %s" % (path, exc))
    if not (isinstance(engine, type) and issubclass(engine, BaseFuser)):
        raise InputError(
            "'%s' names '%s', which is not a fuser." % (path, data["engine"])
        )

    try:
        return engine.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("'%s' holds invalid fuser state: %s" % (path, exc))


fusers = loading.FuserHandler()


def build_fuser(name, **overrides):
    return fusers.build(name, **overrides)


__all__ = [
    "BaseFuser",
    "EpochRecord",
    "FusionInput",
    "TrainingRecord",
    "build_fuser",
    "fusers",
    "load_fuser",
    "save_fuser",
    "stack_inputs",
    "with_bias",
]
