"""
Adaline fusion: a linear combiner adapted by normalized LMS, followed by a
1/0 thresholding device.

For an input vector ``Y_k`` (per-user features plus the bias term) and the
desired response ``d_k``::

    e_k     = d_k - W_k . Y_k
    W_{k+1} = W_k + alpha * e_k * Y_k / (|Y_k|^2 + eps)

Normalizing by the input energy makes the step size independent of the
input scale; it is stable for ``0 < alpha < 2``.
"""
import math
from dataclasses import dataclass

import numpy as np

from cogsense import constants
from cogsense.exceptions import ConfigurationError, TrainingError, UsageError
from cogsense.fusion import BaseFuser, TrainingRecord, check_dimensions, stack_inputs
from cogsense.utils.log import getLogger

log = getLogger("cogsense.fusion.nlms")


@dataclass
class AdaptiveFuser:
    weights: np.ndarray
    step_size: float = constants.DEFAULT_NLMS_STEP_SIZE
    threshold: float = constants.DEFAULT_ADALINE_THRESHOLD
    update_count: int = 0

    def __post_init__(self):
        if not 0 < self.step_size < 2:
            raise ConfigurationError(
                "step_size must lie in (0, 2), got %r." % (self.step_size,)
            )
        self.weights = np.array(self.weights, dtype=float)

    @classmethod
    def zeros(cls, length, **kwargs):
        return cls(weights=np.zeros(length), **kwargs)


def nlms_update(fuser, features, desired):
    """
    One NLMS update on a raw input vector. Returns the a-priori error.
    """
    features = check_dimensions(len(fuser.weights), features)
    error = float(desired) - float(np.dot(fuser.weights, features))
    norm = float(np.dot(features, features)) + constants.NLMS_EPSILON
    fuser.weights = fuser.weights + fuser.step_size * error * features / norm
    fuser.update_count += 1
    return error


def nlms_step(fuser, fusion_input):
    """Adapts ``fuser`` towards ``fusion_input.label``; returns ``(error, fuser)``."""
    error = nlms_update(fuser, fusion_input.features, fusion_input.label)
    return error, fuser


def adaline_predict(fuser, features):
    """Returns the combiner output ``r`` and the thresholded bit."""
    features = check_dimensions(len(fuser.weights), features)
    r = float(np.dot(fuser.weights, features))
    return r, (constants.H1 if r > fuser.threshold else constants.H0)


def mse_gradient_norm(weights, features, labels):
    """Norm of the gradient of ``mean((X w - d) ** 2)`` with respect to ``w``."""
    residuals = features @ weights - labels
    return float(np.linalg.norm(2.0 * features.T @ residuals / len(labels)))


class NlmsFuser(BaseFuser):
    adaptive = True
    default_threshold = constants.DEFAULT_ADALINE_THRESHOLD

    def __init__(self, alias, argument=None, **options):
        super().__init__(alias, argument=argument, **options)
        self.step_size = float(options.get("STEP_SIZE", constants.DEFAULT_NLMS_STEP_SIZE))
        self.epochs = int(options.get("EPOCHS", 1))
        if self.epochs < 1:
            raise ConfigurationError("EPOCHS must be >= 1, got %d." % self.epochs)
        # Validates the step size up front.
        AdaptiveFuser(weights=[0.0], step_size=self.step_size)
        self.model = None

    @property
    def trained(self):
        return self.model is not None

    def fit(self, dataset):
        features, labels = stack_inputs(dataset)
        if len(np.unique(labels)) < 2:
            raise TrainingError("NLMS training needs windows of both hypotheses.")

        model = AdaptiveFuser.zeros(
            features.shape[1], step_size=self.step_size, threshold=self.threshold
        )
        record = TrainingRecord()

        for epoch in range(1, self.epochs + 1):
            squared = 0.0
            for item in dataset:
                error, model = nlms_step(model, item)
                squared += error * error
            record.append(
                epoch,
                squared / len(dataset),
                math.nan,
                math.nan,
                mse_gradient_norm(model.weights, features, labels),
            )

        record.best_epoch = record.stop_epoch = self.epochs
        log.debug(
            "NLMS fuser '%s' adapted over %d updates; final weights %s.",
            self.alias,
            model.update_count,
            model.weights,
        )
        self.model = model
        self.training_record = record
        return self

    def score(self, features):
        if self.model is None:
            raise UsageError("The NLMS fuser '%s' has not been trained." % self.alias)
        return adaline_predict(self.model, features)[0]

    def get_state(self):
        if self.model is None:
            return {}
        return {
            "weights": self.model.weights.tolist(),
            "step_size": self.model.step_size,
            "update_count": self.model.update_count,
        }

    def set_state(self, state):
        if "weights" not in state:
            self.model = None
            return
        self.step_size = float(state["step_size"])
        self.model = AdaptiveFuser(
            weights=state["weights"],
            step_size=self.step_size,
            threshold=self.threshold,
            update_count=int(state.get("update_count", 0)),
        )
