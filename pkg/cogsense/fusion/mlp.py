"""
A shallow pattern-recognition network for fusion: one sigmoid hidden layer
and one sigmoid output unit, trained by full-batch gradient descent on the
mean squared error with early stopping on a validation split.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit

from cogsense import constants
from cogsense.exceptions import ConfigurationError, TrainingError, UsageError
from cogsense.fusion import BaseFuser, TrainingRecord, check_dimensions, stack_inputs
from cogsense.utils import streams
from cogsense.utils.log import getLogger

log = getLogger("cogsense.fusion.mlp")

SCORE_FLOOR = np.nextafter(0.0, 1.0)
SCORE_CEILING = np.nextafter(1.0, 0.0)


@dataclass
class MlpFuser:
    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_bias: float
    training_record: TrainingRecord = field(default_factory=TrainingRecord)
    stop_epoch: int = 0
    trained: bool = False
    seed: int = 0

    @property
    def hidden_units(self):
        return len(self.hidden_biases)

    @property
    def n_inputs(self):
        return self.hidden_weights.shape[1]

    def parameters(self):
        return pack(
            self.hidden_weights, self.hidden_biases, self.output_weights, self.output_bias
        )


def pack(hidden_weights, hidden_biases, output_weights, output_bias):
    return np.concatenate(
        [
            np.ravel(hidden_weights),
            np.ravel(hidden_biases),
            np.ravel(output_weights),
            [float(output_bias)],
        ]
    )


def unpack(parameters, n_inputs, hidden):
    split = hidden * n_inputs
    hidden_weights = parameters[:split].reshape(hidden, n_inputs)
    hidden_biases = parameters[split : split + hidden]
    output_weights = parameters[split + hidden : split + 2 * hidden]
    output_bias = float(parameters[split + 2 * hidden])
    return hidden_weights, hidden_biases, output_weights, output_bias


def parameter_count(n_inputs, hidden):
    return hidden * n_inputs + 2 * hidden + 1


def forward(parameters, features, n_inputs, hidden):
    hidden_weights, hidden_biases, output_weights, output_bias = unpack(
        parameters, n_inputs, hidden
    )
    activations = expit(features @ hidden_weights.T + hidden_biases)
    outputs = expit(activations @ output_weights + output_bias)
    return activations, outputs


def mse(parameters, features, targets, hidden):
    if len(targets) == 0:
        return math.nan
    _, outputs = forward(parameters, features, features.shape[1], hidden)
    return float(np.mean((outputs - targets) ** 2))


def mlp_loss_and_gradient(parameters, features, targets, hidden):
    """
    Mean squared error and its analytic gradient with respect to the packed
    parameter vector.
    """
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    n_inputs = features.shape[1]
    _, _, output_weights, _ = unpack(parameters, n_inputs, hidden)

    activations, outputs = forward(parameters, features, n_inputs, hidden)
    residual = outputs - targets
    loss = float(np.mean(residual ** 2))

    output_delta = (2.0 / len(targets)) * residual * outputs * (1.0 - outputs)
    hidden_delta = np.outer(output_delta, output_weights) * activations * (1.0 - activations)

    gradient = pack(
        hidden_delta.T @ features,
        hidden_delta.sum(axis=0),
        activations.T @ output_delta,
        output_delta.sum(),
    )
    return loss, gradient


def _check_split(split):
    if len(split) != 3:
        raise ConfigurationError("split needs (train, validation, test) fractions.")
    if any(fraction < 0 for fraction in split):
        raise ConfigurationError("split fractions must be >= 0, got %r." % (split,))
    if abs(sum(split) - 1.0) > 1e-9:
        raise ConfigurationError("split fractions must sum to 1, got %r." % (split,))


def _partition(count, split, rng):
    order = rng.permutation(count)
    n_train = max(1, int(round(split[0] * count)))
    n_val = min(count - n_train, int(round(split[1] * count)))
    return (
        order[:n_train],
        order[n_train : n_train + n_val],
        order[n_train + n_val :],
    )


def initial_network(n_inputs, hidden, seed):
    rng = streams.stream(seed, 0, "init")
    limit = constants.MLP_INIT_RANGE
    return MlpFuser(
        hidden_weights=rng.uniform(-limit, limit, (hidden, n_inputs)),
        hidden_biases=rng.uniform(-limit, limit, hidden),
        output_weights=rng.uniform(-limit, limit, hidden),
        output_bias=float(rng.uniform(-limit, limit)),
        seed=seed,
    )


def train_mlp(
    dataset,
    hidden=constants.DEFAULT_MLP_HIDDEN,
    split=constants.DEFAULT_MLP_SPLIT,
    max_epochs=constants.DEFAULT_MLP_MAX_EPOCHS,
    learning_rate=constants.DEFAULT_MLP_LEARNING_RATE,
    patience=constants.DEFAULT_MLP_PATIENCE,
    seed=0,
):
    """
    Trains a one-hidden-layer network on labeled fusion inputs.

    Training stops once the validation error has not improved for
    ``patience`` consecutive epochs (the training error stands in when the
    validation split is empty) and the network from the best epoch is
    returned.
    """
    _check_split(split)
    if hidden < 1:
        raise ConfigurationError("hidden must be >= 1, got %r." % (hidden,))
    if max_epochs < 0:
        raise ConfigurationError("max_epochs must be >= 0, got %r." % (max_epochs,))
    if not learning_rate > 0:
        raise ConfigurationError(
            "learning_rate must be > 0, got %r." % (learning_rate,)
        )
    if patience < 1:
        raise ConfigurationError("patience must be >= 1, got %r." % (patience,))

    features, targets = stack_inputs(dataset)
    if len(np.unique(targets)) < 2:
        raise TrainingError("Training needs windows of both hypotheses.")

    network = initial_network(features.shape[1], hidden, seed)
    if max_epochs == 0:
        return network

    train, val, test = _partition(len(targets), split, streams.stream(seed, 0, "split"))
    parameters = network.parameters()

    def monitored(params):
        if len(val):
            return mse(params, features[val], targets[val], hidden)
        return mse(params, features[train], targets[train], hidden)

    record = TrainingRecord()
    best_parameters = parameters.copy()
    best_score = monitored(parameters)
    best_epoch = 0
    waited = 0
    epoch = 0

    for epoch in range(1, max_epochs + 1):
        _, gradient = mlp_loss_and_gradient(
            parameters, features[train], targets[train], hidden
        )
        parameters = parameters - learning_rate * gradient

        record.append(
            epoch,
            mse(parameters, features[train], targets[train], hidden),
            mse(parameters, features[val], targets[val], hidden),
            mse(parameters, features[test], targets[test], hidden),
            float(np.linalg.norm(gradient)),
        )

        score = monitored(parameters)
        if score < best_score:
            best_score = score
            best_parameters = parameters.copy()
            best_epoch = epoch
            waited = 0
        else:
            waited += 1
            if waited >= patience:
                log.debug(
                    "Early stop at epoch %d; best epoch %d (mse %g).",
                    epoch,
                    best_epoch,
                    best_score,
                )
                break

    record.best_epoch = best_epoch
    record.stop_epoch = epoch

    hidden_weights, hidden_biases, output_weights, output_bias = unpack(
        best_parameters, features.shape[1], hidden
    )
    return MlpFuser(
        hidden_weights=hidden_weights,
        hidden_biases=hidden_biases,
        output_weights=output_weights,
        output_bias=output_bias,
        training_record=record,
        stop_epoch=epoch,
        trained=True,
        seed=seed,
    )


def mlp_predict(fuser, features, threshold=0.5):
    """Returns the sigmoid score, kept strictly inside (0, 1), and its bit."""
    if not fuser.trained:
        raise UsageError("The network has not been trained.")
    features = check_dimensions(fuser.n_inputs, features)
    _, output = forward(
        fuser.parameters(), features[np.newaxis, :], fuser.n_inputs, fuser.hidden_units
    )
    score = float(np.clip(output[0], SCORE_FLOOR, SCORE_CEILING))
    return score, (constants.H1 if score > threshold else constants.H0)


class MlpEngine(BaseFuser):
    adaptive = True

    def __init__(self, alias, argument=None, **options):
        super().__init__(alias, argument=argument, **options)
        self.hidden = int(options.get("HIDDEN_UNITS", constants.DEFAULT_MLP_HIDDEN))
        self.split = tuple(options.get("SPLIT", constants.DEFAULT_MLP_SPLIT))
        self.max_epochs = int(options.get("MAX_EPOCHS", constants.DEFAULT_MLP_MAX_EPOCHS))
        self.learning_rate = float(
            options.get("LEARNING_RATE", constants.DEFAULT_MLP_LEARNING_RATE)
        )
        self.patience = int(options.get("PATIENCE", constants.DEFAULT_MLP_PATIENCE))
        self.seed = int(options.get("SEED", 0))
        self.model: Optional[MlpFuser] = None

    @property
    def trained(self):
        return self.model is not None and self.model.trained

    def fit(self, dataset):
        self.model = train_mlp(
            dataset,
            hidden=self.hidden,
            split=self.split,
            max_epochs=self.max_epochs,
            learning_rate=self.learning_rate,
            patience=self.patience,
            seed=self.seed,
        )
        self.training_record = self.model.training_record
        log.debug(
            "MLP fuser '%s' stopped at epoch %d (best %d).",
            self.alias,
            self.model.stop_epoch,
            self.training_record.best_epoch,
        )
        return self

    def score(self, features):
        if self.model is None:
            raise UsageError("The MLP fuser '%s' has not been trained." % self.alias)
        return mlp_predict(self.model, features, self.threshold)[0]

    def scores(self, dataset):
        if self.model is None or not self.model.trained:
            raise UsageError("The MLP fuser '%s' has not been trained." % self.alias)
        features, _ = stack_inputs(dataset)
        _, outputs = forward(
            self.model.parameters(), features, self.model.n_inputs, self.hidden
        )
        return np.clip(outputs, SCORE_FLOOR, SCORE_CEILING)

    def training_splits(self, dataset):
        """Divides ``dataset`` the way ``fit`` did for the same seed and split."""
        dataset = list(dataset)
        parts = _partition(len(dataset), self.split, streams.stream(self.seed, 0, "split"))
        return {
            name: [dataset[index] for index in indices]
            for name, indices in zip(("training", "validation", "test"), parts)
        }

    def get_state(self):
        if self.model is None:
            return {}
        return {
            "hidden_units": self.model.hidden_units,
            "seed": self.model.seed,
            "split": list(self.split),
            "stop_epoch": self.model.stop_epoch,
            "trained": self.model.trained,
            "weights": {
                "hidden_weights": self.model.hidden_weights.tolist(),
                "hidden_biases": self.model.hidden_biases.tolist(),
                "output_weights": self.model.output_weights.tolist(),
                "output_bias": self.model.output_bias,
            },
        }

    def set_state(self, state):
        if "weights" not in state:
            self.model = None
            return
        weights = state["weights"]
        self.hidden = int(state["hidden_units"])
        self.seed = int(state.get("seed", 0))
        self.split = tuple(state.get("split", self.split))
        self.model = MlpFuser(
            hidden_weights=np.array(weights["hidden_weights"], dtype=float),
            hidden_biases=np.array(weights["hidden_biases"], dtype=float),
            output_weights=np.array(weights["output_weights"], dtype=float),
            output_bias=float(weights["output_bias"]),
            training_record=self.training_record or TrainingRecord(),
            stop_epoch=int(state.get("stop_epoch", 0)),
            trained=bool(state.get("trained", True)),
            seed=self.seed,
        )
