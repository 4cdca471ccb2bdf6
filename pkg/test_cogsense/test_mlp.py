import itertools
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from cogsense import constants
from cogsense.exceptions import ConfigurationError, TrainingError, UsageError
from cogsense.fusion import FusionInput, build_fuser, load_fuser, save_fuser, stack_inputs
from cogsense.fusion.mlp import (
    MlpEngine,
    _partition,
    mlp_loss_and_gradient,
    mlp_predict,
    mse,
    parameter_count,
    train_mlp,
)
from cogsense.utils import streams


def truth_table(function, inputs, copies=1):
    return [
        FusionInput.create(bits, function(bits))
        for _ in range(copies)
        for bits in itertools.product((0, 1), repeat=inputs)
    ]


def majority(bits):
    return int(sum(bits) * 2 > len(bits))


def xor(bits):
    return bits[0] ^ bits[1]


def noisy_dataset(count, seed):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, count)
    return [
        FusionInput.create(rng.normal(label, 1.0, 3), label) for label in labels
    ]


class GradientTestCase(SimpleTestCase):
    def test_matches_central_differences(self):
        rng = np.random.default_rng(60)
        hidden, n_inputs = 5, 4
        features = np.hstack([rng.normal(size=(20, n_inputs - 1)), np.ones((20, 1))])
        targets = rng.integers(0, 2, 20).astype(float)
        step = 1e-5

        for _ in range(10):
            parameters = rng.uniform(-1, 1, parameter_count(n_inputs, hidden))
            _, analytic = mlp_loss_and_gradient(parameters, features, targets, hidden)

            numeric = np.empty_like(parameters)
            for index in range(len(parameters)):
                shift = np.zeros_like(parameters)
                shift[index] = step
                upper, _ = mlp_loss_and_gradient(parameters + shift, features, targets, hidden)
                lower, _ = mlp_loss_and_gradient(parameters - shift, features, targets, hidden)
                numeric[index] = (upper - lower) / (2 * step)

            relative = np.linalg.norm(analytic - numeric) / max(
                np.linalg.norm(analytic), np.linalg.norm(numeric)
            )
            self.assertLess(relative, 1e-6)

    def test_loss_is_mse(self):
        rng = np.random.default_rng(61)
        features = np.hstack([rng.normal(size=(8, 2)), np.ones((8, 1))])
        targets = rng.integers(0, 2, 8).astype(float)
        parameters = rng.uniform(-0.5, 0.5, parameter_count(3, 4))
        loss, _ = mlp_loss_and_gradient(parameters, features, targets, 4)
        self.assertAlmostEqual(loss, mse(parameters, features, targets, 4), places=14)


class TrainMlpTestCase(SimpleTestCase):
    def test_learns_majority(self):
        dataset = truth_table(majority, 3, copies=20)
        network = train_mlp(
            dataset,
            hidden=10,
            split=(1.0, 0.0, 0.0),
            max_epochs=5000,
            learning_rate=4.0,
            patience=50,
            seed=1,
        )
        self.assertTrue(network.trained)
        for bits in itertools.product((0, 1), repeat=3):
            features = FusionInput.create(bits, 0).features
            self.assertEqual(mlp_predict(network, features)[1], majority(bits), bits)
        self.assertEqual(mlp_predict(network, [1.0, 1.0, 1.0, 1.0])[1], 1)

    def test_learns_xor(self):
        dataset = truth_table(xor, 2)
        # Plain gradient descent can stall on XOR; one of a few
        # initializations has to solve it.
        for seed in range(5):
            network = train_mlp(
                dataset,
                hidden=10,
                split=(1.0, 0.0, 0.0),
                max_epochs=20000,
                learning_rate=4.0,
                patience=50,
                seed=seed,
            )
            predictions = [mlp_predict(network, item.features)[1] for item in dataset]
            if predictions == [item.label for item in dataset]:
                break
        else:
            self.fail("No initialization learned XOR.")

    def test_zero_epochs(self):
        network = train_mlp(noisy_dataset(20, 62), max_epochs=0, seed=4)
        self.assertFalse(network.trained)
        self.assertEqual(len(network.training_record), 0)
        self.assertEqual(network.hidden_units, constants.DEFAULT_MLP_HIDDEN)
        self.assertTrue((np.abs(network.hidden_weights) <= constants.MLP_INIT_RANGE).all())
        with self.assertRaises(UsageError):
            mlp_predict(network, [0.0, 0.0, 0.0, 1.0])

    def test_single_class(self):
        dataset = [FusionInput.create([1.0, 0.0], constants.H0) for _ in range(10)]
        with self.assertRaises(TrainingError):
            train_mlp(dataset)

    def test_bad_split(self):
        with self.assertRaises(ConfigurationError):
            train_mlp(noisy_dataset(20, 63), split=(0.5, 0.2, 0.2))
        with self.assertRaises(ConfigurationError):
            train_mlp(noisy_dataset(20, 63), split=(1.2, -0.1, -0.1))

    def test_early_stopping_keeps_the_best_epoch(self):
        dataset = noisy_dataset(300, 64)
        split = (0.7, 0.15, 0.15)
        network = train_mlp(dataset, hidden=6, split=split, max_epochs=400, patience=6, seed=9)
        record = network.training_record

        self.assertEqual(len(record), record.stop_epoch)
        self.assertEqual(network.stop_epoch, record.stop_epoch)
        self.assertLessEqual(record.stop_epoch, 400)
        self.assertLessEqual(record.best_epoch, record.stop_epoch)
        for item in record.epochs:
            self.assertGreaterEqual(item.train_mse, 0.0)
            self.assertGreaterEqual(item.val_mse, 0.0)
            self.assertGreaterEqual(item.test_mse, 0.0)
            self.assertGreaterEqual(item.grad_norm, 0.0)
        if record.stop_epoch < 400:
            self.assertEqual(record.stop_epoch - record.best_epoch, 6)

        if record.best_epoch:
            features, targets = stack_inputs(dataset)
            _, val, _ = _partition(len(targets), split, streams.stream(9, 0, "split"))
            self.assertEqual(
                mse(network.parameters(), features[val], targets[val], 6),
                record.epochs[record.best_epoch - 1].val_mse,
            )

    def test_deterministic(self):
        dataset = noisy_dataset(100, 65)
        first = train_mlp(dataset, max_epochs=30, seed=5)
        second = train_mlp(dataset, max_epochs=30, seed=5)
        np.testing.assert_array_equal(first.parameters(), second.parameters())
        third = train_mlp(dataset, max_epochs=30, seed=6)
        self.assertFalse(np.array_equal(first.parameters(), third.parameters()))


class MlpPredictTestCase(SimpleTestCase):
    def setUp(self):
        self.network = train_mlp(noisy_dataset(100, 66), max_epochs=50, seed=2)

    def test_scores_are_strictly_inside(self):
        for features in ([0.0, 0.0, 0.0, 1.0], [1e6, 1e6, 1e6, 1.0], [-1e6, -1e6, -1e6, 1.0]):
            score, _ = mlp_predict(self.network, features)
            self.assertGreater(score, 0.0)
            self.assertLess(score, 1.0)

    def test_threshold_endpoints(self):
        rng = np.random.default_rng(67)
        for _ in range(20):
            features = np.append(rng.normal(scale=5.0, size=3), 1.0)
            self.assertEqual(mlp_predict(self.network, features, threshold=0.0)[1], 1)
            self.assertEqual(mlp_predict(self.network, features, threshold=1.0)[1], 0)

    def test_dimension_mismatch(self):
        with self.assertRaises(UsageError):
            mlp_predict(self.network, [1.0, 1.0])


class MlpEngineTestCase(SimpleTestCase):
    def test_built_by_alias(self):
        fuser = build_fuser("mlp", SEED=3, MAX_EPOCHS=40, HIDDEN_UNITS=4)
        self.assertIsInstance(fuser, MlpEngine)
        self.assertTrue(fuser.adaptive)
        self.assertFalse(fuser.trained)
        with self.assertRaises(UsageError):
            fuser.score([0.0, 1.0])

    def test_fit_and_scores(self):
        fuser = build_fuser("mlp", SEED=3, MAX_EPOCHS=40, HIDDEN_UNITS=4)
        fuser.fit(noisy_dataset(120, 68))
        self.assertTrue(fuser.trained)
        self.assertIs(fuser.training_record, fuser.model.training_record)

        evaluation = noisy_dataset(30, 69)
        batch = fuser.scores(evaluation)
        single = [fuser.score(item.features) for item in evaluation]
        np.testing.assert_allclose(batch, single, rtol=1e-12)

    def test_save_and_load(self):
        fuser = build_fuser("mlp", SEED=3, MAX_EPOCHS=40, HIDDEN_UNITS=4)
        fuser.fit(noisy_dataset(120, 70))

        state = fuser.get_state()
        self.assertEqual(state["hidden_units"], 4)
        self.assertEqual(state["seed"], 3)
        self.assertEqual(len(state["weights"]["hidden_weights"]), 4)

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "mlp.json")
            save_fuser(fuser, path)
            restored = load_fuser(path)

        self.assertIsInstance(restored, MlpEngine)
        self.assertEqual(restored.model.stop_epoch, fuser.model.stop_epoch)
        self.assertEqual(
            len(restored.training_record), len(fuser.training_record)
        )
        evaluation = noisy_dataset(30, 71)
        np.testing.assert_array_equal(restored.scores(evaluation), fuser.scores(evaluation))

    def test_training_splits_follow_the_seeded_partition(self):
        dataset = noisy_dataset(100, 72)
        fuser = build_fuser(
            "mlp", SEED=5, MAX_EPOCHS=20, HIDDEN_UNITS=3, SPLIT=(0.6, 0.2, 0.2)
        )
        fuser.fit(dataset)
        splits = fuser.training_splits(dataset)
        self.assertEqual(list(splits), ["training", "validation", "test"])
        self.assertEqual([len(part) for part in splits.values()], [60, 20, 20])

        train, val, test = _partition(100, (0.6, 0.2, 0.2), streams.stream(5, 0, "split"))
        for part, indices in zip(splits.values(), (train, val, test)):
            self.assertEqual(part, [dataset[index] for index in indices])

        restored = MlpEngine.from_dict(fuser.to_dict())
        self.assertEqual(restored.split, (0.6, 0.2, 0.2))
        self.assertEqual(restored.training_splits(dataset), splits)
