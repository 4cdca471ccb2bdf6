import json
import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from cogsense import constants
from cogsense.exceptions import InputError, UsageError
from cogsense.fusion import (
    FusionInput,
    TrainingRecord,
    build_fuser,
    check_dimensions,
    load_fuser,
    save_fuser,
    stack_inputs,
    with_bias,
)
from test_cogsense.mocks import MockFuser


class FusionInputTestCase(SimpleTestCase):
    def test_create_appends_bias(self):
        item = FusionInput.create([0.2, 0.7], constants.H1, time_index=5)
        np.testing.assert_array_equal(item.features, [0.2, 0.7, 1.0])
        self.assertEqual(item.m_users, 2)
        np.testing.assert_array_equal(item.values, [0.2, 0.7])
        self.assertEqual(item.time_index, 5)
        self.assertIsInstance(item.label, int)

    def test_numpy_labels(self):
        item = FusionInput.create([1.0], np.int64(1))
        self.assertEqual(item.label, 1)

    def test_validation(self):
        with self.assertRaises(InputError):
            FusionInput(features=np.array([1.0]), label=0)
        with self.assertRaises(InputError):
            FusionInput(features=np.array([0.5, 0.0]), label=0)
        with self.assertRaises(InputError):
            FusionInput.create([1.0], 2)
        with self.assertRaises(InputError):
            FusionInput(features=np.ones((2, 2)), label=0)

    def test_with_bias(self):
        np.testing.assert_array_equal(with_bias([]), [1.0])


class StackInputsTestCase(SimpleTestCase):
    def test_stack(self):
        dataset = [
            FusionInput.create([0.1, 0.2], 0),
            FusionInput.create([0.3, 0.4], 1),
        ]
        features, labels = stack_inputs(dataset)
        self.assertEqual(features.shape, (2, 3))
        np.testing.assert_array_equal(labels, [0.0, 1.0])

    def test_empty(self):
        with self.assertRaises(InputError):
            stack_inputs([])

    def test_ragged(self):
        dataset = [FusionInput.create([0.1], 0), FusionInput.create([0.3, 0.4], 1)]
        with self.assertRaises(InputError):
            stack_inputs(dataset)

    def test_check_dimensions(self):
        np.testing.assert_array_equal(check_dimensions(2, [1, 2]), [1.0, 2.0])
        with self.assertRaises(UsageError):
            check_dimensions(3, [1, 2])


class TrainingRecordTestCase(SimpleTestCase):
    def test_round_trip_with_missing_values(self):
        record = TrainingRecord()
        record.append(1, 0.25, math.nan, math.nan, 1.5)
        record.append(2, 0.125, math.nan, math.nan, 0.75)
        record.best_epoch = 2
        record.stop_epoch = 2

        data = record.to_dict()
        self.assertIsNone(data["epochs"][0]["val_mse"])
        self.assertEqual(data["epochs"][1]["train_mse"], 0.125)
        json.dumps(data, allow_nan=False)

        restored = TrainingRecord.from_dict(data)
        self.assertEqual(len(restored), 2)
        self.assertEqual(restored.best_epoch, 2)
        self.assertTrue(math.isnan(restored.epochs[0].test_mse))
        self.assertEqual(restored.epochs[0].grad_norm, 1.5)


class MockFuserTestCase(SimpleTestCase):
    def test_settings_options(self):
        fuser = build_fuser("mock")
        self.assertIsInstance(fuser, MockFuser)
        self.assertEqual(fuser.threshold, 0.25)
        self.assertEqual(fuser.engine_path, "test_cogsense.mocks.MockFuser")
        self.assertEqual(repr(fuser), "<MockFuser: mock>")

    def test_predict_uses_the_threshold(self):
        fuser = build_fuser("mock")
        features = with_bias([0.2, 0.4])
        self.assertEqual(fuser.predict(features), constants.H1)
        self.assertEqual(fuser.predict(features, threshold=0.5), constants.H0)

    def test_fixed_fusers_ignore_training(self):
        fuser = build_fuser("mock")
        self.assertIs(fuser.fit([FusionInput.create([1.0], 1)]), fuser)
        self.assertTrue(fuser.trained)
        self.assertFalse(fuser.adaptive)


class SaveLoadTestCase(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.directory.name, "fuser.json")

    def tearDown(self):
        self.directory.cleanup()

    def write(self, content):
        with open(self.path, "w") as handle:
            handle.write(content)

    def test_fixed_rule(self):
        save_fuser(build_fuser("k_of_m:2", THRESHOLD=0.4), self.path)
        with open(self.path) as handle:
            data = json.load(handle)
        self.assertEqual(data["schema"], constants.FUSER_SCHEMA)
        self.assertEqual(data["engine"], "cogsense.fusion.hard_rules.KOfMFuser")
        self.assertNotIn("training_record", data)

        restored = load_fuser(self.path)
        self.assertEqual(restored.alias, "k_of_m:2")
        self.assertEqual(restored.k, 2)
        self.assertEqual(restored.threshold, 0.4)

    def test_not_json(self):
        self.write("{not json")
        with self.assertRaises(InputError):
            load_fuser(self.path)

    def test_wrong_schema(self):
        self.write(json.dumps({"schema": constants.SUMMARY_SCHEMA}))
        with self.assertRaises(InputError):
            load_fuser(self.path)
        self.write(json.dumps([1, 2]))
        with self.assertRaises(InputError):
            load_fuser(self.path)

    def write_fuser(self, **data):
        self.write(json.dumps(dict({"schema": constants.FUSER_SCHEMA}, **data)))

    def test_missing_engine_or_alias(self):
        self.write_fuser(alias="nlms")
        with self.assertRaisesRegex(InputError, "'engine'"):
            load_fuser(self.path)
        self.write_fuser(engine="cogsense.fusion.nlms.NlmsFuser")
        with self.assertRaisesRegex(InputError, "'alias'"):
            load_fuser(self.path)
        self.write_fuser(alias="nlms", engine=["cogsense"])
        with self.assertRaises(InputError):
            load_fuser(self.path)

    def test_engine_must_be_a_fuser(self):
        for engine in ("os.path.join", "cogsense.config.ScenarioConfig"):
            self.write_fuser(alias="x", engine=engine)
            with self.assertRaisesRegex(InputError, "not a fuser"):
                load_fuser(self.path)

    def test_unknown_engine(self):
        for engine in ("cogsense.fusion.nowhere.Fuser", "NlmsFuser", "cogsense.fusion.Nope"):
            self.write_fuser(alias="x", engine=engine)
            with self.assertRaisesRegex(InputError, "unknown engine"):
                load_fuser(self.path)

    def test_state_must_fit_the_engine(self):
        self.write_fuser(
            alias="mlp",
            engine="cogsense.fusion.mlp.MlpEngine",
            state={"weights": {"hidden_weights": [[1.0]]}},
        )
        with self.assertRaisesRegex(InputError, "invalid fuser state"):
            load_fuser(self.path)
