import logging
import math
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase, override_settings

from cogsense.exceptions import ConfigurationError
from cogsense.utils import format_float, round_float, streams
from cogsense.utils.log import LoggingFacade, getLogger


class FormatFloatTestCase(SimpleTestCase):
    def test_significant_digits(self):
        self.assertEqual(format_float(1 / 3), "0.333333333")
        self.assertEqual(format_float(1057.30937155), "1057.30937")
        self.assertEqual(format_float(0.0), "0")
        self.assertEqual(format_float(1e-12), "1e-12")
        self.assertEqual(format_float(2.5, digits=2), "2.5")

    def test_special_values(self):
        self.assertEqual(format_float(math.inf), "inf")
        self.assertEqual(format_float(-math.inf), "-inf")
        self.assertEqual(format_float(math.nan), "nan")
        self.assertEqual(format_float(np.float64(0.5)), "0.5")


class RoundFloatTestCase(SimpleTestCase):
    def test_round(self):
        self.assertEqual(round_float(1 / 3), 0.333333333)
        self.assertEqual(round_float(123456789012.0), 123456789000.0)
        self.assertEqual(round_float(round_float(math.pi)), round_float(math.pi))

    def test_non_finite(self):
        self.assertIsNone(round_float(math.nan))
        self.assertIsNone(round_float(math.inf))


class StreamsTestCase(SimpleTestCase):
    def test_repeatable(self):
        first = streams.stream(7, 3, "noise").standard_normal(5)
        second = streams.stream(7, 3, "noise").standard_normal(5)
        np.testing.assert_array_equal(first, second)

    def test_independent_keys(self):
        base = streams.stream(7, 3, "noise").standard_normal(5)
        for other in (
            streams.stream(8, 3, "noise"),
            streams.stream(7, 4, "noise"),
            streams.stream(7, 3, "signal"),
            streams.stream(7, 3, "noise", user=1),
        ):
            self.assertFalse(np.array_equal(base, other.standard_normal(5)))

    def test_seed_range(self):
        streams.stream(streams.MAX_SEED)
        for seed in (-1, streams.MAX_SEED + 1, 1.5, True, "3"):
            with self.assertRaises(ConfigurationError):
                streams.stream(seed)

    def test_unknown_purpose(self):
        with self.assertRaises(ConfigurationError):
            streams.stream(1, 0, "weather")


class LoggingFacadeTestCase(SimpleTestCase):
    def test_get_logger(self):
        log = getLogger("cogsense.tests")
        self.assertIsInstance(log, LoggingFacade)
        self.assertIs(log.real_logger, logging.getLogger("cogsense.tests"))

    def test_enabled(self):
        log = getLogger("cogsense.tests")
        with patch.object(log.real_logger, "warning") as m:
            log.warning("Fuser '%s' is untrained.", "nlms")
        m.assert_called_once_with("Fuser '%s' is untrained.", "nlms")

    @override_settings(COGSENSE_LOGGING=False)
    def test_disabled(self):
        log = getLogger("cogsense.tests")
        with patch.object(log.real_logger, "warning") as m:
            log.warning("Fuser '%s' is untrained.", "nlms")
        self.assertFalse(m.called)
        self.assertEqual(log.info, log.noop)

    def test_bind_prefixes_messages(self):
        log = getLogger("cogsense.tests").bind(seed=11)
        with patch.object(log.real_logger, "info") as m:
            log.info("Wrote %d files.", 7)
        m.assert_called_once_with("[seed 11] Wrote %d files.", 7)

    def test_bind_merges_context(self):
        base = getLogger("cogsense.tests")
        bound = base.bind(seed=3).bind(trials="1 - 5")
        self.assertEqual(base.context, {})
        self.assertEqual(bound.context, {"seed": 3, "trials": "1 - 5"})
        with patch.object(bound.real_logger, "debug") as m:
            bound.debug("Simulated.")
        m.assert_called_once_with("[seed 3, trials 1 - 5] Simulated.")

    def test_bind_leaves_other_attributes(self):
        log = getLogger("cogsense.tests").bind(seed=1)
        self.assertEqual(log.name, "cogsense.tests")

    @override_settings(COGSENSE_LOGGING=False)
    def test_bound_disabled(self):
        log = getLogger("cogsense.tests").bind(seed=1)
        with patch.object(log.real_logger, "error") as m:
            log.error("Failed.")
        self.assertFalse(m.called)
