import math

import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from cogsense import constants
from cogsense.exceptions import ConfigurationError, DeepFadeError, InputError, UsageError
from cogsense.reporting import (
    Report,
    ReportingChannel,
    equalize,
    feature_value,
    fusion_features,
    local_bit_threshold,
    recover_hard_bit,
    transmit_report,
)


def hard_report(payload, received, gain=1.0 + 0j, user_index=0):
    return Report(
        mode=constants.HARD,
        payload=float(payload),
        received=complex(received),
        fading_gain=gain,
        user_index=user_index,
    )


class ReportingChannelTestCase(SimpleTestCase):
    def test_domains(self):
        with self.assertRaises(ConfigurationError):
            ReportingChannel(fading_variance=0.0, noise_variance=1.0)
        with self.assertRaises(ConfigurationError):
            ReportingChannel(fading_variance=1.0, noise_variance=-1.0)
        ReportingChannel(fading_variance=1.0, noise_variance=0.0)

    def test_for_report_snr(self):
        channel = ReportingChannel.for_report_snr(10.0, fading_variance=2.0)
        self.assertAlmostEqual(channel.noise_variance, 0.2)
        self.assertTrue(channel.csi_known)


class TransmitReportTestCase(SimpleTestCase):
    def test_zero_payload_without_noise(self):
        channel = ReportingChannel(fading_variance=1.0, noise_variance=0.0)
        report = transmit_report(0.0, channel, np.random.default_rng(1))
        self.assertEqual(report.received, 0j)

    def test_noiseless_unit_payload_is_rayleigh(self):
        channel = ReportingChannel(fading_variance=1.0, noise_variance=0.0)
        rng = np.random.default_rng(2)
        magnitudes = []
        for _ in range(3000):
            report = transmit_report(1.0, channel, rng, mode=constants.HARD)
            self.assertEqual(report.received, report.fading_gain)
            magnitudes.append(abs(report.received))
        result = stats.kstest(magnitudes, "rayleigh", args=(0, 1 / math.sqrt(2)))
        self.assertGreater(result.pvalue, 1e-3)

    def test_received_power(self):
        channel = ReportingChannel(fading_variance=1.0, noise_variance=1.0)
        rng = np.random.default_rng(3)
        powers = [
            abs(transmit_report(1.0, channel, rng).received) ** 2 for _ in range(40000)
        ]
        self.assertLess(abs(np.mean(powers) - 2.0), 0.06)

    def test_gain_hidden_without_csi(self):
        channel = ReportingChannel(fading_variance=1.0, noise_variance=0.1, csi_known=False)
        report = transmit_report(1.0, channel, np.random.default_rng(4), user_index=3)
        self.assertIsNone(report.fading_gain)
        self.assertEqual(report.user_index, 3)

    def test_zero_payload_without_csi_is_rayleigh_noise(self):
        channel = ReportingChannel(fading_variance=1.0, noise_variance=0.4, csi_known=False)
        rng = np.random.default_rng(10)
        magnitudes = []
        for _ in range(10000):
            report = transmit_report(0, channel, rng, mode=constants.HARD)
            self.assertIsNone(report.fading_gain)
            magnitudes.append(abs(report.received))
        result = stats.kstest(magnitudes, "rayleigh", args=(0, math.sqrt(0.2)))
        self.assertGreater(result.pvalue, 0.01)

    def test_payload_checks(self):
        channel = ReportingChannel(fading_variance=1.0, noise_variance=0.1)
        rng = np.random.default_rng(5)
        with self.assertRaises(InputError):
            transmit_report(0.5, channel, rng, mode=constants.HARD)
        with self.assertRaises(InputError):
            transmit_report(-1.0, channel, rng, mode=constants.SOFT)
        with self.assertRaises(ConfigurationError):
            transmit_report(1.0, channel, rng, mode="analog")


class EqualizeTestCase(SimpleTestCase):
    def test_noiseless_inversion(self):
        for gain in (1 + 0j, 0.3 - 2j, -0.01 + 0.5j):
            report = Report(constants.SOFT, 3.0, gain * 3.0, gain)
            self.assertAlmostEqual(equalize(report), 3.0, places=12)

    def test_unbiased(self):
        rng = np.random.default_rng(6)
        gains = np.exp(1j * rng.uniform(-math.pi, math.pi, 10 ** 5))
        noise = np.sqrt(0.5) * (rng.standard_normal(10 ** 5) + 1j * rng.standard_normal(10 ** 5))
        values = [
            equalize(Report(constants.SOFT, 1.0, gain + eta, gain))
            for gain, eta in zip(gains, noise)
        ]
        error = np.std(values) / math.sqrt(len(values))
        self.assertLess(abs(np.mean(values) - 1.0), 3 * error)

    def test_deep_fade(self):
        with self.assertRaises(DeepFadeError):
            equalize(Report(constants.SOFT, 1.0, 0.5 + 0j, 0j))

    def test_needs_gain(self):
        with self.assertRaises(UsageError):
            equalize(Report(constants.SOFT, 1.0, 0.5 + 0j, None))


class RecoverHardBitTestCase(SimpleTestCase):
    def test_noiseless(self):
        self.assertEqual(recover_hard_bit(hard_report(1, 1 + 0j)), 1)
        self.assertEqual(recover_hard_bit(hard_report(0, 0j)), 0)

    def test_deep_fade_is_erased(self):
        self.assertEqual(recover_hard_bit(hard_report(1, 0.9 + 0j, gain=0j)), 0)

    def test_magnitude_without_csi(self):
        self.assertEqual(recover_hard_bit(hard_report(1, 0.8j, gain=None)), 1)
        self.assertEqual(recover_hard_bit(hard_report(0, 0.1, gain=None)), 0)

    def test_soft_reports_carry_no_bit(self):
        with self.assertRaises(UsageError):
            recover_hard_bit(Report(constants.SOFT, 1.0, 1 + 0j, 1 + 0j))

    def test_noise_drowns_the_bit(self):
        channel = ReportingChannel(fading_variance=1.0, noise_variance=1e8)
        rng = np.random.default_rng(7)
        errors = [
            recover_hard_bit(transmit_report(1, channel, rng, mode=constants.HARD)) != 1
            for _ in range(20000)
        ]
        self.assertLess(abs(np.mean(errors) - 0.5), 0.02)

    def test_error_rate_grows_with_report_noise(self):
        rng = np.random.default_rng(8)
        rates = []
        for ratio in (0.01, 0.1, 1.0, 10.0):
            channel = ReportingChannel(fading_variance=1.0, noise_variance=ratio)
            bits = rng.integers(0, 2, 5000)
            errors = [
                recover_hard_bit(transmit_report(bit, channel, rng, mode=constants.HARD))
                != bit
                for bit in bits
            ]
            rates.append(np.mean(errors))
        self.assertLess(rates[0], 0.03)
        self.assertTrue(all(low < high for low, high in zip(rates, rates[1:])))

    def test_magnitude_is_scaled_by_rms_gain(self):
        self.assertEqual(
            recover_hard_bit(hard_report(1, 1.5j, gain=None), fading_variance=4.0), 1
        )
        self.assertEqual(
            recover_hard_bit(hard_report(1, 0.8, gain=None), fading_variance=4.0), 0
        )

    def test_bit_agrees_with_hard_feature(self):
        rng = np.random.default_rng(9)
        for csi_known in (True, False):
            channel = ReportingChannel(
                fading_variance=4.0, noise_variance=0.5, csi_known=csi_known
            )
            for bit in rng.integers(0, 2, 2000):
                report = transmit_report(bit, channel, rng, mode=constants.HARD)
                feature = feature_value(report, fading_variance=4.0)
                self.assertEqual(
                    recover_hard_bit(report, fading_variance=4.0),
                    int(feature > constants.HARD_BIT_THRESHOLD),
                )


class FeatureTestCase(SimpleTestCase):
    def test_soft_feature_is_normalized(self):
        gain = 0.5 + 0.5j
        report = Report(constants.SOFT, 200.0, gain * 200.0, gain)
        self.assertAlmostEqual(
            feature_value(report, n_samples=100, noise_variance=2.0), 1.0, places=12
        )

    def test_hard_feature_is_limited(self):
        self.assertEqual(feature_value(hard_report(1, 3.0)), 1.0)
        self.assertEqual(feature_value(hard_report(0, -2.0)), 0.0)
        self.assertAlmostEqual(feature_value(hard_report(1, 0.7)), 0.7)

    def test_deep_fade_feature(self):
        self.assertEqual(feature_value(hard_report(1, 0.9, gain=0j)), 0.0)

    def test_feature_without_csi(self):
        report = hard_report(1, 1.5j, gain=None)
        self.assertAlmostEqual(feature_value(report, fading_variance=2.25), 1.0)

    def test_fusion_features(self):
        reports = [hard_report(1, 1.0, user_index=0), hard_report(0, 0.2, user_index=1)]
        np.testing.assert_allclose(fusion_features(reports), [1.0, 0.2])
        with self.assertRaises(InputError):
            fusion_features([])

    def test_local_bit_threshold(self):
        self.assertEqual(local_bit_threshold(constants.HARD), constants.HARD_BIT_THRESHOLD)
        self.assertEqual(
            local_bit_threshold(
                constants.SOFT, energy_threshold=110.0, n_samples=100, noise_variance=1.0
            ),
            1.1,
        )
        with self.assertRaises(ConfigurationError):
            local_bit_threshold(constants.SOFT)
