"""
Reporting channels between the secondary users and the fusion center.

A report ``d_i`` (the energy statistic for soft fusion, a local decision
bit for hard fusion) reaches the fusion center as ``y_i = f_i * d_i + eta_i``
with a fresh complex Gaussian gain ``f_i`` and complex Gaussian noise
``eta_i`` on every report. Hard bits use on-off signaling.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from cogsense import constants
from cogsense.exceptions import (
    ConfigurationError,
    DeepFadeError,
    InputError,
    UsageError,
)
from cogsense.signal import generate_awgn
from cogsense.utils.log import getLogger

log = getLogger("cogsense.reporting")


@dataclass(frozen=True)
class ReportingChannel:
    fading_variance: float
    noise_variance: float
    csi_known: bool = True

    def __post_init__(self):
        if not self.fading_variance > 0:
            raise ConfigurationError(
                "fading_variance must be > 0, got %r." % (self.fading_variance,)
            )
        # Zero noise is allowed for noiseless checks.
        if self.noise_variance < 0:
            raise ConfigurationError(
                "noise_variance must be >= 0, got %r." % (self.noise_variance,)
            )

    @classmethod
    def for_report_snr(cls, report_snr_db, fading_variance=1.0, csi_known=True):
        """Noise variance chosen so ``fading_variance / noise_variance`` is the report SNR."""
        return cls(
            fading_variance=fading_variance,
            noise_variance=fading_variance / 10.0 ** (report_snr_db / 10.0),
            csi_known=csi_known,
        )


@dataclass(frozen=True)
class Report:
    mode: str
    payload: float
    received: complex
    fading_gain: Optional[complex]
    user_index: int = 0


def _check_payload(payload, mode):
    if mode not in constants.REPORT_MODES:
        raise ConfigurationError(
            "Unknown report mode '%s'; expected one of %s."
            % (mode, ", ".join(constants.REPORT_MODES))
        )
    if mode == constants.HARD and payload not in (0, 1):
        raise InputError("A hard report must carry 0 or 1, got %r." % (payload,))
    if mode == constants.SOFT and not payload >= 0:
        raise InputError("A soft report must be >= 0, got %r." % (payload,))


def transmit_report(payload, channel, rng, mode=constants.SOFT, user_index=0):
    """Sends one report over ``channel`` with fresh fading and noise draws."""
    _check_payload(payload, mode)

    fading_gain = complex(generate_awgn(1, channel.fading_variance, rng)[0])
    noise = complex(generate_awgn(1, channel.noise_variance, rng)[0])

    return Report(
        mode=mode,
        payload=float(payload),
        received=fading_gain * payload + noise,
        fading_gain=fading_gain if channel.csi_known else None,
        user_index=user_index,
    )


def equalize(report):
    """
    Coherent, unbiased estimate of the payload: ``Re(y * conj(f) / |f|^2)``.
    """
    if report.fading_gain is None:
        raise UsageError(
            "Equalization needs the reporting-channel gain; it is unknown at the fusion center."
        )
    magnitude = abs(report.fading_gain)
    if magnitude <= constants.DEEP_FADE_EPSILON:
        raise DeepFadeError(
            "Report from user %d is in a deep fade (|f| = %g)."
            % (report.user_index, magnitude)
        )
    return (report.received * report.fading_gain.conjugate()).real / magnitude ** 2


def detected_value(report, fading_variance=1.0):
    """
    What the fusion center reads from a report before thresholding or scaling.

    The equalized value when the gain is known. Otherwise the received
    magnitude divided by ``sqrt(fading_variance)``, the RMS gain. ``None``
    marks a deep fade.
    """
    if report.fading_gain is None:
        return abs(report.received) / math.sqrt(fading_variance)
    try:
        return equalize(report)
    except DeepFadeError:
        return None


def recover_hard_bit(report, fading_variance=1.0):
    """
    Recovers a hard decision at the fusion center.

    Deep fades are erased to 0. The bit agrees with the hard feature of
    ``feature_value`` for the same ``fading_variance``.
    """
    if report.mode != constants.HARD:
        raise UsageError("Only hard reports carry a decision bit.")

    value = detected_value(report, fading_variance)
    if value is None:
        log.debug("Erasing deep-faded report from user %d.", report.user_index)
        return constants.H0
    return constants.H1 if value > constants.HARD_BIT_THRESHOLD else constants.H0


def feature_value(report, n_samples=1, noise_variance=1.0, fading_variance=1.0):
    """
    One user's feature at the fusion center.

    Soft features are divided by ``N * sigma^2`` so an empty band sits near
    one. Hard features are limited to ``HARD_FEATURE_RANGE``. Deep fades map
    to 0.
    """
    value = detected_value(report, fading_variance)
    if value is None:
        return 0.0

    if report.mode == constants.SOFT:
        return value / (n_samples * noise_variance)

    low, high = constants.HARD_FEATURE_RANGE
    return min(max(value, low), high)


def fusion_features(reports, n_samples=1, noise_variance=1.0, fading_variance=1.0):
    """The length-M feature vector (no bias term) for one sensing window."""
    if not reports:
        raise InputError("At least one report is required.")
    return np.array(
        [
            feature_value(
                report,
                n_samples=n_samples,
                noise_variance=noise_variance,
                fading_variance=fading_variance,
            )
            for report in reports
        ]
    )


def local_bit_threshold(mode, energy_threshold=None, n_samples=1, noise_variance=1.0):
    """
    Feature value above which a report counts as a 1 for the hard rules.

    Hard features use the on-off midpoint. Soft features are compared with
    the local energy threshold in the same normalized units.
    """
    if mode == constants.HARD:
        return constants.HARD_BIT_THRESHOLD
    if energy_threshold is None:
        raise ConfigurationError("Soft features need the local energy threshold.")
    return energy_threshold / (n_samples * noise_variance)
