"""
Per-user energy detection.

Thresholds and theoretical curves use the Gaussian approximation of the
energy statistic. Under the ``real`` convention (the default) the H0 statistic
has mean ``N * sigma^2`` and standard deviation ``sqrt(2N) * sigma^2``, which
is the convention that makes the textbook false-alarm threshold
self-consistent. The ``complex`` convention, used for complex-baseband
windows, has standard deviation ``sqrt(N) * sigma^2``.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc, erfcinv

from cogsense import constants
from cogsense.exceptions import ConfigurationError, DomainError, InputError

ROOT_XTOL = 1e-14
ROOT_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class DetectorConfig:
    n_samples: int
    bandwidth_hz: Optional[float] = None
    duration_s: Optional[float] = None

    def __post_init__(self):
        _check_samples(self.n_samples)
        if self.bandwidth_hz is not None and self.bandwidth_hz <= 0:
            raise ConfigurationError("bandwidth_hz must be > 0.")
        if self.duration_s is not None and self.duration_s <= 0:
            raise ConfigurationError("duration_s must be > 0.")
        if self.bandwidth_hz is not None and self.duration_s is not None:
            expected = round(2 * self.bandwidth_hz * self.duration_s)
            if expected != self.n_samples:
                raise ConfigurationError(
                    "n_samples (%d) must equal round(2 * B * T) = %d."
                    % (self.n_samples, expected)
                )

    @classmethod
    def from_bandwidth(cls, bandwidth_hz, duration_s):
        """N = 2BT, the time-bandwidth product."""
        return cls(
            n_samples=int(round(2 * bandwidth_hz * duration_s)),
            bandwidth_hz=bandwidth_hz,
            duration_s=duration_s,
        )


@dataclass(frozen=True)
class EnergyStatistic:
    value: float
    user_index: int = 0
    n_samples: int = 0


@dataclass(frozen=True)
class DetectionOperatingPoint:
    p_fa: float
    p_d: float
    p_md: float
    threshold: float
    snr: float
    n_samples: int
    noise_variance: float


def _check_samples(n_samples):
    if (
        isinstance(n_samples, bool)
        or not isinstance(n_samples, (int, np.integer))
        or n_samples < 1
    ):
        raise ConfigurationError(
            "n_samples must be an integer >= 1, got %r." % (n_samples,)
        )


def _check_probability(p, name="target_pfa"):
    if not (isinstance(p, (int, float, np.floating)) and 0 < p < 1):
        raise DomainError("%s must lie in the open interval (0, 1), got %r." % (name, p))


def _check_convention(convention):
    if convention not in constants.CONVENTIONS:
        raise ConfigurationError(
            "Unknown statistic convention '%s'; expected one of %s."
            % (convention, ", ".join(constants.CONVENTIONS))
        )


def energy(samples, user_index=0):
    """Sum of squared magnitudes over the window."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise InputError("Energy requires at least one sample.")
    # fsum keeps the value independent of sample order.
    value = math.fsum((np.abs(samples.ravel()) ** 2).tolist())
    return EnergyStatistic(value=value, user_index=user_index, n_samples=samples.size)


def batch_energy(samples):
    """Row-wise energy statistics of a ``(windows, N)`` array."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise InputError("Energy requires at least one sample.")
    return np.sum(np.abs(samples) ** 2, axis=-1)


def q_function(x):
    """Upper-tail probability of the standard normal distribution."""
    result = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(result) if np.ndim(result) == 0 else result


def q_inverse(p):
    """
    Inverse of ``q_function`` by bracketed root finding.

    The bracket is centred on the closed-form ``erfcinv`` estimate.
    """
    _check_probability(p, "p")
    guess = math.sqrt(2.0) * float(erfcinv(2.0 * p))
    low, high = guess - 1.0, guess + 1.0
    while q_function(low) < p:
        low -= 1.0
    while q_function(high) > p:
        high += 1.0
    return brentq(lambda x: q_function(x) - p, low, high, xtol=ROOT_XTOL, rtol=ROOT_RTOL)


def _deviation(n_samples, convention):
    return math.sqrt(2.0 * n_samples) if convention == constants.REAL else math.sqrt(n_samples)


def threshold_for_pfa(target_pfa, noise_variance, n_samples, convention=constants.REAL):
    """Threshold giving false-alarm probability ``target_pfa`` under H0."""
    _check_probability(target_pfa)
    _check_samples(n_samples)
    _check_convention(convention)
    if not noise_variance > 0:
        raise ConfigurationError(
            "noise_variance must be > 0, got %r." % (noise_variance,)
        )

    return (
        q_inverse(target_pfa) * noise_variance * _deviation(n_samples, convention)
        + n_samples * noise_variance
    )


def _check_snr(snr):
    if not (isinstance(snr, (int, float, np.floating)) and snr >= 0):
        raise ConfigurationError("snr must be a linear value >= 0, got %r." % (snr,))


def pd_theoretical(target_pfa, snr, n_samples, convention=constants.REAL):
    """Detection probability at ``target_pfa`` under the Gaussian approximation."""
    _check_probability(target_pfa)
    _check_snr(snr)
    _check_samples(n_samples)
    _check_convention(convention)

    if snr == 0:
        return float(target_pfa)
    if math.isinf(snr):
        return 1.0

    if convention == constants.REAL:
        shift = math.sqrt(n_samples / 2.0) * snr
    else:
        shift = math.sqrt(n_samples) * snr
    return q_function((q_inverse(target_pfa) - shift) / math.sqrt(1.0 + 2.0 * snr))


def pm_theoretical(target_pfa, snr, n_samples, convention=constants.REAL):
    return 1.0 - pd_theoretical(target_pfa, snr, n_samples, convention=convention)


def pd_as_printed(target_pfa, snr, noise_sigma, n_samples):
    """
    Detection probability with the published closed form evaluated as typeset.

    The form omits the H1 mean shift and so does not reduce to
    ``target_pfa`` at zero SNR. It is kept for diagnosis only; use
    ``pd_theoretical`` for anything else.
    """
    _check_probability(target_pfa)
    _check_snr(snr)
    _check_samples(n_samples)
    if not noise_sigma > 0:
        raise ConfigurationError("noise_sigma must be > 0, got %r." % (noise_sigma,))

    variance = noise_sigma ** 2
    numerator = (
        q_inverse(target_pfa) * variance * math.sqrt(2.0 * n_samples)
        + n_samples * variance
    )
    denominator = noise_sigma * math.sqrt(2.0 * n_samples * (1.0 + 2.0 * snr))
    return q_function(numerator / denominator)


def operating_point(
    target_pfa, snr, n_samples, noise_variance=1.0, convention=constants.REAL
):
    p_d = pd_theoretical(target_pfa, snr, n_samples, convention=convention)
    return DetectionOperatingPoint(
        p_fa=float(target_pfa),
        p_d=p_d,
        p_md=1.0 - p_d,
        threshold=threshold_for_pfa(
            target_pfa, noise_variance, n_samples, convention=convention
        ),
        snr=float(snr),
        n_samples=int(n_samples),
        noise_variance=float(noise_variance),
    )


def decide(statistic, threshold):
    """1 when the statistic strictly exceeds the threshold; ties go to H0."""
    value = statistic.value if isinstance(statistic, EnergyStatistic) else statistic
    return constants.H1 if value > threshold else constants.H0
