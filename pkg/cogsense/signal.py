"""
Primary-user signals, receiver noise and fading processes.

Each secondary user ``i`` observes, at sample ``k``::

    H0: y_i(k) = n_i(k)
    H1: y_i(k) = h_i * d_i(k) + n_i(k)

with ``n_i`` circularly-symmetric complex Gaussian noise. All generators are
deterministic functions of their parameters and the ``numpy.random.Generator``
they are handed.
"""
import math
from dataclasses import dataclass

import numpy as np

from cogsense import constants
from cogsense.exceptions import ConfigurationError, InputError

# Samples per chunk when evaluating a sum-of-sinusoids process.
FADING_CHUNK = 4096


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(value, dtype=float))


def _check_count(n, name="n"):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ConfigurationError("%s must be an integer >= 1, got %r." % (name, n))
    return int(n)


@dataclass(frozen=True)
class PrimarySignal:
    samples: np.ndarray
    modulation_order: int = 4

    def __len__(self):
        return len(self.samples)

    @property
    def power(self):
        return float(np.mean(np.abs(self.samples) ** 2))


@dataclass(frozen=True)
class UserChannel:
    """
    Sensing channel between the primary and one secondary user.

    ``snr`` is linear and always equals ``|gain_h|^2 * signal_power /
    noise_variance``. A zero ``noise_variance`` is accepted for noiseless
    checks; its ``snr`` is infinite (or zero for a zero gain).
    """

    gain_h: complex
    noise_variance: float
    snr: float
    signal_power: float = 1.0

    def __post_init__(self):
        if self.noise_variance < 0:
            raise ConfigurationError(
                "noise_variance must be >= 0, got %r." % self.noise_variance
            )
        expected = self.expected_snr(self.gain_h, self.noise_variance, self.signal_power)
        if math.isinf(expected) or expected == 0:
            consistent = self.snr == expected
        else:
            consistent = abs(self.snr - expected) <= 1e-12 * expected
        if not consistent:
            raise ConfigurationError(
                "snr %r is inconsistent with gain_h and noise_variance (expected %r)."
                % (self.snr, expected)
            )

    @staticmethod
    def expected_snr(gain_h, noise_variance, signal_power=1.0):
        received = abs(gain_h) ** 2 * signal_power
        if noise_variance == 0:
            return math.inf if received > 0 else 0.0
        return received / noise_variance

    @classmethod
    def from_gain(cls, gain_h, noise_variance, signal_power=1.0):
        return cls(
            gain_h=complex(gain_h),
            noise_variance=float(noise_variance),
            snr=cls.expected_snr(gain_h, noise_variance, signal_power),
            signal_power=float(signal_power),
        )


def channel_for_snr(snr_db, noise_variance=1.0, fading_gain=1.0, signal_power=1.0):
    """
    Builds the channel giving an average sensing SNR of ``snr_db``.

    The deterministic amplitude is scaled by ``fading_gain`` (unit mean power),
    so the instantaneous SNR is ``snr * |fading_gain|^2``.
    """
    if noise_variance <= 0:
        raise ConfigurationError(
            "noise_variance must be > 0, got %r." % (noise_variance,)
        )
    amplitude = math.sqrt(float(db_to_linear(snr_db)) * noise_variance / signal_power)
    return UserChannel.from_gain(amplitude * complex(fading_gain), noise_variance, signal_power)


def qam_constellation(order=4):
    if order not in constants.SUPPORTED_QAM_ORDERS:
        raise ConfigurationError(
            "Unsupported QAM order %r; supported orders are %s."
            % (order, ", ".join(str(o) for o in constants.SUPPORTED_QAM_ORDERS))
        )
    a = math.sqrt(0.5)
    return np.array([complex(a, a), complex(-a, a), complex(-a, -a), complex(a, -a)])


def generate_qam(n, order, rng):
    """Draws ``n`` independent, uniformly chosen unit-power QAM symbols."""
    constellation = qam_constellation(order)
    n = _check_count(n)
    return PrimarySignal(
        samples=constellation[rng.integers(0, len(constellation), size=n)],
        modulation_order=order,
    )


def generate_gaussian_signal(n, rng, power=1.0):
    """A complex Gaussian primary signal, the usual analytic benchmark."""
    n = _check_count(n)
    return PrimarySignal(
        samples=generate_awgn(n, power, rng), modulation_order=0
    )


def generate_primary(kind, n, rng):
    if kind == constants.QAM:
        return generate_qam(n, 4, rng)
    if kind == constants.GAUSSIAN:
        return generate_gaussian_signal(n, rng)
    raise ConfigurationError(
        "Unknown signal kind '%s'; expected one of %s."
        % (kind, ", ".join(constants.SIGNAL_KINDS))
    )


def generate_awgn(n, variance, rng, complex_valued=True):
    """
    White Gaussian noise of total variance ``variance``.

    Complex noise splits the variance evenly between the real and imaginary
    parts. ``complex_valued=False`` gives real ``N(0, variance)`` samples.
    """
    n = _check_count(n)
    if variance < 0:
        raise ConfigurationError("Noise variance must be >= 0, got %r." % (variance,))

    if not complex_valued:
        if variance == 0:
            return np.zeros(n)
        return math.sqrt(variance) * rng.standard_normal(n)

    if variance == 0:
        return np.zeros(n, dtype=complex)
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def _check_doppler(max_doppler_hz, sample_interval_s):
    if max_doppler_hz <= 0:
        raise ConfigurationError(
            "max_doppler_hz must be > 0, got %r." % (max_doppler_hz,)
        )
    if sample_interval_s <= 0:
        raise ConfigurationError(
            "sample_interval_s must be > 0, got %r." % (sample_interval_s,)
        )
    if max_doppler_hz * sample_interval_s >= 0.5:
        raise ConfigurationError(
            "max_doppler_hz * sample_interval_s must be < 0.5, got %g."
            % (max_doppler_hz * sample_interval_s)
        )


def _check_sinusoids(sinusoids):
    if sinusoids < constants.MIN_FADING_SINUSOIDS:
        raise ConfigurationError(
            "At least %d sinusoids are required, got %r."
            % (constants.MIN_FADING_SINUSOIDS, sinusoids)
        )
    return int(sinusoids)


@dataclass(frozen=True)
class FadingProcess:
    gains: np.ndarray
    max_doppler_hz: float
    sample_interval_s: float

    def __len__(self):
        return len(self.gains)

    @property
    def envelope(self):
        return np.abs(self.gains)

    @property
    def power(self):
        return float(np.mean(np.abs(self.gains) ** 2))


class JakesFader(object):
    """
    One realization of a Rayleigh fading process built from sums of
    sinusoids.

    Arrival angles are spread evenly over a quarter circle with a random
    offset and every sinusoid gets an independent random phase, so the
    in-phase and quadrature parts are uncorrelated and the autocorrelation
    approaches ``J0(2 * pi * f_d * tau)``. Mean power is one.
    """

    def __init__(self, max_doppler_hz, rng, sinusoids=None):
        if max_doppler_hz <= 0:
            raise ConfigurationError(
                "max_doppler_hz must be > 0, got %r." % (max_doppler_hz,)
            )
        self.sinusoids = _check_sinusoids(
            constants.FADING_SINUSOIDS if sinusoids is None else sinusoids
        )
        self.max_doppler_hz = float(max_doppler_hz)

        m = self.sinusoids
        offset = rng.uniform(-math.pi, math.pi)
        alpha = (2.0 * math.pi * np.arange(1, m + 1) - math.pi + offset) / (4.0 * m)
        self.omega_i = 2.0 * math.pi * self.max_doppler_hz * np.cos(alpha)
        self.omega_q = 2.0 * math.pi * self.max_doppler_hz * np.sin(alpha)
        self.phase_i = rng.uniform(-math.pi, math.pi, m)
        self.phase_q = rng.uniform(-math.pi, math.pi, m)
        self.scale = math.sqrt(1.0 / m)

    def gains_at(self, times):
        times = np.atleast_1d(np.asarray(times, dtype=float))
        gains = np.empty(len(times), dtype=complex)

        for start in range(0, len(times), FADING_CHUNK):
            t = times[start : start + FADING_CHUNK, np.newaxis]
            in_phase = np.cos(t * self.omega_i + self.phase_i).sum(axis=1)
            quadrature = np.cos(t * self.omega_q + self.phase_q).sum(axis=1)
            gains[start : start + len(t)] = self.scale * (in_phase + 1j * quadrature)

        return gains


def generate_fading(n, max_doppler_hz, sample_interval_s, rng, sinusoids=None):
    """Samples one fading realization at ``k * sample_interval_s``."""
    n = _check_count(n)
    _check_doppler(max_doppler_hz, sample_interval_s)
    fader = JakesFader(max_doppler_hz, rng, sinusoids=sinusoids)
    return FadingProcess(
        gains=fader.gains_at(np.arange(n) * sample_interval_s),
        max_doppler_hz=float(max_doppler_hz),
        sample_interval_s=float(sample_interval_s),
    )


def block_fading_gains(count, max_doppler_hz, sample_interval_s, rng, sinusoids=None):
    """
    Draws ``count`` independent block-fading gains, one per sensing window.

    Each gain is the value of its own sum-of-sinusoids realization at the
    start of the window; the random phases make that value Rayleigh
    distributed with unit mean power.
    """
    count = _check_count(count, "count")
    _check_doppler(max_doppler_hz, sample_interval_s)
    m = _check_sinusoids(
        constants.FADING_SINUSOIDS if sinusoids is None else sinusoids
    )
    phase_i = rng.uniform(-math.pi, math.pi, (count, m))
    phase_q = rng.uniform(-math.pi, math.pi, (count, m))
    scale = math.sqrt(1.0 / m)
    return scale * (np.cos(phase_i).sum(axis=1) + 1j * np.cos(phase_q).sum(axis=1))


def received_samples(hypothesis, signal, channel, rng):
    """Synthesizes one user's received window under ``hypothesis``."""
    if hypothesis not in (constants.H0, constants.H1):
        raise InputError("hypothesis must be H0 (0) or H1 (1), got %r." % (hypothesis,))
    if len(signal) < 1:
        raise InputError("The primary signal must contain at least one sample.")

    noise = generate_awgn(len(signal), channel.noise_variance, rng)
    if hypothesis == constants.H0:
        return noise
    return channel.gain_h * np.asarray(signal.samples) + noise
