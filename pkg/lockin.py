"""emiscan

Module containing the dual-phase lock-in amplifier: synthesis of the polarimeter signal
at the RF drive frequency, demodulation into in-phase and quadrature outputs, and the
frequency sweep through the resonance.

Noise streams are derived from (master seed, key) with numpy's SeedSequence, so every
(pixel, mode, sweep point) draws the same numbers whatever order it runs in.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Sequence
import math

import numpy as np
from scipy.signal import lfilter

from emi_errors import InvalidDriveConfig, LengthMismatch, NyquistViolation
from magnetometer import ResonanceParams, lineshape
import emi_constants as const


@dataclass(frozen=True)
class DriveConfig:
    """The RF drive and lock-in settings for one measurement.

    Instance Attributes:
        - omega_rf: The drive and reference angular frequency, in rad/s.
        - duration: The record length, in seconds.
        - sample_rate: The digitiser rate, in Hz.
        - lp_time_constant: The low-pass time constant, in seconds.
        - lp_order: The number of cascaded single-pole stages.
        - reference_phase: The lock-in reference phase, in radians.

    Representation Invariants:
        - self.duration >= 5 * self.lp_time_constant
        - self.lp_order >= 1
    """
    omega_rf: float = const.DRIVE_OMEGA
    duration: float = const.SWEEP_DWELL
    sample_rate: float = const.SAMPLE_RATE
    lp_time_constant: float = const.LP_TIME_CONSTANT
    lp_order: int = const.LP_ORDER
    reference_phase: float = 0.0

    def __post_init__(self) -> None:
        if not (self.omega_rf > 0 and self.sample_rate > 0 and self.lp_time_constant > 0):
            raise InvalidDriveConfig('drive frequency, sample rate and time constant must be '
                                     'positive')
        # Relative slack so that 5 time constants written in floating point still pass.
        if self.duration < 5 * self.lp_time_constant * (1 - 1e-12):
            raise InvalidDriveConfig(f'record of {self.duration} s is shorter than 5 time '
                                     f'constants of {self.lp_time_constant} s')
        if self.lp_order < 1:
            raise InvalidDriveConfig(f'filter order must be at least 1, got {self.lp_order}')

    def n_samples(self) -> int:
        """Returns the number of samples in one record."""
        return int(round(self.duration * self.sample_rate))

    def times(self) -> np.ndarray:
        """Returns the sample times of one record."""
        return np.arange(self.n_samples()) / self.sample_rate

    def alpha(self) -> float:
        """Returns the smoothing coefficient of one single-pole stage."""
        return 1 - math.exp(-1 / (self.sample_rate * self.lp_time_constant))


@dataclass(frozen=True)
class NoiseSpec:
    """White Gaussian voltage noise on the polarimeter signal.

    Instance Attributes:
        - rms_voltage: The noise standard deviation, in volts.
        - seed: The master seed of every noise stream.

    Representation Invariants:
        - self.rms_voltage >= 0
    """
    rms_voltage: float = const.NOISE_RMS
    seed: int = const.MASTER_SEED

    def __post_init__(self) -> None:
        if not self.rms_voltage >= 0:
            raise ValueError(f'noise RMS must be non-negative, got {self.rms_voltage}')

    def rng(self, key: Sequence[int] = ()) -> np.random.Generator:
        """Returns the generator of the stream identified by key.

        Args:
            - key: Non-negative integers naming the stream, e.g. (pixel, mode, point).
        """
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=tuple(key)))


@dataclass(frozen=True)
class SweepRecord:
    """Lock-in outputs recorded over a frequency sweep.

    Instance Attributes:
        - omegas: The drive frequencies, in rad/s.
        - x: The in-phase outputs, in volts.
        - y: The quadrature outputs, in volts.

    Representation Invariants:
        - len(self.omegas) == len(self.x) == len(self.y) >= 1
        - self.omegas is strictly increasing
    """
    omegas: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        for name in ('omegas', 'x', 'y'):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not len(self.omegas) == len(self.x) == len(self.y) >= 1:
            raise ValueError('sweep arrays must have equal, non-zero lengths')
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError('sweep frequencies must be strictly increasing')

    def __len__(self) -> int:
        return len(self.omegas)


def synthesize(params: ResonanceParams, drive: DriveConfig, b_transverse: complex = 1.0,
               noise: NoiseSpec = NoiseSpec(0.0), key: Sequence[int] = (),
               b_ref: complex = 1.0) -> np.ndarray:
    """Returns the polarimeter signal X cos(w t) + Y sin(w t) + n(t), where (X, Y) is the
    lineshape at the drive frequency and n(t) is the keyed noise stream.

    Args:
        - params: The resonance at the pixel.
        - drive: The drive configuration.
        - b_transverse: The local transverse RF phasor.
        - noise: The noise settings.
        - key: The noise stream key.
        - b_ref: The no-target transverse phasor at the pixel.
    """
    if drive.sample_rate <= 2 * drive.omega_rf / (2 * math.pi):
        raise NyquistViolation(f'sample rate {drive.sample_rate} Hz cannot carry '
                               f'{drive.omega_rf / (2 * math.pi)} Hz')
    x, y = lineshape(params, drive.omega_rf, b_transverse, b_ref)
    phase = drive.omega_rf * drive.times()
    signal = x * np.cos(phase) + y * np.sin(phase)
    if noise.rms_voltage > 0:
        signal = signal + noise.rng(key).normal(0.0, noise.rms_voltage, signal.shape)
    return signal


def _lowpass(values: np.ndarray, drive: DriveConfig) -> np.ndarray:
    """Returns the values passed through the cascaded single-pole low-pass, starting at rest."""
    alpha = drive.alpha()
    for _ in range(drive.lp_order):
        values = lfilter([alpha], [1.0, alpha - 1.0], values)
    return values


def demodulate(signal: np.ndarray, drive: DriveConfig) -> tuple[float, float]:
    """Returns (X, Y) = (2 LP[s cos(w t + p)], 2 LP[s sin(w t + p)]) at the end of the
    record, where p is the reference phase.

    Args:
        - signal: The polarimeter record.
        - drive: The drive configuration it was recorded with.
    """
    signal = np.asarray(signal, dtype=float)
    if len(signal) != drive.n_samples():
        raise LengthMismatch(f'record has {len(signal)} samples, drive expects '
                             f'{drive.n_samples()}')
    phase = drive.omega_rf * drive.times() + drive.reference_phase
    x = 2 * _lowpass(signal * np.cos(phase), drive)[-1]
    y = 2 * _lowpass(signal * np.sin(phase), drive)[-1]
    return float(x), float(y)


@lru_cache(maxsize=64)
def _settling(n_samples: int, alpha: float, order: int) -> float:
    values = np.ones(n_samples)
    for _ in range(order):
        values = lfilter([alpha], [1.0, alpha - 1.0], values)
    return float(values[-1])


def settling_factor(drive: DriveConfig) -> float:
    """Returns the low-pass step response at the end of the record: the fraction of a
    steady quadrature the lock-in reports.

    Args:
        - drive: The drive configuration.
    """
    return _settling(drive.n_samples(), drive.alpha(), drive.lp_order)


@lru_cache(maxsize=64)
def _impulse_energy(n_samples: int, alpha: float, order: int) -> float:
    impulse = np.zeros(n_samples)
    impulse[0] = 1.0
    for _ in range(order):
        impulse = lfilter([alpha], [1.0, alpha - 1.0], impulse)
    return float(np.dot(impulse, impulse))


def lockin_noise_sigma(noise: NoiseSpec, drive: DriveConfig) -> float:
    """Returns the standard deviation of one demodulated quadrature for white input noise,
    sigma * sqrt(2 sum h_k^2) with h the low-pass impulse response over the record.

    Args:
        - noise: The input noise.
        - drive: The drive configuration.
    """
    if noise.rms_voltage == 0:
        return 0.0
    energy = _impulse_energy(drive.n_samples(), drive.alpha(), drive.lp_order)
    return noise.rms_voltage * math.sqrt(2 * energy)


def sweep_omegas(center: float, gamma: float, n_points: int = const.SWEEP_POINTS,
                 half_span: float = const.SWEEP_HALF_SPAN_GAMMAS) -> np.ndarray:
    """Returns n_points evenly spaced drive frequencies over center +/- half_span gamma.

    Args:
        - center: The centre of the sweep.
        - gamma: The linewidth.
        - n_points: The number of points.
        - half_span: The half-span in linewidths.
    """
    return np.linspace(center - half_span * gamma, center + half_span * gamma, n_points)


def measure_point(params: ResonanceParams, drive: DriveConfig, noise: NoiseSpec,
                  b_transverse: complex = 1.0, b_ref: complex = 1.0, key: Sequence[int] = (),
                  analytic: bool = False) -> tuple[float, float]:
    """Returns the lock-in outputs for one drive frequency, either by synthesising and
    demodulating the record or, when analytic, from the settled lineshape plus Gaussian
    noise of the demodulated standard deviation.

    Args:
        - params: The resonance at the pixel.
        - drive: The drive configuration.
        - noise: The noise settings.
        - b_transverse: The local transverse RF phasor.
        - b_ref: The no-target transverse phasor.
        - key: The noise stream key.
        - analytic: Whether to skip the time series.
    """
    if not analytic:
        return demodulate(synthesize(params, drive, b_transverse, noise, key, b_ref), drive)

    settled = replace(params, x_offset=0.0, y_offset=0.0)
    x, y = lineshape(settled, drive.omega_rf, b_transverse, b_ref)
    gain = settling_factor(drive)
    x, y = gain * float(x) + params.x_offset * gain, gain * float(y) + params.y_offset * gain
    sigma = lockin_noise_sigma(noise, drive)
    if sigma > 0:
        dx, dy = noise.rng(key).normal(0.0, sigma, 2)
        x, y = x + dx, y + dy
    return x, y


def run_sweep(params: ResonanceParams, drive: DriveConfig = DriveConfig(),
              n_points: int = const.SWEEP_POINTS, noise: NoiseSpec = NoiseSpec(0.0),
              b_transverse: complex = 1.0, b_ref: complex = 1.0,
              center: Optional[float] = None, key: Sequence[int] = (),
              analytic: bool = False) -> SweepRecord:
    """Returns the record of a sweep through center +/- 5 gamma, one lock-in measurement
    per point. Point i draws from the noise stream (*key, i).

    Args:
        - params: The resonance at the pixel.
        - drive: The template drive configuration; its frequency is replaced per point.
        - n_points: The number of sweep points.
        - noise: The noise settings.
        - b_transverse: The local transverse RF phasor.
        - b_ref: The no-target transverse phasor.
        - center: The sweep centre; defaults to params.omega0.
        - key: The noise stream key prefix.
        - analytic: Whether to skip the time series.
    """
    if n_points < const.MIN_SWEEP_POINTS:
        raise ValueError(f'a sweep needs at least {const.MIN_SWEEP_POINTS} points')
    omegas = sweep_omegas(params.omega0 if center is None else center, params.gamma_fwhm,
                          n_points)
    xs, ys = np.empty(n_points), np.empty(n_points)
    for i, omega in enumerate(omegas):
        xs[i], ys[i] = measure_point(params, replace(drive, omega_rf=float(omega)), noise,
                                     b_transverse, b_ref, (*key, i), analytic)
    return SweepRecord(omegas, xs, ys)


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['functools', 'math', 'numpy', 'scipy.signal', 'emi_constants',
                          'emi_errors', 'magnetometer'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
