"""Tests for lockin.py."""
from dataclasses import replace
import math

import numpy as np
import pytest

from emi_errors import InvalidDriveConfig, LengthMismatch, NyquistViolation
from lockin import DriveConfig, NoiseSpec, SweepRecord, demodulate, lockin_noise_sigma, \
    measure_point, run_sweep, settling_factor, sweep_omegas, synthesize
from magnetometer import ResonanceParams, lineshape
import emi_constants as const

# The 2-omega ripple that survives the low-pass, relative to the signal.
RIPPLE = 1e-3


def test_record_must_cover_five_time_constants() -> None:
    with pytest.raises(InvalidDriveConfig):
        DriveConfig(duration=4e-3, lp_time_constant=1e-3)
    DriveConfig(duration=5e-3, lp_time_constant=1e-3)


def test_filter_order_must_be_positive() -> None:
    with pytest.raises(InvalidDriveConfig):
        DriveConfig(lp_order=0)


def test_nyquist() -> None:
    drive = DriveConfig(sample_rate=200e3)
    with pytest.raises(NyquistViolation):
        synthesize(ResonanceParams(), drive)


def test_record_length_is_checked() -> None:
    drive = DriveConfig()
    with pytest.raises(LengthMismatch):
        demodulate(np.zeros(drive.n_samples() - 1), drive)


def test_settling_after_five_time_constants() -> None:
    assert math.isclose(settling_factor(DriveConfig()), 1 - math.exp(-5), rel_tol=1e-9)
    second_order = settling_factor(DriveConfig(lp_order=2))
    assert second_order < settling_factor(DriveConfig())


def test_demodulation_recovers_the_lineshape() -> None:
    params = ResonanceParams()
    for detuning in (-2.0, -0.5, 0.0, 0.3, 4.0):
        drive = DriveConfig(omega_rf=params.omega0 + detuning * params.gamma_fwhm)
        x, y = demodulate(synthesize(params, drive), drive)
        expected_x, expected_y = lineshape(params, drive.omega_rf)
        gain = settling_factor(drive)
        assert abs(x - gain * expected_x) < RIPPLE * params.amplitude
        assert abs(y - gain * expected_y) < RIPPLE * params.amplitude


def test_reference_phase_rotates_the_outputs() -> None:
    params = ResonanceParams()
    drive = DriveConfig(omega_rf=params.omega0, reference_phase=math.pi / 2)
    x, y = demodulate(synthesize(params, drive), drive)
    assert abs(x) < RIPPLE
    assert abs(y - settling_factor(drive)) < RIPPLE


def test_analytic_measurement_matches_the_time_series() -> None:
    params = ResonanceParams(amplitude=0.7, x_offset=0.02, y_offset=-0.01, phase0=0.4)
    drive = DriveConfig(omega_rf=params.omega0 + 0.8 * params.gamma_fwhm)
    noiseless = NoiseSpec(0.0)
    full = measure_point(params, drive, noiseless, 0.9 - 0.1j)
    quick = measure_point(params, drive, noiseless, 0.9 - 0.1j, analytic=True)
    np.testing.assert_allclose(full, quick, atol=RIPPLE)


def test_noise_streams_are_keyed() -> None:
    noise = NoiseSpec(0.1, seed=3)
    drive = DriveConfig()
    params = ResonanceParams()
    first = synthesize(params, drive, noise=noise, key=(4, 0, 1))
    again = synthesize(params, drive, noise=noise, key=(4, 0, 1))
    other = synthesize(params, drive, noise=noise, key=(4, 0, 2))
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)
    reseeded = synthesize(params, drive, noise=replace(noise, seed=4), key=(4, 0, 1))
    assert not np.array_equal(first, reseeded)


def test_demodulated_noise_has_the_predicted_spread() -> None:
    noise = NoiseSpec(1.0, seed=11)
    drive = DriveConfig()
    silent = ResonanceParams(amplitude=0.0)
    outputs = np.array([demodulate(synthesize(silent, drive, noise=noise, key=(k,)), drive)
                        for k in range(300)])
    predicted = lockin_noise_sigma(noise, drive)
    assert predicted > 0
    for column in outputs.T:
        assert abs(np.std(column) / predicted - 1) < 0.2
        assert abs(np.mean(column)) < 0.3 * predicted


def test_sweep_spans_five_linewidths() -> None:
    omegas = sweep_omegas(1e5, 2e3, 11)
    assert omegas[0] == 1e5 - 1e4 and omegas[-1] == 1e5 + 1e4
    assert np.allclose(np.diff(omegas), 2e3)


def test_sweep_needs_five_points() -> None:
    with pytest.raises(ValueError):
        run_sweep(ResonanceParams(), n_points=4)


def test_sweep_record() -> None:
    params = ResonanceParams()
    record = run_sweep(params, n_points=9, analytic=True)
    assert len(record) == 9
    assert record.omegas[4] == pytest.approx(params.omega0)
    assert record.x[4] == pytest.approx(settling_factor(DriveConfig()) * params.amplitude)
    assert np.all(np.diff(record.omegas) > 0)


def test_sweep_points_draw_separate_streams() -> None:
    noise = NoiseSpec(0.05, seed=2)
    params = ResonanceParams()
    record = run_sweep(params, n_points=6, noise=noise, key=(5, 0), analytic=True)
    lone = measure_point(params, DriveConfig(omega_rf=float(record.omegas[3])), noise,
                         key=(5, 0, 3), analytic=True)
    assert (record.x[3], record.y[3]) == lone


def test_sweep_record_validation() -> None:
    with pytest.raises(ValueError):
        SweepRecord([1.0, 1.0, 2.0], [0, 0, 0], [0, 0, 0])
    with pytest.raises(ValueError):
        SweepRecord([1.0, 2.0], [0, 0, 0], [0, 0])
    with pytest.raises(ValueError):
        SweepRecord([], [], [])


def test_default_constants() -> None:
    drive = DriveConfig()
    assert drive.n_samples() == round(const.SWEEP_DWELL * const.SAMPLE_RATE)
    assert drive.duration >= 5 * drive.lp_time_constant


def test_demodulation_is_linear() -> None:
    drive = DriveConfig()
    rng = np.random.default_rng(0)
    first, second = rng.normal(size=(2, drive.n_samples()))
    combined = demodulate(2.0 * first - 0.5 * second, drive)
    expected = 2.0 * np.array(demodulate(first, drive)) - 0.5 * np.array(demodulate(second, drive))
    np.testing.assert_allclose(combined, expected, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize('constants', [5, 10, 20])
def test_settling_shortfall_is_exponential(constants) -> None:
    drive = DriveConfig(duration=constants * const.LP_TIME_CONSTANT)
    assert math.isclose(1 - settling_factor(drive), math.exp(-constants), rel_tol=1e-2)


def test_longer_records_settle_closer() -> None:
    params = ResonanceParams()
    errors = []
    for constants in (5, 10, 20):
        drive = DriveConfig(duration=constants * const.LP_TIME_CONSTANT)
        x, _ = demodulate(synthesize(params, drive), drive)
        errors.append(abs(x - params.amplitude))
        assert errors[-1] < math.exp(-constants) * params.amplitude + RIPPLE
    assert errors[0] > errors[1]
    assert errors[2] < RIPPLE


def test_synthesized_noise_has_the_requested_rms() -> None:
    drive = DriveConfig(duration=0.06)
    assert drive.n_samples() >= 100_000
    signal = synthesize(ResonanceParams(amplitude=0.0), drive, noise=NoiseSpec(0.3, seed=8))
    assert abs(np.std(signal) / 0.3 - 1) < 0.05
    assert abs(np.mean(signal)) < 5 * 0.3 / math.sqrt(len(signal))
