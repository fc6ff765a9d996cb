"""Tests for fitting.py."""
import math

import numpy as np
import pytest

from emi_errors import DegenerateSweep, ImageFormatError, UndefinedPhase
from fitting import fit_resonance, initial_guess, load_sweep, r_phi, save_sweep
from lockin import DriveConfig, NoiseSpec, SweepRecord, lockin_noise_sigma, run_sweep, \
    settling_factor, sweep_omegas
from magnetometer import ResonanceParams, lineshape

TRUE = ResonanceParams(amplitude=0.8, x_offset=0.01, y_offset=-0.015, phase0=0.2)
GAMMA = TRUE.gamma_fwhm


def noiseless_record(params: ResonanceParams = TRUE, n_points: int = 50,
                     half_span: float = 5.0, offset: float = 0.3) -> SweepRecord:
    omegas = sweep_omegas(params.omega0 + offset * params.gamma_fwhm, params.gamma_fwhm,
                          n_points, half_span)
    x, y = lineshape(params, omegas)
    return SweepRecord(omegas, x, y)


def test_noiseless_recovery() -> None:
    fit = fit_resonance(noiseless_record())
    assert fit.converged
    assert abs(fit.params.omega0 - TRUE.omega0) < 1e-6 * GAMMA
    assert math.isclose(fit.params.gamma_fwhm, GAMMA, rel_tol=1e-6)
    assert math.isclose(fit.params.amplitude, TRUE.amplitude, rel_tol=1e-6)
    assert math.isclose(fit.params.phase0, TRUE.phase0, abs_tol=1e-6)
    assert math.isclose(fit.params.x_offset, TRUE.x_offset, abs_tol=1e-8)
    assert fit.r_peak == fit.params.amplitude
    assert fit.residual_rms < 1e-10 * TRUE.amplitude


def test_minimal_sweep_converges() -> None:
    record = noiseless_record(n_points=5, half_span=1.5, offset=0.0)
    fit = fit_resonance(record)
    assert fit.converged
    assert abs(fit.params.omega0 - TRUE.omega0) < 1e-6 * GAMMA


def test_coarse_sweep_with_a_clear_peak_converges() -> None:
    # Five points over +/- 5 linewidths are spaced wider than the line itself.
    params = ResonanceParams()
    record = run_sweep(params, n_points=5, noise=NoiseSpec(0.0), analytic=True)
    assert record.omegas[1] - record.omegas[0] > params.gamma_fwhm
    fit = fit_resonance(record)
    assert fit.converged
    assert abs(fit.params.omega0 - params.omega0) < 1e-3 * params.gamma_fwhm


def test_separate_fits_agree_with_the_joint_fit() -> None:
    params = ResonanceParams(amplitude=0.5, x_offset=0.02, y_offset=0.01)
    record = noiseless_record(params)
    joint = fit_resonance(record)
    separate = fit_resonance(record, separate=True)
    assert separate.converged
    assert abs(separate.params.omega0 - joint.params.omega0) < 1e-6 * GAMMA
    assert math.isclose(separate.params.gamma_fwhm, joint.params.gamma_fwhm, rel_tol=1e-6)
    assert math.isclose(separate.params.y_offset, 0.01, abs_tol=1e-8)


def test_too_few_points() -> None:
    with pytest.raises(DegenerateSweep):
        fit_resonance(noiseless_record(n_points=4))


def test_sweep_narrower_than_two_linewidths() -> None:
    # The half-maximum points sit 6 apart on a sweep spanning 9.
    omegas = np.linspace(1.0, 10.0, 10)
    x = np.array([0, 1, 0.1, 0.1, 0.1, 0.1, 0.1, 1, 0, 0])
    with pytest.raises(DegenerateSweep):
        fit_resonance(SweepRecord(omegas, x, np.zeros(10)))


def test_shifting_the_sweep_shifts_the_centre() -> None:
    record = run_sweep(TRUE, noise=NoiseSpec(0.02, seed=5), analytic=True)
    shift = 2 * math.pi * 3e3
    moved = SweepRecord(record.omegas + shift, record.x, record.y)
    base, shifted = fit_resonance(record), fit_resonance(moved)
    assert math.isclose(shifted.params.omega0, base.params.omega0 + shift, rel_tol=1e-9)
    assert math.isclose(shifted.params.gamma_fwhm, base.params.gamma_fwhm, rel_tol=1e-6)


def test_scaling_the_outputs_scales_the_amplitude() -> None:
    record = run_sweep(TRUE, noise=NoiseSpec(0.02, seed=6), analytic=True)
    scaled = SweepRecord(record.omegas, 3 * record.x, 3 * record.y)
    base, tripled = fit_resonance(record), fit_resonance(scaled)
    assert math.isclose(tripled.params.amplitude, 3 * base.params.amplitude, rel_tol=1e-6)
    assert math.isclose(tripled.params.omega0, base.params.omega0, rel_tol=1e-9)
    assert math.isclose(tripled.params.gamma_fwhm, base.params.gamma_fwhm, rel_tol=1e-6)


def test_noisy_sweeps_recover_the_centre() -> None:
    """One hundred seeded sweeps with a peak-to-noise ratio of 50 on the lock-in outputs."""
    params = ResonanceParams(amplitude=1.0)
    drive = DriveConfig()
    peak = settling_factor(drive) * params.amplitude
    rms = peak / 50 / lockin_noise_sigma(NoiseSpec(1.0), drive)
    errors, amplitudes = [], []
    for trial in range(100):
        record = run_sweep(params, drive, 800, NoiseSpec(rms, seed=1000 + trial),
                           analytic=True)
        fit = fit_resonance(record)
        assert fit.converged
        errors.append((fit.params.omega0 - params.omega0) / params.gamma_fwhm)
        amplitudes.append(fit.params.amplitude / peak)
    errors = np.array(errors)
    assert np.max(np.abs(errors)) < 0.01
    assert abs(np.mean(errors)) < 0.003
    assert np.max(np.abs(np.array(amplitudes) - 1)) < 0.02


def test_pure_noise_never_reports_a_narrow_line() -> None:
    record = run_sweep(ResonanceParams(amplitude=0.0), noise=NoiseSpec(0.5, seed=9),
                       analytic=True)
    spacing = record.omegas[1] - record.omegas[0]
    try:
        fit = fit_resonance(record)
    except DegenerateSweep:
        return
    assert not fit.converged or fit.params.gamma_fwhm >= spacing


def test_initial_guess_on_a_clean_record() -> None:
    record = noiseless_record()
    guess = initial_guess(record)
    assert abs(guess.omega0 - TRUE.omega0) <= record.omegas[1] - record.omegas[0]


def test_initial_guess_tie_takes_the_lower_frequency() -> None:
    omegas = np.linspace(1.0, 9.0, 9)
    x = np.array([0, 0, 1, 0, 0, 0, 1, 0, 0], dtype=float)
    guess = initial_guess(SweepRecord(omegas, x, np.zeros(9)))
    assert guess.omega0 == 3.0


def test_initial_guess_of_a_flat_record() -> None:
    omegas = np.linspace(0.0, 9.0, 10) + 1.0
    guess = initial_guess(SweepRecord(omegas, np.full(10, 0.2), np.zeros(10)))
    assert guess.amplitude == 0.0
    assert guess.gamma_fwhm == pytest.approx(3.0)


def test_radius_and_phase() -> None:
    params = ResonanceParams(amplitude=2.0, x_offset=5.0)
    r, phi = r_phi(params, params.omega0)
    assert r == pytest.approx(2.0)
    assert phi == pytest.approx(math.pi / 2)
    _, standard = r_phi(params, params.omega0, 'standard')
    assert standard == pytest.approx(0.0)
    far, _ = r_phi(params, params.omega0 + 1e4 * params.gamma_fwhm)
    assert far < 1e-3


def test_radius_matches_the_closed_form() -> None:
    params = ResonanceParams(amplitude=1.5, phase0=0.7)
    half = params.gamma_fwhm / 2
    for delta in np.linspace(-8, 8, 33) * params.gamma_fwhm:
        r, _ = r_phi(params, params.omega0 + delta)
        assert math.isclose(r, 1.5 * half / math.sqrt(delta ** 2 + half ** 2), rel_tol=1e-12)


def test_phase_of_a_silent_resonance() -> None:
    with pytest.raises(UndefinedPhase):
        r_phi(ResonanceParams(amplitude=0.0), 1e5)


def test_unknown_convention() -> None:
    with pytest.raises(ValueError):
        r_phi(TRUE, TRUE.omega0, 'degrees')


def test_sweep_file(tmp_path) -> None:
    record = noiseless_record(n_points=7)
    path = str(tmp_path / 'sweep.csv')
    save_sweep(record, path)
    loaded = load_sweep(path)
    assert np.array_equal(loaded.omegas, record.omegas)
    assert np.array_equal(loaded.x, record.x)
    assert np.array_equal(loaded.y, record.y)


def test_sweep_file_without_header(tmp_path) -> None:
    path = tmp_path / 'sweep.csv'
    path.write_text('1,2,3\n4,5,6\n')
    with pytest.raises(ValueError):
        load_sweep(str(path))


def test_empty_sweep_file(tmp_path) -> None:
    path = tmp_path / 'sweep.csv'
    path.write_text('omega_rad_s,x_v,y_v\n')
    with pytest.raises(DegenerateSweep):
        load_sweep(str(path))


@pytest.mark.parametrize('rows', ['1,2,3\n4,5\n', '1,2,3\n4,5,6,7\n', '1,2,3\n4,x,6\n'])
def test_malformed_sweep_rows(tmp_path, rows) -> None:
    path = tmp_path / 'sweep.csv'
    path.write_text('omega_rad_s,x_v,y_v\n' + rows)
    with pytest.raises(ImageFormatError, match=':3:'):
        load_sweep(str(path))
