"""Tests for magnetometer.py."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats
from scipy.optimize import brentq

from emi_errors import VoxelOutsideCell
from fitting import r_phi
from magnetometer import AmplitudeProfile, BiasFieldMap, CellSpec, ResonanceParams, \
    larmor_frequency, lineshape, resonance_at, voxel_at
from vector import Vector3
import emi_constants as const

GAMMA = const.LINEWIDTH


def test_larmor_at_150_milligauss() -> None:
    assert math.isclose(larmor_frequency(150e-7), 2 * math.pi * 105e3, rel_tol=1e-12)


@given(floats(0, 1e-3), floats(0, 1e-3))
def test_larmor_is_linear(a, b) -> None:
    assert math.isclose(larmor_frequency(a + b), larmor_frequency(a) + larmor_frequency(b),
                        rel_tol=1e-12, abs_tol=1e-9)


def test_negative_bias() -> None:
    with pytest.raises(ValueError):
        larmor_frequency(-1e-6)


def test_bias_shift_is_bounded_over_the_imaging_area() -> None:
    bias = BiasFieldMap()
    half = const.IMAGING_AREA_SIDE / 2
    assert bias.shift(Vector3(0.0, 0.0, 0.0)) == 0.0
    assert math.isclose(abs(bias.shift(Vector3(half, 0.0, -half))), const.MAX_BIAS_SHIFT)
    for x in np.linspace(-half, half, 9):
        for z in np.linspace(-half, half, 9):
            assert abs(bias.shift(Vector3(x, 0.0, z))) <= const.MAX_BIAS_SHIFT * (1 + 1e-12)


def test_voxel_includes_diffusion() -> None:
    voxel = voxel_at(CellSpec(), 0.0, 0.0)
    assert math.isclose(voxel.effective_radius,
                        const.PUMP_DIAMETER / 2 + const.DIFFUSION_LENGTH)
    assert voxel.stencil().shape == (7, 3)
    np.testing.assert_allclose(voxel.stencil().mean(axis=0), voxel.center.array(), atol=1e-15)


def test_voxel_outside_the_cell() -> None:
    voxel = voxel_at(CellSpec(), 0.031, 0.0)
    with pytest.raises(VoxelOutsideCell):
        resonance_at(voxel, BiasFieldMap(), 1.0)


def test_resonance_at_the_centre() -> None:
    params = resonance_at(voxel_at(CellSpec(), 0.0, 0.0), BiasFieldMap(), 0.8)
    assert math.isclose(params.omega0, const.LARMOR_OMEGA)
    assert params.gamma_fwhm == GAMMA
    assert math.isclose(params.amplitude, 0.8)


def test_amplitude_profile_at_the_corner() -> None:
    profile = AmplitudeProfile()
    half = const.IMAGING_AREA_SIDE / 2
    assert math.isclose(profile.factor(Vector3(half, 0.0, half)), const.CORNER_AMPLITUDE_RATIO)


def test_half_maximum_separation_is_the_linewidth() -> None:
    params = ResonanceParams(x_offset=0.1)

    def above_half(omega: float) -> float:
        return float(lineshape(params, omega)[0]) - 0.1 - params.amplitude / 2

    omega0 = params.omega0
    upper = brentq(above_half, omega0, omega0 + 5 * GAMMA, xtol=1e-12, rtol=1e-15)
    lower = brentq(above_half, omega0 - 5 * GAMMA, omega0, xtol=1e-12, rtol=1e-15)
    assert abs((upper - lower) - GAMMA) / GAMMA < 1e-9


def test_on_resonance_quadrature_is_the_offset() -> None:
    params = ResonanceParams(y_offset=-0.3)
    assert math.isclose(float(lineshape(params, params.omega0)[1]), -0.3, abs_tol=1e-15)


@given(floats(0.01, 10.0))
def test_radius_is_symmetric(detuning) -> None:
    params = ResonanceParams()
    delta = detuning * GAMMA
    above = r_phi(params, params.omega0 + delta)[0]
    below = r_phi(params, params.omega0 - delta)[0]
    assert math.isclose(above, below, rel_tol=1e-10)


@given(floats(0.0, 10.0))
def test_radius_is_a_lorentzian_root(detuning) -> None:
    params = ResonanceParams(amplitude=2.0)
    delta = detuning * GAMMA
    r = r_phi(params, params.omega0 + delta)[0]
    half = GAMMA / 2
    assert math.isclose(r, 2.0 * half / math.sqrt(delta ** 2 + half ** 2), rel_tol=1e-10)


def test_transverse_field_scales_and_rotates() -> None:
    params = ResonanceParams()
    x, y = lineshape(params, params.omega0, b_transverse=0.5j, b_ref=1.0)
    assert math.isclose(float(x), 0.0, abs_tol=1e-15)
    assert math.isclose(float(y), 0.5)


def test_lineshape_rejects_non_positive_frequency() -> None:
    with pytest.raises(ValueError):
        lineshape(ResonanceParams(), 0.0)


@given(floats(0.01, 10.0))
def test_absorptive_is_even_and_dispersive_odd(detuning) -> None:
    params = ResonanceParams(amplitude=1.3)
    delta = detuning * GAMMA
    x_above, y_above = lineshape(params, params.omega0 + delta)
    x_below, y_below = lineshape(params, params.omega0 - delta)
    assert math.isclose(float(x_above), float(x_below), rel_tol=1e-9)
    assert math.isclose(float(y_above), -float(y_below), rel_tol=1e-9)
    assert float(y_above) > 0


@given(floats(-10.0, 10.0))
def test_outputs_trace_a_circle(detuning) -> None:
    amplitude = 0.8
    params = ResonanceParams(amplitude=amplitude)
    x, y = lineshape(params, params.omega0 + detuning * GAMMA)
    radius_sq = (float(x) - amplitude / 2) ** 2 + float(y) ** 2
    assert math.isclose(radius_sq, (amplitude / 2) ** 2, rel_tol=1e-9)
