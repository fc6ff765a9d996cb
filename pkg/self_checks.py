"""emiscan

Module containing the self checks run by the verify command. Each check evaluates a
reference number of the instrument (beam steering rate, skin depth, resonance placement,
lineshape identities) from the simulator's own functions, with no scenario input.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping
import math
import os

import numpy as np
from scipy.optimize import brentq

from beamsteer import AodSpec, LensSpec, beam_position, bragg_angle, deflection_angle
from fields import Material, skin_depth
from fitting import fit_resonance, r_phi
from lockin import SweepRecord, sweep_omegas
from magnetometer import BiasFieldMap, ResonanceParams, larmor_frequency, lineshape
from scenario import acoustic_speed_default
from vector import Vector3
import emi_constants as const


@dataclass(frozen=True)
class CheckResult:
    """The outcome of one self check.

    Instance Attributes:
        - name: A short identifier.
        - passed: Whether the value met the expectation.
        - value: The evaluated value.
        - expected: A description of what was required.
    """
    name: str
    passed: bool
    value: float
    expected: str

    def to_dict(self) -> dict[str, object]:
        """Returns the result as a JSON-compatible dictionary."""
        return {'name': self.name, 'passed': bool(self.passed),
                'value': self.value if math.isfinite(self.value) else None,
                'expected': self.expected}


def check_mm_per_mhz(aod: AodSpec) -> list[CheckResult]:
    """Returns the beam steering rate and full-span checks."""
    lens = LensSpec()
    rate = beam_position(lens, aod, 1e6, math.inf) * 1e3
    span = beam_position(lens, aod, 50e6, math.inf) * 1e3
    return [CheckResult('mm_per_mhz', abs(rate - 1.2) <= 1.2e-3, rate, '1.2 mm/MHz within 0.1%'),
            CheckResult('full_span_mm', abs(span - 60.0) <= 0.1, span, '60.0 +/- 0.1 mm')]


def check_small_angle(aod: AodSpec) -> CheckResult:
    """Returns the check that twice the Bragg angle times n matches the deflection."""
    deflection = deflection_angle(aod, aod.center_freq)
    bragg = 2 * bragg_angle(aod, 1, aod.center_freq) * aod.refractive_index
    error = abs(bragg - deflection) / deflection
    return CheckResult('bragg_small_angle', error < 0.01, error, 'relative error < 1%')


def check_skin_depth() -> list[CheckResult]:
    """Returns the copper skin depth and its sensitivity to the bias spread."""
    copper = Material()
    nominal = skin_depth(copper, const.DRIVE_OMEGA)
    spread = max(abs(skin_depth(copper, const.DRIVE_OMEGA + shift) - nominal) / nominal
                 for shift in (-const.MAX_BIAS_SHIFT, const.MAX_BIAS_SHIFT))
    return [CheckResult('skin_depth_um', 200 <= nominal * 1e6 <= 202, nominal * 1e6,
                        'between 200 and 202 um'),
            CheckResult('skin_depth_spread', spread < 0.02, spread, 'relative change < 2%')]


def check_resonance_placement() -> list[CheckResult]:
    """Returns the Larmor frequency at 150 mG and the corner shift bound."""
    omega = larmor_frequency(150e-7)
    target = const.TWO_PI * 105e3
    half = const.IMAGING_AREA_SIDE / 2
    corner = abs(BiasFieldMap().shift(Vector3(half, 0.0, half)))
    return [CheckResult('larmor_150mg_khz', math.isclose(omega, target, rel_tol=1e-12),
                        omega / const.TWO_PI / 1e3, '105 kHz'),
            CheckResult('corner_shift_khz', corner <= const.MAX_BIAS_SHIFT * (1 + 1e-12),
                        corner / const.TWO_PI / 1e3, 'at most 2 kHz')]


def check_lineshape() -> list[CheckResult]:
    """Returns the half-maximum width, on-resonance quadrature and radius symmetry."""
    params = ResonanceParams(y_offset=0.25)
    omega0, gamma = params.omega0, params.gamma_fwhm

    def above_half(omega: float) -> float:
        x, _ = lineshape(params, omega)
        return float(x) - params.x_offset - params.amplitude / 2

    upper = brentq(above_half, omega0, omega0 + 5 * gamma, xtol=1e-12, rtol=1e-15)
    lower = brentq(above_half, omega0 - 5 * gamma, omega0, xtol=1e-12, rtol=1e-15)
    width_error = abs((upper - lower) - gamma) / gamma

    _, y_peak = lineshape(params, omega0)
    deltas = np.linspace(0.1, 5, 50) * gamma
    asymmetry = max(abs(r_phi(params, omega0 + d)[0] - r_phi(params, omega0 - d)[0])
                    for d in deltas)
    return [CheckResult('fwhm_width', width_error < 1e-9, width_error,
                        'half-maximum separation equals the linewidth to 1e-9'),
            CheckResult('on_resonance_quadrature', abs(float(y_peak) - 0.25) < 1e-12,
                        float(y_peak), 'Y equals the quadrature offset'),
            CheckResult('radius_symmetry', asymmetry < 1e-10, asymmetry,
                        'R(w0 + d) equals R(w0 - d)')]


def check_fit_recovery() -> CheckResult:
    """Returns the recovery of a noiseless synthetic sweep."""
    params = ResonanceParams(amplitude=1.0, x_offset=0.01, y_offset=-0.02)
    omegas = sweep_omegas(params.omega0 + 0.3 * params.gamma_fwhm, params.gamma_fwhm)
    x, y = lineshape(params, omegas)
    fit = fit_resonance(SweepRecord(omegas, x, y))
    error = abs(fit.params.omega0 - params.omega0) / params.gamma_fwhm
    return CheckResult('noiseless_fit', fit.converged and error < 1e-6, error,
                       'centre recovered within 1e-6 linewidths')


def run_checks(environ: Mapping[str, str] = os.environ) -> list[CheckResult]:
    """Returns the results of every self check.

    Args:
        - environ: The environment consulted for the acoustic speed override.
    """
    aod = AodSpec(acoustic_speed=acoustic_speed_default(environ))
    return [*check_mm_per_mhz(aod), check_small_angle(aod), *check_skin_depth(),
            *check_resonance_placement(), *check_lineshape(), check_fit_recovery()]


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['math', 'os', 'numpy', 'scipy.optimize', 'beamsteer',
                          'emi_constants', 'fields', 'fitting', 'lockin', 'magnetometer',
                          'scenario', 'vector'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
