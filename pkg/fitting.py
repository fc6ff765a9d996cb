"""emiscan

Module containing the resonance fit: a damped Gauss-Newton (Levenberg-Marquardt) least
squares fit of the in-phase output to a Lorentzian and the quadrature output to the
matching dispersive profile, plus the radius and phase read off the fitted profiles.

The fit runs in scaled units: frequencies are centred on the sweep midpoint and divided by
the half-span, voltages divided by the largest output magnitude. Shifting the sweep or
scaling the outputs therefore leaves the iteration unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
import csv
import math

import numpy as np

from emi_errors import DegenerateSweep, ImageFormatError, UndefinedPhase
from helpers import clamp
from lockin import SweepRecord
from magnetometer import ResonanceParams, lineshape
import emi_constants as const

# Positions of the parameters in the scaled parameter vector.
OMEGA0, GAMMA, AMPLITUDE, X_OFFSET, Y_OFFSET, PHASE = range(6)


@dataclass(frozen=True)
class FitResult:
    """The outcome of fitting one sweep record.

    Instance Attributes:
        - params: The fitted resonance.
        - r_peak: The radius at the fitted centre, equal to the fitted amplitude.
        - phi_peak: The phase at the fitted centre.
        - residual_rms: The root-mean-square residual over both outputs, in volts.
        - converged: Whether the iteration met its step tolerance and the result is sane.
        - iterations: The number of iterations taken.

    Representation Invariants:
        - not self.converged or (math.isfinite(self.residual_rms)
                                 and self.params.gamma_fwhm > 0)
    """
    params: ResonanceParams
    r_peak: float
    phi_peak: float
    residual_rms: float
    converged: bool
    iterations: int

    def to_dict(self) -> dict[str, object]:
        """Returns the result as a JSON-compatible dictionary."""
        return {
            'omega0_rad_s': self.params.omega0,
            'gamma_fwhm_rad_s': self.params.gamma_fwhm,
            'amplitude_v': self.params.amplitude,
            'x_offset_v': self.params.x_offset,
            'y_offset_v': self.params.y_offset,
            'phase0_rad': self.params.phase0,
            'r_peak_v': self.r_peak,
            'phi_peak_rad': self.phi_peak,
            'residual_rms_v': self.residual_rms,
            'converged': self.converged,
            'iterations': self.iterations,
        }


def initial_guess(record: SweepRecord) -> ResonanceParams:
    """Returns starting parameters read directly off the record.

    The centre is the frequency of the largest in-phase output (the lower one on ties), the
    offsets are the medians, the amplitude is max(X) - median(X), the linewidth is the span
    of the points above half maximum (a third of the sweep when there are none), and the
    phase is that of the offset-free outputs at the centre.

    Args:
        - record: The sweep record.

    >>> omegas = np.linspace(90.0, 110.0, 41)
    >>> x, y = lineshape(ResonanceParams(100.0, 4.0, 2.0), omegas)
    >>> guess = initial_guess(SweepRecord(omegas, x, y))
    >>> guess.omega0, guess.gamma_fwhm, round(guess.amplitude, 2)
    (100.0, 3.0, 1.72)
    """
    omegas, x, y = record.omegas, record.x, record.y
    span = omegas[-1] - omegas[0]
    spacing = span / max(len(omegas) - 1, 1)

    peak = int(np.argmax(x))
    x_offset, y_offset = float(np.median(x)), float(np.median(y))
    amplitude = max(float(x[peak]) - x_offset, 0.0)

    above = np.nonzero(x - x_offset >= amplitude / 2)[0]
    width = float(omegas[above[-1]] - omegas[above[0]]) if amplitude > 0 else 0.0
    gamma = clamp(width, spacing, span) if width > 0 else span / 3

    phase = math.atan2(y[peak] - y_offset, x[peak] - x_offset) if amplitude > 0 else 0.0
    return ResonanceParams(float(omegas[peak]), gamma, amplitude, x_offset, y_offset, phase)


def _model(p: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Returns the stacked (X, Y) model and its Jacobian for scaled parameters p at scaled
    frequencies u."""
    u0, g, a, _, _, phi = p
    h = g / 2
    delta = u - u0
    den = delta ** 2 + h ** 2
    lorentz, disp = h ** 2 / den, h * delta / den
    cos, sin = math.cos(phi), math.sin(phi)

    x_shape = lorentz * cos - disp * sin
    y_shape = lorentz * sin + disp * cos
    model = np.concatenate([a * x_shape + p[X_OFFSET], a * y_shape + p[Y_OFFSET]])

    dl_du0 = 2 * h ** 2 * delta / den ** 2
    dd_du0 = h * (delta ** 2 - h ** 2) / den ** 2
    dl_dg = h * delta ** 2 / den ** 2
    dd_dg = delta * (delta ** 2 - h ** 2) / (2 * den ** 2)

    n = len(u)
    jacobian = np.zeros((2 * n, 6))
    jacobian[:n, OMEGA0] = a * (dl_du0 * cos - dd_du0 * sin)
    jacobian[n:, OMEGA0] = a * (dl_du0 * sin + dd_du0 * cos)
    jacobian[:n, GAMMA] = a * (dl_dg * cos - dd_dg * sin)
    jacobian[n:, GAMMA] = a * (dl_dg * sin + dd_dg * cos)
    jacobian[:n, AMPLITUDE] = x_shape
    jacobian[n:, AMPLITUDE] = y_shape
    jacobian[:n, X_OFFSET] = 1.0
    jacobian[n:, Y_OFFSET] = 1.0
    jacobian[:n, PHASE] = -a * y_shape
    jacobian[n:, PHASE] = a * x_shape
    return model, jacobian


def _levenberg_marquardt(p: np.ndarray, u: np.ndarray, data: np.ndarray, rows: np.ndarray,
                         free: np.ndarray) -> tuple[np.ndarray, bool, int]:
    """Returns (parameters, converged, iterations) minimising the squared residual over the
    selected rows, varying only the free parameters.

    The damping term is lambda * diag(J^T J); lambda starts at INITIAL_DAMPING and is
    divided by DAMPING_DOWN after a step that lowers the cost, multiplied by DAMPING_UP
    after one that does not.
    """
    def cost_and_jacobian(q: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        model, jacobian = _model(q, u)
        residual = (model - data)[rows]
        return float(residual @ residual), residual, jacobian[np.ix_(rows, free)]

    damping = const.INITIAL_DAMPING
    cost, residual, jacobian = cost_and_jacobian(p)
    for iteration in range(1, const.MAX_ITERATIONS + 1):
        normal = jacobian.T @ jacobian
        gradient = jacobian.T @ residual
        scale = np.diag(normal).copy()
        scale[scale <= 0] = max(float(np.max(scale)), 1.0) * 1e-12
        try:
            step = np.linalg.solve(normal + damping * np.diag(scale), -gradient)
        except np.linalg.LinAlgError:
            damping *= const.DAMPING_UP
            continue

        trial = p.copy()
        trial[free] += step
        small = np.linalg.norm(step) <= const.PARAM_TOLERANCE * (np.linalg.norm(p[free])
                                                                   + const.PARAM_TOLERANCE)
        if trial[GAMMA] > 0:
            trial_cost, trial_residual, trial_jacobian = cost_and_jacobian(trial)
            if np.isfinite(trial_cost) and trial_cost <= cost:
                p, cost, residual, jacobian = trial, trial_cost, trial_residual, trial_jacobian
                damping /= const.DAMPING_DOWN
                if small:
                    return p, True, iteration
                continue
        if small:
            return p, True, iteration
        damping *= const.DAMPING_UP
    return p, False, const.MAX_ITERATIONS


def _wrap_phase(phase: float) -> float:
    """Returns the phase wrapped into (-pi, pi]."""
    return math.pi - (math.pi - phase) % const.TWO_PI


def fit_resonance(record: SweepRecord, separate: bool = False) -> FitResult:
    """Returns the least-squares fit of the record.

    By default the Lorentzian (X) and dispersive (Y) profiles are fitted jointly with a
    shared centre, linewidth, amplitude and phase and independent offsets. When separate
    is set, X and Y are fitted on their own with the phase fixed to zero and the shared
    parameters of the two fits are averaged.

    Args:
        - record: The sweep record.
        - separate: Whether to fit the two outputs independently.
    """
    n = len(record)
    if n < const.MIN_SWEEP_POINTS:
        raise DegenerateSweep(f'a fit needs at least {const.MIN_SWEEP_POINTS} points, got {n}')
    guess = initial_guess(record)
    span = float(record.omegas[-1] - record.omegas[0])
    if span < 2 * guess.gamma_fwhm:
        raise DegenerateSweep(f'sweep span {span} rad/s is narrower than two linewidths '
                              f'({guess.gamma_fwhm} rad/s)')

    center, half_span = (record.omegas[0] + record.omegas[-1]) / 2, span / 2
    volts = max(float(np.max(np.abs(record.x))), float(np.max(np.abs(record.y))))
    volts = volts if volts > 0 else 1.0
    u = (record.omegas - center) / half_span
    data = np.concatenate([record.x, record.y]) / volts
    start = np.array([(guess.omega0 - center) / half_span, guess.gamma_fwhm / half_span,
                      guess.amplitude / volts, guess.x_offset / volts,
                      guess.y_offset / volts, guess.phase0])

    if separate:
        start[PHASE] = 0.0
        x_rows, y_rows = np.arange(n), np.arange(n, 2 * n)
        x_fit, x_ok, x_iter = _levenberg_marquardt(
            start, u, data, x_rows, np.array([OMEGA0, GAMMA, AMPLITUDE, X_OFFSET]))
        y_fit, y_ok, y_iter = _levenberg_marquardt(
            start, u, data, y_rows, np.array([OMEGA0, GAMMA, AMPLITUDE, Y_OFFSET]))
        p = (x_fit + y_fit) / 2
        p[X_OFFSET], p[Y_OFFSET] = x_fit[X_OFFSET], y_fit[Y_OFFSET]
        converged, iterations = x_ok and y_ok, max(x_iter, y_iter)
    else:
        p, converged, iterations = _levenberg_marquardt(start, u, data, np.arange(2 * n),
                                                        np.arange(6))

    model, _ = _model(p, u)
    residual_rms = float(np.sqrt(np.mean((model - data) ** 2))) * volts
    sampled_peak = float(np.max(np.hypot(model[:n] - p[X_OFFSET], model[n:] - p[Y_OFFSET])))

    amplitude, phase = float(p[AMPLITUDE]), float(p[PHASE])
    if amplitude < 0:
        amplitude, phase = -amplitude, phase + math.pi
    omega0 = center + float(p[OMEGA0]) * half_span
    gamma = abs(float(p[GAMMA])) * half_span
    values = (omega0, gamma, amplitude * volts, p[X_OFFSET] * volts, p[Y_OFFSET] * volts,
              phase, residual_rms)
    if not all(math.isfinite(value) for value in values) or omega0 <= 0:
        return FitResult(guess, math.nan, math.nan, math.nan, False, iterations)

    # A line narrower than the point spacing is only believed when the sampled points show
    # it well clear of the residual noise.
    spacing = span / (n - 1)
    significant = sampled_peak * volts > const.FIT_SIGNIFICANCE * residual_rms
    converged = converged and gamma <= 10 * span and (significant or spacing <= gamma)
    params = ResonanceParams(omega0, gamma, amplitude * volts, float(p[X_OFFSET]) * volts,
                             float(p[Y_OFFSET]) * volts, _wrap_phase(phase))
    try:
        phi_peak = r_phi(params, omega0)[1]
    except UndefinedPhase:
        phi_peak = math.nan
    return FitResult(params, params.amplitude, phi_peak, residual_rms, converged, iterations)


def r_phi(params: ResonanceParams, omega: float,
          convention: str = 'swapped') -> tuple[float, float]:
    """Returns the radius sqrt(X^2 + Y^2) and phase of the fitted profiles at omega,
    offsets excluded. The 'swapped' convention gives atan2(X, Y), the 'standard' one
    atan2(Y, X).

    Args:
        - params: The fitted resonance.
        - omega: The frequency to evaluate at.
        - convention: 'swapped' or 'standard'.

    >>> r, phi = r_phi(ResonanceParams(100.0, 4.0, 2.0), 100.0)
    >>> r, round(phi, 12) == round(math.pi / 2, 12)
    (2.0, True)
    """
    if convention not in ('swapped', 'standard'):
        raise ValueError(f"convention must be 'swapped' or 'standard', got {convention!r}")
    bare = ResonanceParams(params.omega0, params.gamma_fwhm, params.amplitude, 0.0, 0.0,
                           params.phase0)
    x, y = lineshape(bare, omega)
    x, y = float(x), float(y)
    if x == 0 and y == 0:
        raise UndefinedPhase(f'both quadratures vanish at {omega} rad/s')
    phi = math.atan2(x, y) if convention == 'swapped' else math.atan2(y, x)
    return math.hypot(x, y), phi


def load_sweep(file_path: str) -> SweepRecord:
    """Returns the sweep record stored in the csv file at file_path.

    Preconditions:
        - file_path is a valid path to a csv file with an omega_rad_s,x_v,y_v header.

    Args:
        - file_path: The path of the csv file.
    """
    with open(file_path) as csv_file:
        reader = csv.reader(csv_file)
        header = next(reader, None)
        if header is None or [name.strip() for name in header] != ['omega_rad_s', 'x_v', 'y_v']:
            raise ValueError(f'{file_path} does not start with an omega_rad_s,x_v,y_v header')
        rows = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ImageFormatError(f'{file_path}:{line}: expected 3 values, got {len(row)}')
            try:
                rows.append([float(value) for value in row])
            except ValueError:
                raise ImageFormatError(f'{file_path}:{line}: {row} is not numeric') from None

    if not rows:
        raise DegenerateSweep(f'{file_path} holds no sweep points')
    omegas, x, y = zip(*rows)
    return SweepRecord(np.array(omegas), np.array(x), np.array(y))


def save_sweep(record: SweepRecord, file_path: str) -> None:
    """Saves the sweep record as a csv file.

    Args:
        - record: The sweep record.
        - file_path: The path for the csv file.
    """
    with open(file_path, 'w+', newline='') as csv_file:
        writer = csv.writer(csv_file, delimiter=',')
        writer.writerow(['omega_rad_s', 'x_v', 'y_v'])
        writer.writerows((repr(float(w)), repr(float(x)), repr(float(y)))
                         for w, x, y in zip(record.omegas, record.x, record.y))


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['csv', 'math', 'numpy', 'emi_constants', 'emi_errors', 'helpers',
                          'lockin', 'magnetometer'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
