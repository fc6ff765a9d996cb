"""emiscan

Module containing the RF atomic magnetometer response: the Larmor resonance set by the
bias field, the static bias inhomogeneity over the imaging area, the sensor voxel where
the pump and probe beams overlap, and the quadrature lineshapes read out by the lock-in.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union
import cmath
import math

import numpy as np

from emi_errors import VoxelOutsideCell
from vector import Vector3
import emi_constants as const


@dataclass(frozen=True)
class CellSpec:
    """The cuboid vapour cell. Width runs along x, length along z and height along y.

    Instance Attributes:
        - width: The extent along x, in metres.
        - length: The extent along z, in metres.
        - height: The extent along y, in metres.
        - center: The centre of the cell.
        - diffusion_length: The distance atoms diffuse during a measurement.

    Representation Invariants:
        - self.width > 0 and self.length > 0 and self.height > 0
        - self.diffusion_length > 0
    """
    width: float = const.CELL_WIDTH
    length: float = const.CELL_LENGTH
    height: float = const.CELL_HEIGHT
    center: Vector3 = const.CELL_CENTER
    diffusion_length: float = const.DIFFUSION_LENGTH

    def __post_init__(self) -> None:
        if min(self.width, self.length, self.height) <= 0:
            raise ValueError('cell dimensions must be positive')
        if not self.diffusion_length > 0:
            raise ValueError(f'diffusion length must be positive, got {self.diffusion_length}')

    def top(self) -> float:
        """Returns the y-coordinate of the cell's top face."""
        return self.center.y + self.height / 2

    def contains(self, point: Vector3) -> bool:
        """Returns whether the point lies inside the cell (faces included).

        Args:
            - point: The point to test.
        """
        offset = point - self.center
        return abs(offset.x) <= self.width / 2 and abs(offset.y) <= self.height / 2 and \
            abs(offset.z) <= self.length / 2


@dataclass(frozen=True)
class SensorVoxel:
    """The pump-probe intersection that makes up one pixel.

    Instance Attributes:
        - center: The centre of the intersection.
        - pump_diameter: The 1/e^2 diameter of the pump beam.
        - probe_diameter: The 1/e^2 diameter of the probe beam.
        - effective_radius: The radius sensed once atomic diffusion is included.

    Representation Invariants:
        - self.effective_radius >= max(self.pump_diameter, self.probe_diameter) / 4
    """
    center: Vector3
    pump_diameter: float = const.PUMP_DIAMETER
    probe_diameter: float = const.PROBE_DIAMETER
    effective_radius: float = max(const.PUMP_DIAMETER, const.PROBE_DIAMETER) / 2 \
        + const.DIFFUSION_LENGTH

    def __post_init__(self) -> None:
        if self.effective_radius < max(self.pump_diameter, self.probe_diameter) / 4:
            raise ValueError('voxel radius is smaller than the beams it stands for')

    def stencil(self) -> np.ndarray:
        """Returns the seven sample points (centre and centre +/- effective_radius along
        each axis) as an array of shape (7, 3)."""
        r = self.effective_radius
        steps = np.array([[0, 0, 0], [r, 0, 0], [-r, 0, 0], [0, r, 0],
                          [0, -r, 0], [0, 0, r], [0, 0, -r]])
        return self.center.array() + steps


def voxel_at(cell: CellSpec, x: float, z: float, plane_y: float = const.IMAGING_PLANE_Y,
             pump_diameter: float = const.PUMP_DIAMETER,
             probe_diameter: float = const.PROBE_DIAMETER) -> SensorVoxel:
    """Returns the voxel at (x, plane_y, z), blurred by the cell's diffusion length.

    Args:
        - cell: The vapour cell.
        - x: The beam position across the cell.
        - z: The beam position along the cell.
        - plane_y: The height of the imaging plane.
        - pump_diameter: The pump beam diameter.
        - probe_diameter: The probe beam diameter.
    """
    radius = max(pump_diameter, probe_diameter) / 2 + cell.diffusion_length
    return SensorVoxel(Vector3(x, plane_y, z), pump_diameter, probe_diameter, radius)


@dataclass(frozen=True)
class BiasFieldMap:
    """The stabilised bias field with its static quadratic inhomogeneity.

    The shift is sign * (r^2 / shift_radius^2) * max_shift, where r is the in-plane
    distance from the cell axis, so it vanishes at the centre and reaches max_shift at
    the corners of the imaging area.

    Instance Attributes:
        - nominal_bias: The bias at the cell centre, in tesla.
        - max_shift: The resonance shift at shift_radius, in rad/s.
        - shift_radius: The distance from the centre to the imaging-area corner.
        - sign: +1 or -1, the direction of the shift.
        - center: The point where the shift vanishes.

    Representation Invariants:
        - self.nominal_bias >= 0
        - self.max_shift >= 0
        - self.shift_radius > 0
        - self.sign in {-1, 1}
    """
    nominal_bias: float = const.NOMINAL_BIAS
    max_shift: float = const.MAX_BIAS_SHIFT
    shift_radius: float = const.SHIFT_RADIUS
    sign: int = const.SHIFT_SIGN
    center: Vector3 = const.CELL_CENTER

    def __post_init__(self) -> None:
        if self.nominal_bias < 0 or self.max_shift < 0 or self.shift_radius <= 0:
            raise ValueError('bias map needs a non-negative bias and shift, positive radius')
        if self.sign not in (-1, 1):
            raise ValueError(f'shift sign must be +1 or -1, got {self.sign}')

    def shift(self, point: Vector3) -> float:
        """Returns the resonance shift at the point, in rad/s.

        Args:
            - point: The point in the cell.
        """
        offset = point - self.center
        ratio = (offset.x ** 2 + offset.z ** 2) / self.shift_radius ** 2
        return self.sign * ratio * self.max_shift


@dataclass(frozen=True)
class AmplitudeProfile:
    """The Gaussian falloff of the resonance amplitude away from the cell axis.

    Instance Attributes:
        - corner_ratio: The amplitude at radius, relative to the centre.
        - radius: The distance at which corner_ratio applies.
        - center: The point of maximum amplitude.

    Representation Invariants:
        - 0 < self.corner_ratio <= 1
        - self.radius > 0
    """
    corner_ratio: float = const.CORNER_AMPLITUDE_RATIO
    radius: float = const.SHIFT_RADIUS
    center: Vector3 = const.CELL_CENTER

    def __post_init__(self) -> None:
        if not 0 < self.corner_ratio <= 1:
            raise ValueError(f'corner ratio must be in (0, 1], got {self.corner_ratio}')
        if not self.radius > 0:
            raise ValueError(f'profile radius must be positive, got {self.radius}')

    def factor(self, point: Vector3) -> float:
        """Returns the relative amplitude at the point.

        Args:
            - point: The point in the cell.

        >>> round(AmplitudeProfile(0.55, 1.0).factor(Vector3(1.0, 0.0, 0.0)), 12)
        0.55
        """
        offset = point - self.center
        ratio = (offset.x ** 2 + offset.z ** 2) / self.radius ** 2
        return self.corner_ratio ** ratio


@dataclass(frozen=True)
class ResonanceParams:
    """The resonance seen at one pixel.

    Instance Attributes:
        - omega0: The resonance centre, in rad/s.
        - gamma_fwhm: The full width at half maximum, in rad/s.
        - amplitude: The on-resonance signal for the reference drive, in volts.
        - x_offset: The baseline of the in-phase output, in volts.
        - y_offset: The baseline of the quadrature output, in volts.
        - phase0: The lock-in phase of the resonance, in radians.

    Representation Invariants:
        - self.gamma_fwhm > 0
        - self.amplitude >= 0
    """
    omega0: float = const.LARMOR_OMEGA
    gamma_fwhm: float = const.LINEWIDTH
    amplitude: float = const.PIXEL_AMPLITUDE
    x_offset: float = 0.0
    y_offset: float = 0.0
    phase0: float = 0.0

    def __post_init__(self) -> None:
        if not self.gamma_fwhm > 0:
            raise ValueError(f'linewidth must be positive, got {self.gamma_fwhm}')
        if not self.amplitude >= 0:
            raise ValueError(f'amplitude must be non-negative, got {self.amplitude}')


def larmor_frequency(bias: float) -> float:
    """Returns the Larmor angular frequency for the bias field, using the fixed slope
    2 pi x 0.70 MHz/G.

    Args:
        - bias: The bias field, in tesla.

    >>> round(larmor_frequency(1.5e-5) / (2 * math.pi))
    105000
    """
    if bias < 0:
        raise ValueError(f'bias must be non-negative, got {bias}')
    return const.GYROMAGNETIC_SLOPE * bias


def resonance_at(voxel: SensorVoxel, bias_map: BiasFieldMap, pixel_amplitude: float,
                 cell: CellSpec = CellSpec(),
                 profile: AmplitudeProfile = AmplitudeProfile()) -> ResonanceParams:
    """Returns the resonance of the voxel: the nominal Larmor frequency shifted by the
    bias map, the fixed linewidth, and the pixel amplitude scaled by the profile.

    Args:
        - voxel: The sensor voxel.
        - bias_map: The bias field and its inhomogeneity.
        - pixel_amplitude: The amplitude at the cell centre, in volts.
        - cell: The vapour cell the voxel must lie in.
        - profile: The spatial amplitude falloff.
    """
    if not cell.contains(voxel.center):
        raise VoxelOutsideCell(f'voxel at {voxel.center} is outside the cell')
    omega0 = larmor_frequency(bias_map.nominal_bias) + bias_map.shift(voxel.center)
    return ResonanceParams(omega0, const.LINEWIDTH, pixel_amplitude * profile.factor(voxel.center))


Number = Union[float, np.ndarray]


def lineshape(params: ResonanceParams, omega_rf: Number, b_transverse: complex = 1.0,
              b_ref: complex = 1.0) -> tuple[Number, Number]:
    """Returns the lock-in outputs (X, Y) at the drive frequency.

    With delta = omega_rf - omega0 and h = gamma_fwhm / 2, the absorptive part is
    A h^2 / (delta^2 + h^2) and the dispersive part A h delta / (delta^2 + h^2), where
    A = amplitude |b_transverse| / |b_ref|. The pair is rotated by phase0 plus the phase
    of b_transverse relative to b_ref, then the offsets are added.

    Args:
        - params: The resonance.
        - omega_rf: The drive frequency, scalar or array.
        - b_transverse: The local transverse RF phasor.
        - b_ref: The no-target transverse phasor at the same pixel.

    >>> x, y = lineshape(ResonanceParams(omega0=1.0, gamma_fwhm=0.2, amplitude=2.0), 1.0)
    >>> float(x), float(y)
    (2.0, 0.0)
    """
    if np.any(np.asarray(omega_rf) <= 0):
        raise ValueError('drive frequency must be positive')
    ratio = complex(b_transverse) / complex(b_ref)
    amplitude = params.amplitude * abs(ratio)
    phase = params.phase0 + cmath.phase(ratio)

    absorptive, dispersive = _profiles(omega_rf, params.omega0, params.gamma_fwhm)
    cos, sin = math.cos(phase), math.sin(phase)
    x = amplitude * (absorptive * cos - dispersive * sin) + params.x_offset
    y = amplitude * (absorptive * sin + dispersive * cos) + params.y_offset
    return x, y


def _profiles(omega: Number, omega0: float, gamma: float) -> tuple[Number, Number]:
    """Returns the unit-height Lorentzian and dispersive profiles."""
    delta = np.asarray(omega, dtype=float) - omega0
    half = gamma / 2
    denominator = delta ** 2 + half ** 2
    return half ** 2 / denominator, half * delta / denominator


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['cmath', 'math', 'numpy', 'emi_constants', 'emi_errors', 'vector'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
