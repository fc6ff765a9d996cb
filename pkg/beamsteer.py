"""emiscan

Module containing the acousto-optic beam steering: the Bragg and deflection angles of an
AOD, the lens mapping from drive frequency to beam position in the cell, and the raster
plan that visits every pixel of the image.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

from emi_errors import FrequencyOutOfRange, GridExceedsSpan, OutsideCell, UnphysicalOrder
import emi_constants as const


@dataclass(frozen=True)
class AodSpec:
    """An acousto-optic deflector.

    Instance Attributes:
        - acoustic_speed: The speed of sound in the crystal, in m/s.
        - refractive_index: The refractive index of the crystal.
        - wavelength: The optical wavelength, in metres.
        - center_freq: The centre of the drive band, in Hz.
        - freq_span: The width of the drive band, in Hz.
        - rise_time: The time to settle on a new drive frequency, in seconds.

    Representation Invariants:
        - all fields are positive
        - self.freq_span <= 2 * self.center_freq
    """
    acoustic_speed: float = const.ACOUSTIC_SPEED
    refractive_index: float = const.REFRACTIVE_INDEX
    wavelength: float = const.WAVELENGTH
    center_freq: float = const.AOD_CENTER_FREQ
    freq_span: float = const.AOD_FREQ_SPAN
    rise_time: float = const.AOD_RISE_TIME

    def __post_init__(self) -> None:
        if min(self.acoustic_speed, self.refractive_index, self.wavelength,
               self.center_freq, self.freq_span, self.rise_time) <= 0:
            raise ValueError('AOD parameters must all be positive')
        if self.freq_span > 2 * self.center_freq:
            raise ValueError(f'span {self.freq_span} Hz reaches below zero frequency')

    def band(self) -> tuple[float, float]:
        """Returns the lowest and highest drive frequency of the band."""
        return self.center_freq - self.freq_span / 2, self.center_freq + self.freq_span / 2

    def in_band(self, drive_freq: float) -> bool:
        """Returns whether drive_freq lies in the band, with rounding slack."""
        low, high = self.band()
        slack = 1e-12 * self.center_freq
        return low - slack <= drive_freq <= high + slack


@dataclass(frozen=True)
class LensSpec:
    """The lens between the AODs and the cell.

    Instance Attributes:
        - focal_length: The focal length, in metres.

    Representation Invariants:
        - self.focal_length > 0
    """
    focal_length: float = const.FOCAL_LENGTH

    def __post_init__(self) -> None:
        if not self.focal_length > 0:
            raise ValueError(f'focal length must be positive, got {self.focal_length}')


@dataclass(frozen=True)
class PixelGrid:
    """A rectangular pixel array in the x-z plane. Rows run along z, columns along x,
    and pixels are numbered row-major.

    Instance Attributes:
        - n_rows: The number of rows.
        - n_cols: The number of columns.
        - step: The pixel pitch, in metres.
        - origin: The (x, z) position of pixel (0, 0).

    Representation Invariants:
        - self.n_rows >= 1 and self.n_cols >= 1
        - self.step > 0
    """
    n_rows: int = const.GRID_SIZE
    n_cols: int = const.GRID_SIZE
    step: float = const.GRID_STEP
    origin: tuple[float, float] = (-(const.GRID_SIZE - 1) * const.GRID_STEP / 2,
                                   -(const.GRID_SIZE - 1) * const.GRID_STEP / 2)

    def __post_init__(self) -> None:
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f'grid must have at least one pixel, got {self.n_rows}x{self.n_cols}')
        if not self.step > 0:
            raise ValueError(f'pixel step must be positive, got {self.step}')
        object.__setattr__(self, 'origin', (float(self.origin[0]), float(self.origin[1])))

    @classmethod
    def centered(cls, n_rows: int, n_cols: int, step: float) -> PixelGrid:
        """Returns a grid centred on the cell axis.

        >>> PixelGrid.centered(3, 3, 1.0).origin
        (-1.0, -1.0)
        """
        return cls(n_rows, n_cols, step, (-(n_cols - 1) * step / 2, -(n_rows - 1) * step / 2))

    def __len__(self) -> int:
        return self.n_rows * self.n_cols

    def shape(self) -> tuple[int, int]:
        """Returns (n_rows, n_cols)."""
        return self.n_rows, self.n_cols

    def row_col(self, index: int) -> tuple[int, int]:
        """Returns the row and column of the pixel index."""
        return divmod(index, self.n_cols)

    def position(self, index: int) -> tuple[float, float]:
        """Returns the (x, z) position of the pixel index.

        >>> PixelGrid.centered(3, 3, 1.0).position(5)
        (1.0, 0.0)
        """
        row, col = self.row_col(index)
        return self.origin[0] + col * self.step, self.origin[1] + row * self.step

    def extent(self) -> tuple[float, float, float, float]:
        """Returns (x_min, x_max, z_min, z_max) of the pixel centres."""
        x0, z0 = self.origin
        return x0, x0 + (self.n_cols - 1) * self.step, z0, z0 + (self.n_rows - 1) * self.step

    def fits_inside(self, width: float, length: float) -> bool:
        """Returns whether every pixel centre lies inside a width x length cross-section
        centred on the axis."""
        x_min, x_max, z_min, z_max = self.extent()
        return max(abs(x_min), abs(x_max)) <= width / 2 and \
            max(abs(z_min), abs(z_max)) <= length / 2


@dataclass(frozen=True)
class RasterPlan:
    """The ordered AOD drive frequencies that visit every pixel once.

    Instance Attributes:
        - entries: (pixel index, x drive frequency, z drive frequency) in visiting order.
        - steering_time_per_move: The time to move between pixels, in seconds.

    Representation Invariants:
        - [entry[0] for entry in self.entries] == list(range(len(self.entries)))
        - self.steering_time_per_move >= 0
    """
    entries: tuple[tuple[int, float, float], ...]
    steering_time_per_move: float

    def __len__(self) -> int:
        return len(self.entries)

    def total_steering_time(self) -> float:
        """Returns the steering time spent over the whole plan."""
        return len(self.entries) * self.steering_time_per_move

    def positions(self, lens: LensSpec, aod_x: AodSpec,
                  aod_z: AodSpec) -> list[tuple[float, float]]:
        """Returns the (x, z) beam position of every entry, in visiting order."""
        return [(beam_position(lens, aod_x, fx - aod_x.center_freq, math.inf),
                 beam_position(lens, aod_z, fz - aod_z.center_freq, math.inf))
                for _, fx, fz in self.entries]


def bragg_angle(aod: AodSpec, order: int, drive_freq: float) -> float:
    """Returns the Bragg angle arcsin(m lambda / (2 n L)), where L is the acoustic
    wavelength acoustic_speed / drive_freq.

    Args:
        - aod: The deflector.
        - order: The diffraction order m.
        - drive_freq: The drive frequency, in Hz.

    >>> round(bragg_angle(AodSpec(), 1, 100e6) * 1e3, 1)
    26.6
    """
    if drive_freq < 0:
        raise FrequencyOutOfRange(f'drive frequency must be non-negative, got {drive_freq}')
    argument = order * aod.wavelength * drive_freq / (2 * aod.refractive_index *
                                                      aod.acoustic_speed)
    if abs(argument) > 1:
        raise UnphysicalOrder(f'order {order} has no Bragg angle at {drive_freq} Hz')
    return math.asin(argument)


def deflection_angle(aod: AodSpec, drive_freq: float) -> float:
    """Returns the external angle lambda nu / acoustic_speed between the first and zeroth
    orders.

    Args:
        - aod: The deflector.
        - drive_freq: The drive frequency, from zero to the top of the band.

    >>> round(deflection_angle(AodSpec(), 1e6) * 1e3, 6)
    1.2
    """
    if not 0 <= drive_freq <= aod.band()[1] * (1 + 1e-12):
        raise FrequencyOutOfRange(f'drive frequency {drive_freq} Hz is outside '
                                  f'[0, {aod.band()[1]}] Hz')
    return aod.wavelength * drive_freq / aod.acoustic_speed


def position_per_hz(lens: LensSpec, aod: AodSpec) -> float:
    """Returns the beam displacement per unit change of drive frequency, f lambda / speed."""
    return lens.focal_length * aod.wavelength / aod.acoustic_speed


def beam_position(lens: LensSpec, aod: AodSpec, drive_freq_offset: float,
                  aperture: float = const.CELL_WIDTH) -> float:
    """Returns the beam position relative to the centre-frequency position.

    Args:
        - lens: The lens.
        - aod: The deflector.
        - drive_freq_offset: The drive frequency minus the AOD's centre frequency, in Hz.
        - aperture: The width of the cell the beam must stay inside, in metres.

    >>> round(beam_position(LensSpec(), AodSpec(), 1e6) * 1e3, 9)
    1.2
    """
    x = position_per_hz(lens, aod) * drive_freq_offset
    if abs(x) > aperture / 2 * (1 + 1e-12):
        raise OutsideCell(f'beam position {x} m is outside the {aperture} m wide cell')
    return x


def drive_frequency(lens: LensSpec, aod: AodSpec, position: float) -> float:
    """Returns the drive frequency that puts the beam at position, the inverse of
    beam_position.

    Args:
        - lens: The lens.
        - aod: The deflector.
        - position: The beam position relative to the centre-frequency position.
    """
    return aod.center_freq + position / position_per_hz(lens, aod)


def plan_raster(grid: PixelGrid, aod_x: AodSpec, aod_z: AodSpec,
                lens: LensSpec) -> RasterPlan:
    """Returns the row-major raster plan for the grid.

    Args:
        - grid: The pixel grid.
        - aod_x: The deflector that steers along x (columns).
        - aod_z: The deflector that steers along z (rows).
        - lens: The lens.
    """
    entries = []
    for index in range(len(grid)):
        x, z = grid.position(index)
        fx = drive_frequency(lens, aod_x, x)
        fz = drive_frequency(lens, aod_z, z)
        if not (aod_x.in_band(fx) and aod_z.in_band(fz)):
            raise GridExceedsSpan(f'pixel {index} at ({x}, {z}) m needs drive frequencies '
                                  f'({fx}, {fz}) Hz outside the AOD bands')
        entries.append((index, fx, fz))
    return RasterPlan(tuple(entries), max(aod_x.rise_time, aod_z.rise_time))


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['math', 'emi_constants', 'emi_errors'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
