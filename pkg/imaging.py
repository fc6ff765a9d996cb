"""emiscan

Module containing the scan orchestration: the scenario of one imaging run, the raster scan
that turns every pixel into a fitted (or single-point) resonance radius, the background
normalisation and smoothing of the resulting images, and the pixel timing budget.

Pixels are independent. Each draws its noise from the stream (seed, pixel, mode, point),
so a scan gives the same image whether it runs serially or on many threads.

The magnetometer is treated as a single-axis sensor. Each pixel sees only the component of
the total RF field along the coil axis (y), averaged over the voxel. The x and z components
of the eddy field near plate edges are dropped, so edge contrast is approximate there.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Union
import logging
import math

import numpy as np
from scipy import ndimage

from beamsteer import AodSpec, LensSpec, PixelGrid, RasterPlan, beam_position, plan_raster
from emi_errors import DegenerateSweep, GridMismatch, ScenarioError
from fields import CoilSpec, EddyMesh, TargetPlate, coil_field_array, default_plate, induce, \
    mesh_plate, total_rf_field_array
from fitting import fit_resonance
from helpers import distance_to_edges, points_in_polygon
from lockin import DriveConfig, NoiseSpec, measure_point, run_sweep
from magnetometer import AmplitudeProfile, BiasFieldMap, CellSpec, larmor_frequency, \
    resonance_at, voxel_at
import emi_constants as const

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FullSweep:
    """Acquire a full sweep at every pixel and fit it.

    Instance Attributes:
        - n_points: The number of sweep points per pixel.
    """
    n_points: int = const.SWEEP_POINTS
    name: str = field(default='full', init=False)

    def __post_init__(self) -> None:
        if self.n_points < const.MIN_SWEEP_POINTS:
            raise ScenarioError(f'a sweep needs at least {const.MIN_SWEEP_POINTS} points, '
                                f'got {self.n_points}')


@dataclass(frozen=True)
class FastSinglePoint:
    """Measure once per pixel at a predetermined resonance frequency.

    Instance Attributes:
        - omega_table: The drive frequency of every pixel, row-major, in rad/s.
        - dwell: The measurement time per pixel, in seconds.
    """
    omega_table: tuple[float, ...]
    dwell: float = const.FAST_DWELL
    name: str = field(default='fast', init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'omega_table', tuple(float(w) for w in self.omega_table))
        if not all(math.isfinite(w) and w > 0 for w in self.omega_table):
            raise ScenarioError('omega table entries must be finite and positive')
        if not self.dwell > 0:
            raise ScenarioError(f'dwell must be positive, got {self.dwell}')


ScanMode = Union[FullSweep, FastSinglePoint]


@dataclass(frozen=True)
class ScanScenario:
    """Everything that defines one imaging run.

    Instance Attributes:
        - cell: The vapour cell.
        - coil: The RF coil.
        - bias: The bias field and its inhomogeneity.
        - targets: The conductive plates between the coil and the cell.
        - grid: The pixel grid.
        - aods: The x and z deflectors.
        - lens: The lens after the deflectors.
        - drive: The template drive; frequency and duration are set per measurement.
        - noise: The polarimeter noise.
        - mode: FullSweep or FastSinglePoint.
        - control_latency: The control time per pixel, in seconds.
        - plane_y: The height of the imaging plane.
        - pixel_amplitude: The resonance amplitude at the cell centre, in volts.
        - profile: The spatial amplitude falloff.
        - mesh_pitch: The eddy mesh quadrature pitch.
        - analytic: Whether to skip the lock-in time series.

    Representation Invariants:
        - self.grid fits inside the cell cross-section
        - self.coil.center.y > self.cell.top()
        - every target lies strictly between the cell top and the coil
        - a FastSinglePoint omega table has one entry per pixel
    """
    cell: CellSpec = CellSpec()
    coil: CoilSpec = CoilSpec()
    bias: BiasFieldMap = BiasFieldMap()
    targets: tuple[TargetPlate, ...] = ()
    grid: PixelGrid = PixelGrid()
    aods: tuple[AodSpec, AodSpec] = (AodSpec(), AodSpec())
    lens: LensSpec = LensSpec()
    drive: DriveConfig = DriveConfig()
    noise: NoiseSpec = NoiseSpec()
    mode: ScanMode = FullSweep()
    control_latency: float = const.SOFTWARE_CONTROL_LATENCY
    plane_y: float = const.IMAGING_PLANE_Y
    pixel_amplitude: float = const.PIXEL_AMPLITUDE
    profile: AmplitudeProfile = AmplitudeProfile()
    mesh_pitch: float = const.DEFAULT_MESH_PITCH
    analytic: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, 'targets', tuple(self.targets))
        object.__setattr__(self, 'aods', tuple(self.aods))
        if len(self.aods) != 2:
            raise ScenarioError(f'a scan needs two deflectors, got {len(self.aods)}')
        if not self.grid.fits_inside(self.cell.width, self.cell.length):
            raise ScenarioError(f'{self.grid.n_rows}x{self.grid.n_cols} grid at '
                                f'{self.grid.step} m does not fit the cell')
        if not self.coil.center.y > self.cell.top():
            raise ScenarioError('coil must sit above the cell')
        for plate in self.targets:
            if not self.cell.top() < plate.height_y < self.coil.center.y:
                raise ScenarioError(f'plate {plate.name!r} at y = {plate.height_y} m is not '
                                    f'between the cell and the coil')
        if isinstance(self.mode, FastSinglePoint) and \
                len(self.mode.omega_table) != len(self.grid):
            raise ScenarioError(f'omega table has {len(self.mode.omega_table)} entries for '
                                f'{len(self.grid)} pixels')
        if self.control_latency < 0:
            raise ScenarioError(f'control latency must be non-negative, got '
                                f'{self.control_latency}')

    def mode_code(self) -> int:
        """Returns the integer naming the mode in noise stream keys."""
        return const.MODE_CODES[self.mode.name]

    def background(self) -> ScanScenario:
        """Returns the same scenario without targets, acquired as a full sweep."""
        n_points = const.SWEEP_POINTS
        if isinstance(self.mode, FullSweep):
            n_points = self.mode.n_points
        return replace(self, targets=(), mode=FullSweep(n_points))


@dataclass(eq=False)
class EmiImage:
    """Per-pixel results of one scan. Every channel is an array of shape grid.shape().

    Instance Attributes:
        - grid: The pixel grid.
        - r: The resonance radius, in volts.
        - phi: The resonance phase, in radians.
        - omega0: The fitted (full) or table (fast) resonance frequency, in rad/s.
        - gamma: The fitted linewidth (NaN in fast mode), in rad/s.
        - converged: Whether the pixel's fit converged.
        - valid: Whether the pixel holds a usable value.
        - steer: The steering time of each pixel, in seconds.
        - control: The control time of each pixel, in seconds.
        - measure: The measurement time of each pixel, in seconds.
        - mode: The name of the scan mode.
        - seed: The master seed of the scan.
        - scenario_hash: The hash of the scenario file, when the scan came from one.

    Representation Invariants:
        - every channel has shape self.grid.shape()
        - np.all(self.r >= 0)
    """
    grid: PixelGrid
    r: np.ndarray
    phi: np.ndarray
    omega0: np.ndarray
    gamma: np.ndarray
    converged: np.ndarray
    valid: np.ndarray
    steer: np.ndarray
    control: np.ndarray
    measure: np.ndarray
    mode: str = 'full'
    seed: int = const.MASTER_SEED
    scenario_hash: str = ''

    def __post_init__(self) -> None:
        for name in self.channel_names():
            dtype = bool if name in ('converged', 'valid') else float
            values = np.asarray(getattr(self, name), dtype=dtype)
            if values.shape != self.grid.shape():
                raise GridMismatch(f'{name} has shape {values.shape}, grid is '
                                   f'{self.grid.shape()}')
            setattr(self, name, values)
        if np.any(self.r < 0):
            raise ValueError('resonance radius must be non-negative')

    @staticmethod
    def channel_names() -> tuple[str, ...]:
        """Returns the names of the per-pixel channels, in file order."""
        return ('r', 'phi', 'omega0', 'gamma', 'converged', 'valid', 'steer', 'control',
                'measure')

    def channel(self, name: str) -> np.ndarray:
        """Returns the channel called name."""
        if name not in self.channel_names():
            raise KeyError(name)
        return getattr(self, name)

    def with_channels(self, **channels: np.ndarray) -> EmiImage:
        """Returns a copy with some channels replaced."""
        return replace(self, **channels)


@dataclass(frozen=True)
class PixelResult:
    """The outcome of one pixel."""
    index: int
    r: float
    phi: float
    omega0: float
    gamma: float
    converged: bool
    valid: bool
    steer: float
    control: float
    measure: float


def induced_targets(scenario: ScanScenario) -> list[EddyMesh]:
    """Returns the induced eddy mesh of every target in the scenario."""
    meshes = []
    for plate in scenario.targets:
        mesh = induce(mesh_plate(plate, scenario.mesh_pitch, omega=scenario.coil.drive_omega),
                      scenario.coil)
        logger.debug('target %s meshed into %d loops', plate.name, len(mesh.cells))
        meshes.append(mesh)
    return meshes


def sensed_field(coil: CoilSpec, meshes: list[EddyMesh],
                 stencil: np.ndarray) -> tuple[complex, complex]:
    """Returns the sensed RF phasor with the targets present and without them, each
    averaged over the voxel stencil. Only the component along the sensing axis counts.

    Args:
        - coil: The RF coil.
        - meshes: The induced target meshes.
        - stencil: The voxel sample points, as an array of shape (N, 3).
    """
    axis = const.SENSING_AXIS.array()
    b_total = complex(np.mean(total_rf_field_array(coil, meshes, stencil) @ axis))
    b_ref = complex(np.mean(coil_field_array(coil, stencil) @ axis))
    return b_total, b_ref


def _scan_pixel(scenario: ScanScenario, plan: RasterPlan, meshes: list[EddyMesh],
                index: int) -> PixelResult:
    """Returns the measurement of one pixel: steer, sample the local field, then acquire
    and reduce per the scan mode."""
    _, freq_x, freq_z = plan.entries[index]
    aod_x, aod_z = scenario.aods
    x = beam_position(scenario.lens, aod_x, freq_x - aod_x.center_freq, scenario.cell.width)
    z = beam_position(scenario.lens, aod_z, freq_z - aod_z.center_freq, scenario.cell.length)
    voxel = voxel_at(scenario.cell, x, z, scenario.plane_y)

    # Diffusion blur: average the sensed component over the voxel stencil.
    b_total, b_ref = sensed_field(scenario.coil, meshes, voxel.stencil())

    params = resonance_at(voxel, scenario.bias, scenario.pixel_amplitude, scenario.cell,
                          scenario.profile)
    key = (index, scenario.mode_code())
    steer, control = plan.steering_time_per_move, scenario.control_latency

    if isinstance(scenario.mode, FastSinglePoint):
        omega = scenario.mode.omega_table[index]
        drive = replace(scenario.drive, omega_rf=omega, duration=scenario.mode.dwell)
        x_out, y_out = measure_point(params, drive, scenario.noise, b_total, b_ref, (*key, 0),
                                     scenario.analytic)
        return PixelResult(index, math.hypot(x_out, y_out), math.atan2(x_out, y_out), omega,
                           math.nan, True, True, steer, control, scenario.mode.dwell)

    n_points = scenario.mode.n_points
    record = run_sweep(params, scenario.drive, n_points, scenario.noise, b_total, b_ref,
                       center=larmor_frequency(scenario.bias.nominal_bias), key=key,
                       analytic=scenario.analytic)
    measure = n_points * scenario.drive.duration
    try:
        fit = fit_resonance(record)
    except DegenerateSweep as error:
        # No usable peak in the sweep: report the pixel as invalid, not the whole scan.
        logger.debug('pixel %d: %s', index, error)
        return PixelResult(index, 0.0, math.nan, math.nan, math.nan, False, False, steer,
                           control, measure)
    valid = math.isfinite(fit.r_peak)
    return PixelResult(index, fit.r_peak if valid else 0.0, fit.phi_peak, fit.params.omega0,
                       fit.params.gamma_fwhm, fit.converged, valid, steer, control, measure)


def run_scan(scenario: ScanScenario, threads: Optional[int] = None,
             scenario_hash: str = '') -> EmiImage:
    """Returns the image of the scenario.

    Args:
        - scenario: The scan to run.
        - threads: The number of worker threads; None uses every core, 1 runs serially.
        - scenario_hash: The hash of the scenario file, recorded in the image.
    """
    grid = scenario.grid
    plan = plan_raster(grid, scenario.aods[0], scenario.aods[1], scenario.lens)
    meshes = induced_targets(scenario)
    logger.info('scanning %dx%d pixels in %s mode (%s acquisition, %s threads, %d targets)',
                grid.n_rows, grid.n_cols, scenario.mode.name,
                'analytic' if scenario.analytic else 'time-series', threads or 'all',
                len(meshes))

    total = len(grid)
    step = max(total // 10, 1)
    results: list[Optional[PixelResult]] = [None] * total

    def work(index: int) -> PixelResult:
        return _scan_pixel(scenario, plan, meshes, index)

    if threads == 1:
        outcomes = map(work, range(total))
        for done, result in enumerate(outcomes, start=1):
            results[result.index] = result
            if done % step == 0:
                logger.debug('%d/%d pixels done', done, total)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            for done, result in enumerate(executor.map(work, range(total)), start=1):
                results[result.index] = result
                if done % step == 0:
                    logger.debug('%d/%d pixels done', done, total)

    image = _assemble(grid, results, scenario, scenario_hash)
    failed = int(np.count_nonzero(~image.converged))
    if failed:
        logger.warning('%d of %d pixel fits did not converge', failed, total)
    logger.info('scan finished: %d pixels, %.3f s simulated instrument time', total,
                float(image.steer.sum() + image.control.sum() + image.measure.sum()))
    return image


def _assemble(grid: PixelGrid, results: list[Optional[PixelResult]], scenario: ScanScenario,
              scenario_hash: str) -> EmiImage:
    """Returns the image built from pixel results ordered by index."""
    channels = {name: np.array([getattr(result, name) for result in results]).reshape(
        grid.shape()) for name in EmiImage.channel_names()}
    return EmiImage(grid, mode=scenario.mode.name, seed=scenario.noise.seed,
                    scenario_hash=scenario_hash, **channels)


def normalize(background: EmiImage, target: EmiImage) -> EmiImage:
    """Returns the background radius divided by the target radius, pixel by pixel. Pixels
    where the target radius is zero are marked invalid and set to zero.

    Args:
        - background: The image without targets.
        - target: The image with targets, on the same grid.
    """
    if background.grid != target.grid:
        raise GridMismatch(f'background grid {background.grid} differs from target grid '
                           f'{target.grid}')
    usable = target.r > 0
    ratio = np.zeros_like(target.r)
    np.divide(background.r, target.r, out=ratio, where=usable)
    return target.with_channels(r=ratio, valid=target.valid & background.valid & usable)


def gaussian_kernel(radius: int) -> np.ndarray:
    """Returns the (2 radius + 1)^2 Gaussian kernel of standard deviation radius pixels,
    normalised to unit sum.

    >>> gaussian_kernel(0)
    array([[1.]])
    """
    if radius == 0:
        return np.ones((1, 1))
    offsets = np.arange(-radius, radius + 1)
    squared = offsets[:, None] ** 2 + offsets[None, :] ** 2
    kernel = np.exp(-squared / (2 * radius ** 2))
    return kernel / kernel.sum()


def smooth(image: EmiImage, radius: int = const.SMOOTH_RADIUS) -> EmiImage:
    """Returns the image with its radius channel convolved with a Gaussian kernel. Taps
    that fall off the grid or on invalid pixels are dropped and the remaining weights
    renormalised.

    Args:
        - image: The image to smooth.
        - radius: The kernel radius and standard deviation, in pixels.
    """
    if radius < 0:
        raise ValueError(f'smoothing radius must be non-negative, got {radius}')
    if radius == 0:
        return image.with_channels(r=image.r.copy())

    kernel = gaussian_kernel(radius)
    weights = image.valid.astype(float)
    numerator = ndimage.convolve(image.r * weights, kernel, mode='constant', cval=0.0)
    denominator = ndimage.convolve(weights, kernel, mode='constant', cval=0.0)
    smoothed = np.zeros_like(image.r)
    np.divide(numerator, denominator, out=smoothed, where=denominator > 0)
    return image.with_channels(r=np.maximum(smoothed, 0.0))


@dataclass(frozen=True)
class TimingReport:
    """The pixel time budget of one image.

    Instance Attributes:
        - n_pixels: The number of pixels.
        - steer_total: The summed steering time, in seconds.
        - control_total: The summed control time, in seconds.
        - measure_total: The summed measurement time, in seconds.
        - dominant: The phase with the largest total: 'steer', 'control' or 'measure'.
    """
    n_pixels: int
    steer_total: float
    control_total: float
    measure_total: float
    dominant: str

    def means(self) -> dict[str, float]:
        """Returns the per-pixel mean of each phase."""
        return {'steer': self.steer_total / self.n_pixels,
                'control': self.control_total / self.n_pixels,
                'measure': self.measure_total / self.n_pixels}

    def total(self) -> float:
        """Returns the time of the whole image, in seconds."""
        return self.steer_total + self.control_total + self.measure_total

    def seconds_per_pixel(self) -> float:
        """Returns the mean time per pixel."""
        return self.total() / self.n_pixels

    def mechanical_total(self) -> float:
        """Returns the image time had the beams been moved mechanically."""
        return self.n_pixels * const.MECHANICAL_STEER_TIME + self.control_total + \
            self.measure_total

    def steering_speedup(self) -> float:
        """Returns how many times faster the acousto-optic steering is than mechanical."""
        if self.steer_total == 0:
            return math.inf
        return self.n_pixels * const.MECHANICAL_STEER_TIME / self.steer_total

    def to_dict(self) -> dict[str, object]:
        """Returns the report as a JSON-compatible dictionary."""
        means = self.means()
        return {
            'n_pixels': self.n_pixels,
            'steer_total_s': self.steer_total,
            'control_total_s': self.control_total,
            'measure_total_s': self.measure_total,
            'steer_mean_s': means['steer'],
            'control_mean_s': means['control'],
            'measure_mean_s': means['measure'],
            'dominant': self.dominant,
            'seconds_per_pixel': self.seconds_per_pixel(),
            'image_total_s': self.total(),
            'mechanical_total_s': self.mechanical_total(),
            'steering_speedup': self.steering_speedup(),
        }


def timing_report(image: EmiImage) -> TimingReport:
    """Returns the time budget of the image.

    Args:
        - image: A scanned image.
    """
    totals = {'steer': float(image.steer.sum()), 'control': float(image.control.sum()),
              'measure': float(image.measure.sum())}
    dominant = max(totals, key=totals.get)
    return TimingReport(image.r.size, totals['steer'], totals['control'], totals['measure'],
                        dominant)


def omega_table_from(background: EmiImage) -> tuple[float, ...]:
    """Returns the per-pixel resonance frequencies fitted in a background image, row-major.
    Pixels without a usable fit take the median of the usable ones.

    Args:
        - background: A full-sweep image without targets.
    """
    omega = background.omega0.ravel()
    usable = background.converged.ravel() & background.valid.ravel() & np.isfinite(omega)
    if not np.any(usable):
        raise ScenarioError('background image has no converged pixel to take frequencies from')
    fallback = float(np.median(omega[usable]))
    return tuple(float(w) if ok else fallback for w, ok in zip(omega, usable))


def fast_mode(background: EmiImage, dwell: float = const.FAST_DWELL) -> FastSinglePoint:
    """Returns the single-point mode driven at the background's fitted frequencies."""
    return FastSinglePoint(omega_table_from(background), dwell)


class BackgroundCache:
    """Background images keyed by scenario geometry, so that one background serves every
    target scanned in the same setup.

    Instance Attributes:
        - hits: The number of lookups served from the cache.
    """
    hits: int
    _images: dict[ScanScenario, EmiImage]

    def __init__(self) -> None:
        self.hits = 0
        self._images = {}

    def __len__(self) -> int:
        return len(self._images)

    def get(self, scenario: ScanScenario, threads: Optional[int] = None) -> EmiImage:
        """Returns the background image of the scenario's geometry, scanning it the first
        time it is asked for.

        Args:
            - scenario: Any scenario of the geometry; its targets and mode are ignored.
            - threads: The worker threads for a scan.
        """
        key = scenario.background()
        if key in self._images:
            self.hits += 1
            return self._images[key]
        image = run_scan(key, threads)
        self._images[key] = image
        return image

    def put(self, scenario: ScanScenario, image: EmiImage) -> None:
        """Stores a background image for the scenario's geometry."""
        self._images[scenario.background()] = image


def pixel_centres(grid: PixelGrid) -> np.ndarray:
    """Returns the (x, z) centre of every pixel, row-major, as an array of shape (N, 2)."""
    return np.array([grid.position(index) for index in range(len(grid))])


def footprint_mask(plate: TargetPlate, grid: PixelGrid, margin: float = 0.0) -> np.ndarray:
    """Returns which pixels lie under the plate, at least margin inside its outline.

    Args:
        - plate: The target.
        - grid: The pixel grid.
        - margin: The distance a pixel centre must keep from the plate edge.
    """
    inside = points_in_polygon(pixel_centres(grid), plate.outline, tolerance=margin)
    return inside.reshape(grid.shape())


def outside_mask(plate: TargetPlate, grid: PixelGrid, margin: float = 0.0) -> np.ndarray:
    """Returns which pixels lie outside the plate, at least margin away from its outline."""
    centres = pixel_centres(grid)
    outside = ~points_in_polygon(centres, plate.outline) & \
        (distance_to_edges(centres, plate.outline) >= margin)
    return outside.reshape(grid.shape())


@dataclass(frozen=True)
class Region:
    """A thresholded region of an image.

    Instance Attributes:
        - mask: The pixels of the largest connected component above threshold.
        - threshold: The threshold used.
        - n_components: The number of connected components above threshold.
        - centroid: The (x, z) centroid of the mask, in metres.
        - area: The area of the mask, in square metres.
        - fill_ratio: The area over the area of the mask's bounding box.
    """
    mask: np.ndarray
    threshold: float
    n_components: int
    centroid: tuple[float, float]
    area: float
    fill_ratio: float

    def shape_label(self) -> str:
        """Returns 'square' for a region filling its bounding box, else 'triangle'."""
        return 'square' if self.fill_ratio >= 0.75 else 'triangle'


def _largest_component(above: np.ndarray) -> tuple[np.ndarray, int]:
    """Returns the mask of the largest 4-connected component and the number of components."""
    labels, n_components = ndimage.label(above)
    if n_components == 0:
        return np.zeros(above.shape, dtype=bool), 0
    sizes = ndimage.sum(np.ones(above.shape), labels, index=np.arange(1, n_components + 1))
    return labels == int(np.argmax(sizes)) + 1, n_components


def boundary_contrast(r: np.ndarray, mask: np.ndarray, valid: np.ndarray) -> float:
    """Returns the mean step r(inside) - r(outside) over every pair of 4-neighbours that
    straddles the mask boundary, or -inf when the mask has no such pair.

    >>> r = np.array([[0.0, 1.0, 3.0]])
    >>> float(boundary_contrast(r, np.array([[False, False, True]]), np.ones((1, 3), bool)))
    2.0
    """
    steps = []
    for axis in (0, 1):
        near = [slice(None)] * 2
        far = [slice(None)] * 2
        near[axis], far[axis] = slice(None, -1), slice(1, None)
        near, far = tuple(near), tuple(far)
        leaving = mask[near] & ~mask[far] & valid[far]
        entering = ~mask[near] & mask[far] & valid[near]
        steps.append((r[near] - r[far])[leaving])
        steps.append((r[far] - r[near])[entering])
    steps = np.concatenate(steps)
    return float(steps.mean()) if steps.size else -math.inf


def threshold_region(image: EmiImage, inside: np.ndarray, outside: np.ndarray) -> Region:
    """Returns the largest connected region above the threshold whose region boundary has
    the steepest mean step. Candidate thresholds lie between neighbouring pixel values,
    from the mean radius over the outside pixels up to the largest inside radius; the
    midpoint of the inside and outside means is used when there are none.

    Args:
        - image: A normalised image.
        - inside: Pixels known to lie under the target.
        - outside: Pixels known to lie clear of the target.
    """
    grid = image.grid
    valid = image.valid
    r = np.where(valid, image.r, 0.0)
    low, high = float(r[outside].mean()), float(r[inside].max())
    midpoint = (float(r[inside].mean()) + low) / 2

    levels = np.unique(r[valid & (r >= low) & (r <= high)])
    candidates = list((levels[:-1] + levels[1:]) / 2) or [midpoint]
    best = None
    for threshold in candidates:
        mask, n_components = _largest_component((r > threshold) & valid)
        contrast = boundary_contrast(r, mask, valid)
        if best is None or contrast > best[0]:
            best = (contrast, float(threshold), mask, n_components)
    _, threshold, mask, n_components = best

    if n_components == 0:
        return Region(mask, threshold, 0, (math.nan, math.nan), 0.0, 0.0)
    rows, cols = np.nonzero(mask)
    x0, z0 = grid.origin
    centroid = (x0 + cols.mean() * grid.step, z0 + rows.mean() * grid.step)
    box = (rows.max() - rows.min() + 1) * (cols.max() - cols.min() + 1)
    return Region(mask, threshold, n_components, centroid, len(rows) * grid.step ** 2,
                  len(rows) / box)


def default_scenario(targets: tuple[TargetPlate, ...] = (default_plate(),),
                     mode: ScanMode = FullSweep(), analytic: bool = False) -> ScanScenario:
    """Returns the 35 x 35 pixel, 1 mm step scan of the given targets with every other
    setting at its default."""
    return ScanScenario(targets=targets, mode=mode, analytic=analytic)


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['concurrent.futures', 'logging', 'math', 'numpy', 'scipy',
                          'beamsteer', 'emi_constants', 'emi_errors', 'fields', 'fitting',
                          'helpers', 'lockin', 'magnetometer'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
