"""emiscan

Module containing the scenario file: a JSON document describing one imaging setup, in which
every physical quantity carries its unit in its key name (width_mm, drive_khz, nominal_mg).

A parsed file keeps its values in file units, completed with defaults. Serialisation writes
that complete dictionary with sorted keys, so it is canonical, and the scenario hash is the
SHA-256 of the canonical text. See docs/scenario_grammar.md for the grammar.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Optional
import copy
import hashlib
import json
import math
import os

from beamsteer import AodSpec, LensSpec, PixelGrid
from emi_errors import BackgroundRequired, EmiError, ScenarioError
from fields import CoilSpec, Material, TargetPlate
from imaging import EmiImage, FastSinglePoint, FullSweep, ScanScenario, omega_table_from
from lockin import DriveConfig, NoiseSpec
from magnetometer import AmplitudeProfile, BiasFieldMap, CellSpec
from vector import Vector3
import emi_constants as const

SEED_VARIABLE = 'EMISCAN_SEED'
ACOUSTIC_SPEED_VARIABLE = 'EMISCAN_ACOUSTIC_SPEED'

MM = 1e-3
KHZ = const.TWO_PI * 1e3
MILLIGAUSS = 1e-7


def _file_units(value: float, unit: float) -> float:
    """Returns a SI default expressed in file units, rounded clear of conversion noise."""
    return round(value / unit, 9)


def acoustic_speed_default(environ: Mapping[str, str] = os.environ) -> float:
    """Returns the AOD acoustic speed in m/s, from EMISCAN_ACOUSTIC_SPEED when it is set.

    >>> acoustic_speed_default({'EMISCAN_ACOUSTIC_SPEED': '700'})
    700.0
    """
    text = environ.get(ACOUSTIC_SPEED_VARIABLE)
    if text is None:
        return const.ACOUSTIC_SPEED
    try:
        speed = float(text)
    except ValueError:
        raise ScenarioError(f'{ACOUSTIC_SPEED_VARIABLE} must be a number, got {text!r}') \
            from None
    if not (math.isfinite(speed) and speed > 0):
        raise ScenarioError(f'{ACOUSTIC_SPEED_VARIABLE} must be positive, got {text!r}')
    return speed


def default_sections(environ: Mapping[str, str] = os.environ) -> dict[str, Any]:
    """Returns every section of a scenario file at its default value, in file units."""
    half_grid = _file_units(-(const.GRID_SIZE - 1) * const.GRID_STEP / 2, MM)
    return {
        'cell': {
            'width_mm': _file_units(const.CELL_WIDTH, MM),
            'length_mm': _file_units(const.CELL_LENGTH, MM),
            'height_mm': _file_units(const.CELL_HEIGHT, MM),
            'center_mm': [_file_units(v, MM) for v in const.CELL_CENTER],
            'diffusion_length_mm': _file_units(const.DIFFUSION_LENGTH, MM),
        },
        'coil': {
            'side_mm': _file_units(const.COIL_SIDE, MM),
            'center_mm': [_file_units(v, MM) for v in const.COIL_CENTER],
            'normal': list(const.Y_AXIS.tuple()),
            'current_a': const.COIL_CURRENT,
            'drive_khz': _file_units(const.DRIVE_OMEGA, KHZ),
        },
        'bias': {
            'nominal_mg': _file_units(const.NOMINAL_BIAS, MILLIGAUSS),
            'max_shift_khz': _file_units(const.MAX_BIAS_SHIFT, KHZ),
            'shift_radius_mm': _file_units(const.SHIFT_RADIUS, MM),
            'sign': const.SHIFT_SIGN,
        },
        'targets': [],
        'grid': {
            'n_rows': const.GRID_SIZE,
            'n_cols': const.GRID_SIZE,
            'step_mm': _file_units(const.GRID_STEP, MM),
            'origin_mm': [half_grid, half_grid],
        },
        'aod': {
            'acoustic_speed_m_per_s': acoustic_speed_default(environ),
            'refractive_index': const.REFRACTIVE_INDEX,
            'wavelength_nm': _file_units(const.WAVELENGTH, 1e-9),
            'center_mhz': _file_units(const.AOD_CENTER_FREQ, 1e6),
            'span_mhz': _file_units(const.AOD_FREQ_SPAN, 1e6),
            'rise_time_us': _file_units(const.AOD_RISE_TIME, 1e-6),
        },
        'lens': {'focal_length_mm': _file_units(const.FOCAL_LENGTH, MM)},
        'drive': {
            'sample_rate_mhz': _file_units(const.SAMPLE_RATE, 1e6),
            'time_constant_ms': _file_units(const.LP_TIME_CONSTANT, 1e-3),
            'dwell_ms': _file_units(const.SWEEP_DWELL, 1e-3),
            'lp_order': const.LP_ORDER,
            'reference_phase_deg': 0.0,
        },
        'noise': {'rms_v': const.NOISE_RMS, 'seed': const.MASTER_SEED},
        'mode': {
            'name': 'full',
            'n_points': const.SWEEP_POINTS,
            'fast_dwell_ms': _file_units(const.FAST_DWELL, 1e-3),
        },
        'control': {'latency_ms': _file_units(const.SOFTWARE_CONTROL_LATENCY, 1e-3)},
        'acquisition': {
            'analytic': False,
            'plane_y_mm': _file_units(const.IMAGING_PLANE_Y, MM),
            'pixel_amplitude_v': const.PIXEL_AMPLITUDE,
            'corner_amplitude_ratio': const.CORNER_AMPLITUDE_RATIO,
            'profile_radius_mm': _file_units(const.SHIFT_RADIUS, MM),
            'mesh_pitch_mm': _file_units(const.DEFAULT_MESH_PITCH, MM),
        },
    }


def default_target() -> dict[str, Any]:
    """Returns the default target entry: the 25 x 25 x 1 mm copper square."""
    half = _file_units(const.PLATE_SIDE / 2, MM)
    return {
        'name': 'cu_square',
        'outline_mm': [[-half, -half], [half, -half], [half, half], [-half, half]],
        'thickness_mm': _file_units(const.PLATE_THICKNESS, MM),
        'height_mm': _file_units(const.PLATE_HEIGHT_Y, MM),
        'conductivity_s_per_m': const.COPPER_CONDUCTIVITY,
        'relative_permeability': 1.0,
    }


# The kind of every key. 'number' is any finite real, 'count' a positive integer.
SCHEMA = {
    'cell': {'width_mm': 'number', 'length_mm': 'number', 'height_mm': 'number',
             'center_mm': 'vec3', 'diffusion_length_mm': 'number'},
    'coil': {'side_mm': 'number', 'center_mm': 'vec3', 'normal': 'vec3', 'current_a': 'number',
             'drive_khz': 'number'},
    'bias': {'nominal_mg': 'number', 'max_shift_khz': 'number', 'shift_radius_mm': 'number',
             'sign': 'integer'},
    'grid': {'n_rows': 'count', 'n_cols': 'count', 'step_mm': 'number', 'origin_mm': 'vec2'},
    'aod': {'acoustic_speed_m_per_s': 'number', 'refractive_index': 'number',
            'wavelength_nm': 'number', 'center_mhz': 'number', 'span_mhz': 'number',
            'rise_time_us': 'number'},
    'lens': {'focal_length_mm': 'number'},
    'drive': {'sample_rate_mhz': 'number', 'time_constant_ms': 'number', 'dwell_ms': 'number',
              'lp_order': 'count', 'reference_phase_deg': 'number'},
    'noise': {'rms_v': 'number', 'seed': 'integer'},
    'mode': {'name': 'mode', 'n_points': 'count', 'fast_dwell_ms': 'number'},
    'control': {'latency_ms': 'number'},
    'acquisition': {'analytic': 'bool', 'plane_y_mm': 'number', 'pixel_amplitude_v': 'number',
                    'corner_amplitude_ratio': 'number', 'profile_radius_mm': 'number',
                    'mesh_pitch_mm': 'number'},
}
TARGET_SCHEMA = {'name': 'str', 'outline_mm': 'polygon', 'thickness_mm': 'number',
                 'height_mm': 'number', 'conductivity_s_per_m': 'number',
                 'relative_permeability': 'number'}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and \
        math.isfinite(value)


def _check_value(where: str, kind: str, value: Any) -> Any:
    """Returns the value in its canonical form, or raises ScenarioError."""
    if kind == 'number':
        if not _is_number(value):
            raise ScenarioError(f'{where} must be a finite number, got {value!r}')
        return float(value)
    if kind in ('integer', 'count'):
        if not (_is_number(value) and float(value).is_integer()):
            raise ScenarioError(f'{where} must be an integer, got {value!r}')
        if kind == 'count' and value < 1:
            raise ScenarioError(f'{where} must be at least 1, got {value!r}')
        return int(value)
    if kind == 'bool':
        if not isinstance(value, bool):
            raise ScenarioError(f'{where} must be true or false, got {value!r}')
        return value
    if kind == 'str':
        if not isinstance(value, str):
            raise ScenarioError(f'{where} must be a string, got {value!r}')
        return value
    if kind == 'mode':
        if value not in const.MODE_CODES:
            raise ScenarioError(f'{where} must be one of {sorted(const.MODE_CODES)}, '
                                f'got {value!r}')
        return value
    if kind in ('vec2', 'vec3'):
        size = int(kind[-1])
        if not (isinstance(value, list) and len(value) == size and
                all(_is_number(v) for v in value)):
            raise ScenarioError(f'{where} must be a list of {size} numbers, got {value!r}')
        return [float(v) for v in value]
    if kind == 'polygon':
        if not (isinstance(value, list) and len(value) >= 3):
            raise ScenarioError(f'{where} must list at least 3 [x, z] vertices')
        return [_check_value(f'{where}[{i}]', 'vec2', vertex) for i, vertex in enumerate(value)]
    raise ScenarioError(f'unknown kind {kind!r} for {where}')


def _merge(where: str, schema: dict[str, str], given: Any,
           defaults: dict[str, Any]) -> dict[str, Any]:
    """Returns defaults overlaid with the given section, rejecting unknown keys."""
    if not isinstance(given, dict):
        raise ScenarioError(f'{where} must be an object, got {given!r}')
    unknown = sorted(set(given) - set(schema))
    if unknown:
        raise ScenarioError(f'unknown key(s) in {where}: {", ".join(unknown)}')
    merged = {**copy.deepcopy(defaults), **given}
    return {key: _check_value(f'{where}.{key}', schema[key], value)
            for key, value in merged.items()}


@dataclass(frozen=True)
class ScenarioFile:
    """A parsed scenario file.

    Instance Attributes:
        - values: Every section, completed with defaults, in file units.
    """
    values: dict[str, Any]

    def canonical_text(self) -> str:
        """Returns the canonical serialisation: every key, sorted, two-space indent."""
        return json.dumps(self.values, sort_keys=True, indent=2) + '\n'

    def hash(self) -> str:
        """Returns the SHA-256 of the canonical text, in hex."""
        return hashlib.sha256(self.canonical_text().encode('utf-8')).hexdigest()

    def mode_name(self) -> str:
        """Returns 'full' or 'fast'."""
        return self.values['mode']['name']

    def with_mode(self, name: str) -> ScenarioFile:
        """Returns a copy acquiring in the named mode."""
        values = copy.deepcopy(self.values)
        values['mode']['name'] = _check_value('mode.name', 'mode', name)
        return ScenarioFile(values)

    def with_seed(self, seed: int) -> ScenarioFile:
        """Returns a copy with another master seed."""
        values = copy.deepcopy(self.values)
        values['noise']['seed'] = _check_value('noise.seed', 'integer', seed)
        return ScenarioFile(values)

    def without_targets(self) -> ScenarioFile:
        """Returns the background scenario: the same geometry with no targets."""
        values = copy.deepcopy(self.values)
        values['targets'] = []
        values['mode']['name'] = 'full'
        return ScenarioFile(values)

    def geometry_hash(self) -> str:
        """Returns the hash of the background scenario, shared by every target scanned
        in the same setup."""
        return self.without_targets().hash()

    def to_scenario(self, background: Optional[EmiImage] = None) -> ScanScenario:
        """Returns the scan scenario. A fast-mode scenario takes its per-pixel drive
        frequencies from the background image.

        Args:
            - background: A full-sweep image of the same grid without targets.
        """
        try:
            return self._build(background)
        except EmiError:
            raise
        except ValueError as error:
            raise ScenarioError(f'{type(error).__name__}: {error}') from error

    def _build(self, background: Optional[EmiImage]) -> ScanScenario:
        v = self.values
        cell, coil, bias = v['cell'], v['coil'], v['bias']
        grid, aod, drive = v['grid'], v['aod'], v['drive']
        mode, acquisition = v['mode'], v['acquisition']

        pixel_grid = PixelGrid(grid['n_rows'], grid['n_cols'], grid['step_mm'] * MM,
                               (grid['origin_mm'][0] * MM, grid['origin_mm'][1] * MM))
        if mode['name'] == 'fast':
            if background is None:
                raise BackgroundRequired('fast mode needs a background image to take its '
                                         'per-pixel resonance frequencies from')
            if background.grid != pixel_grid:
                raise ScenarioError('background image grid differs from the scenario grid')
            scan_mode = FastSinglePoint(omega_table_from(background),
                                        mode['fast_dwell_ms'] * 1e-3)
        else:
            scan_mode = FullSweep(mode['n_points'])

        deflector = AodSpec(aod['acoustic_speed_m_per_s'], aod['refractive_index'],
                            aod['wavelength_nm'] * 1e-9, aod['center_mhz'] * 1e6,
                            aod['span_mhz'] * 1e6, aod['rise_time_us'] * 1e-6)
        return ScanScenario(
            cell=CellSpec(cell['width_mm'] * MM, cell['length_mm'] * MM, cell['height_mm'] * MM,
                          Vector3.from_array(c * MM for c in cell['center_mm']),
                          cell['diffusion_length_mm'] * MM),
            coil=CoilSpec(coil['side_mm'] * MM,
                          Vector3.from_array(c * MM for c in coil['center_mm']),
                          Vector3.from_array(coil['normal']), coil['current_a'],
                          coil['drive_khz'] * KHZ),
            bias=BiasFieldMap(bias['nominal_mg'] * MILLIGAUSS, bias['max_shift_khz'] * KHZ,
                              bias['shift_radius_mm'] * MM, bias['sign']),
            targets=tuple(_plate(target) for target in v['targets']),
            grid=pixel_grid,
            aods=(deflector, deflector),
            lens=LensSpec(v['lens']['focal_length_mm'] * MM),
            drive=DriveConfig(const.DRIVE_OMEGA, drive['dwell_ms'] * 1e-3,
                              drive['sample_rate_mhz'] * 1e6, drive['time_constant_ms'] * 1e-3,
                              drive['lp_order'], math.radians(drive['reference_phase_deg'])),
            noise=NoiseSpec(v['noise']['rms_v'], v['noise']['seed']),
            mode=scan_mode,
            control_latency=v['control']['latency_ms'] * 1e-3,
            plane_y=acquisition['plane_y_mm'] * MM,
            pixel_amplitude=acquisition['pixel_amplitude_v'],
            profile=AmplitudeProfile(acquisition['corner_amplitude_ratio'],
                                     acquisition['profile_radius_mm'] * MM),
            mesh_pitch=acquisition['mesh_pitch_mm'] * MM,
            analytic=acquisition['analytic'],
        )


def _plate(target: dict[str, Any]) -> TargetPlate:
    """Returns the plate described by a target entry."""
    material = Material(target['conductivity_s_per_m'], target['relative_permeability'])
    outline = tuple((x * MM, z * MM) for x, z in target['outline_mm'])
    return TargetPlate(outline, target['thickness_mm'] * MM, target['height_mm'] * MM,
                       material, target['name'])


def parse_scenario(text: str, environ: Mapping[str, str] = os.environ) -> ScenarioFile:
    """Returns the scenario file parsed from JSON text. Missing keys take their defaults
    and unknown keys are rejected.

    Args:
        - text: The JSON document.
        - environ: The environment consulted for default overrides.

    >>> parse_scenario('{"grid": {"n_rows": 5}}', {}).values['grid']['n_rows']
    5
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ScenarioError(f'scenario is not valid JSON: {error}') from None
    if not isinstance(document, dict):
        raise ScenarioError('scenario must be a JSON object')

    defaults = default_sections(environ)
    unknown = sorted(set(document) - set(SCHEMA) - {'targets'})
    if unknown:
        raise ScenarioError(f'unknown section(s): {", ".join(unknown)}')

    values = {}
    for section, schema in SCHEMA.items():
        values[section] = _merge(section, schema, document.get(section, {}), defaults[section])

    targets = document.get('targets', [])
    if not isinstance(targets, list):
        raise ScenarioError('targets must be a list')
    values['targets'] = [_merge(f'targets[{i}]', TARGET_SCHEMA, target, default_target())
                         for i, target in enumerate(targets)]

    # Only a grid that states its size without an origin is centred on the cell axis.
    grid = document.get('grid', {})
    if 'origin_mm' not in grid:
        step = values['grid']['step_mm']
        values['grid']['origin_mm'] = [round(-(values['grid']['n_cols'] - 1) * step / 2, 9),
                                       round(-(values['grid']['n_rows'] - 1) * step / 2, 9)]

    # Out-of-range quantities fail here rather than at scan time.
    scenario = ScenarioFile(values)
    scenario.with_mode('full').to_scenario()
    return scenario


def load_scenario(file_path: str, environ: Mapping[str, str] = os.environ) -> ScenarioFile:
    """Returns the scenario file at file_path.

    Args:
        - file_path: The path of the JSON file.
        - environ: The environment consulted for default overrides.
    """
    with open(file_path, encoding='utf-8') as scenario_file:
        return parse_scenario(scenario_file.read(), environ)


def save_scenario(scenario: ScenarioFile, file_path: str) -> None:
    """Saves the scenario in canonical form."""
    with open(file_path, 'w', encoding='utf-8', newline='\n') as scenario_file:
        scenario_file.write(scenario.canonical_text())


def seed_override(seed: Optional[int], environ: Mapping[str, str] = os.environ) -> Optional[int]:
    """Returns the seed to use: EMISCAN_SEED when set, otherwise the given one.

    >>> seed_override(3, {'EMISCAN_SEED': '11'})
    11
    >>> seed_override(3, {})
    3
    """
    text = environ.get(SEED_VARIABLE)
    if text is None:
        return seed
    try:
        return int(text)
    except ValueError:
        raise ScenarioError(f'{SEED_VARIABLE} must be an integer, got {text!r}') from None


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['copy', 'hashlib', 'json', 'math', 'os', 'beamsteer',
                          'emi_constants', 'emi_errors', 'fields', 'imaging', 'lockin',
                          'magnetometer', 'vector'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
