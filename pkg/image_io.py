"""emiscan

Module containing the image files written by a scan: one csv matrix per channel, an 8-bit
graymap of the radius for quick viewing, and a JSON sidecar that ties them together with
the scenario hash, seed, channel ranges and timing summary.

Csv values are written with repr, so reading a matrix back reproduces it exactly. Row i of
every matrix is grid row i (increasing z); column j is grid column j (increasing x).
"""
from __future__ import annotations

from typing import Any, Optional
import csv
import json
import math
import os

import numpy as np
from PIL import Image

from beamsteer import PixelGrid
from emi_errors import ImageFormatError
from imaging import EmiImage, timing_report

BOOLEAN_CHANNELS = ('converged', 'valid')


def _grid_header(grid: PixelGrid, channel: str) -> list[str]:
    """Returns the header row of a channel matrix."""
    return [f'n_rows={grid.n_rows}', f'n_cols={grid.n_cols}', f'step_m={grid.step!r}',
            f'origin_x_m={grid.origin[0]!r}', f'origin_z_m={grid.origin[1]!r}',
            f'channel={channel}']


def _format(value: Any, boolean: bool) -> str:
    return str(int(value)) if boolean else repr(float(value))


def save_matrix(values: np.ndarray, grid: PixelGrid, channel: str, file_path: str) -> None:
    """Saves one channel as a csv matrix with a grid header row.

    Args:
        - values: The channel, of shape grid.shape().
        - grid: The pixel grid.
        - channel: The channel name.
        - file_path: The path for the csv file.
    """
    boolean = channel in BOOLEAN_CHANNELS
    with open(file_path, 'w+', newline='') as csv_file:
        writer = csv.writer(csv_file, delimiter=',', lineterminator='\n')
        writer.writerow(_grid_header(grid, channel))
        writer.writerows([_format(value, boolean) for value in row] for row in values)


def load_matrix(file_path: str) -> tuple[PixelGrid, str, np.ndarray]:
    """Returns the grid, channel name and values of a csv matrix.

    Args:
        - file_path: The path of the csv file.
    """
    with open(file_path, newline='') as csv_file:
        reader = csv.reader(csv_file)
        header = next(reader, None)
        rows = [row for row in reader if row]

    try:
        fields = dict(cell.split('=', 1) for cell in header)
        grid = PixelGrid(int(fields['n_rows']), int(fields['n_cols']), float(fields['step_m']),
                         (float(fields['origin_x_m']), float(fields['origin_z_m'])))
        channel = fields['channel']
        values = np.array([[float(value) for value in row] for row in rows])
    except (TypeError, KeyError, ValueError) as error:
        raise ImageFormatError(f'{file_path} is not an image matrix: {error}') from None

    if values.shape != grid.shape():
        raise ImageFormatError(f'{file_path} holds {values.shape} values for a '
                               f'{grid.shape()} grid')
    if channel in BOOLEAN_CHANNELS:
        values = values.astype(bool)
    return grid, channel, values


def graymap(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Returns the values min-max scaled to 0..255, with the minimum and maximum used.
    Non-finite values map to 0.

    >>> graymap(np.array([[0.0, 1.0], [2.0, 4.0]]))[0]
    array([[  0,  64],
           [128, 255]], dtype=uint8)
    """
    finite = np.isfinite(values)
    if not np.any(finite):
        return np.zeros(values.shape, dtype=np.uint8), math.nan, math.nan
    low, high = float(values[finite].min()), float(values[finite].max())
    scaled = np.zeros(values.shape)
    if high > low:
        scaled[finite] = (values[finite] - low) / (high - low)
    return np.round(scaled * 255).astype(np.uint8), low, high


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def save_image(image: EmiImage, out_dir: str, stem: str) -> str:
    """Saves every channel of the image, its graymap and its sidecar, returning the
    sidecar's path.

    Args:
        - image: The image to save.
        - out_dir: The directory for the files; created when missing.
        - stem: The common prefix of the file names.
    """
    os.makedirs(out_dir, exist_ok=True)
    channels = {}
    for name in EmiImage.channel_names():
        file_name = f'{stem}_{name}.csv'
        values = image.channel(name)
        save_matrix(values, image.grid, name, os.path.join(out_dir, file_name))
        finite = values[np.isfinite(values.astype(float))].astype(float)
        channels[name] = {
            'file': file_name,
            'min': _finite_or_none(float(finite.min())) if finite.size else None,
            'max': _finite_or_none(float(finite.max())) if finite.size else None,
        }

    pixels, low, high = graymap(np.where(image.valid, image.r, np.nan))
    graymap_name = f'{stem}.pgm'
    Image.fromarray(pixels).save(os.path.join(out_dir, graymap_name))

    grid = image.grid
    sidecar = {
        'stem': stem,
        'mode': image.mode,
        'seed': image.seed,
        'scenario_hash': image.scenario_hash,
        'grid': {'n_rows': grid.n_rows, 'n_cols': grid.n_cols, 'step_m': grid.step,
                 'origin_m': list(grid.origin)},
        'channels': channels,
        'graymap': {'file': graymap_name, 'channel': 'r', 'min': _finite_or_none(low),
                    'max': _finite_or_none(high)},
        'timing': {key: _finite_or_none(value) if isinstance(value, float) else value
                   for key, value in timing_report(image).to_dict().items()},
    }
    sidecar_path = os.path.join(out_dir, f'{stem}.json')
    with open(sidecar_path, 'w', encoding='utf-8', newline='\n') as json_file:
        json.dump(sidecar, json_file, indent=2, sort_keys=True, allow_nan=False)
        json_file.write('\n')
    return sidecar_path


def load_image(sidecar_path: str) -> EmiImage:
    """Returns the image described by a sidecar written by save_image.

    Args:
        - sidecar_path: The path of the sidecar JSON file.
    """
    try:
        with open(sidecar_path, encoding='utf-8') as json_file:
            sidecar = json.load(json_file)
        files = {name: sidecar['channels'][name]['file'] for name in EmiImage.channel_names()}
    except json.JSONDecodeError as error:
        raise ImageFormatError(f'{sidecar_path} is not valid JSON: {error}') from None
    except (KeyError, TypeError) as error:
        raise ImageFormatError(f'{sidecar_path} lacks {error}') from None

    directory = os.path.dirname(sidecar_path)
    grid, channels = None, {}
    for name, file_name in files.items():
        matrix_grid, channel, values = load_matrix(os.path.join(directory, file_name))
        if channel != name:
            raise ImageFormatError(f'{file_name} holds channel {channel!r}, expected {name!r}')
        if grid is not None and matrix_grid != grid:
            raise ImageFormatError(f'{file_name} disagrees with the other channels on the grid')
        grid = matrix_grid
        channels[name] = values

    return EmiImage(grid, mode=sidecar.get('mode', 'full'), seed=sidecar.get('seed', 0),
                    scenario_hash=sidecar.get('scenario_hash', ''), **channels)


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['csv', 'json', 'math', 'os', 'numpy', 'PIL', 'beamsteer',
                          'emi_errors', 'imaging'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
