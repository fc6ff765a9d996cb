"""Tests for image_io.py."""
import json
import math
import os

import numpy as np
import pytest
from PIL import Image

from beamsteer import PixelGrid
from emi_errors import ImageFormatError
from image_io import graymap, load_image, load_matrix, save_image, save_matrix
from imaging import EmiImage


@pytest.fixture
def image() -> EmiImage:
    grid = PixelGrid.centered(4, 3, 1.5e-3)
    rng = np.random.default_rng(0)
    r = rng.uniform(0.5, 1.5, grid.shape())
    gamma = rng.uniform(1e4, 2e4, grid.shape())
    gamma[0, 1] = math.nan
    valid = np.ones(grid.shape(), dtype=bool)
    valid[3, 2] = False
    return EmiImage(grid, r=r, phi=rng.uniform(-3, 3, grid.shape()),
                    omega0=rng.uniform(6e5, 7e5, grid.shape()), gamma=gamma,
                    converged=valid, valid=valid, steer=np.full(grid.shape(), 8e-6),
                    control=np.full(grid.shape(), 1e-6), measure=np.full(grid.shape(), 0.75),
                    mode='full', seed=17, scenario_hash='ab' * 32)


def test_matrix_round_trip_is_exact(tmp_path, image) -> None:
    path = os.path.join(tmp_path, 'r.csv')
    save_matrix(image.r, image.grid, 'r', path)
    grid, channel, values = load_matrix(path)
    assert grid == image.grid
    assert channel == 'r'
    np.testing.assert_array_equal(values, image.r)


def test_image_round_trip(tmp_path, image) -> None:
    sidecar = save_image(image, tmp_path, 'target')
    loaded = load_image(sidecar)
    assert loaded.grid == image.grid
    assert (loaded.mode, loaded.seed, loaded.scenario_hash) == ('full', 17, 'ab' * 32)
    for name in EmiImage.channel_names():
        np.testing.assert_array_equal(loaded.channel(name), image.channel(name))
    assert loaded.valid.dtype == bool


def test_sidecar_and_graymap(tmp_path, image) -> None:
    sidecar = save_image(image, tmp_path, 'target')
    with open(sidecar, encoding='utf-8') as json_file:
        document = json.load(json_file)
    assert document['channels']['r']['file'] == 'target_r.csv'
    assert document['timing']['n_pixels'] == 12
    assert document['timing']['measure_total_s'] == pytest.approx(9.0)
    with Image.open(os.path.join(tmp_path, document['graymap']['file'])) as pgm:
        assert pgm.size == (3, 4)
        pixels = np.array(pgm)
    assert pixels[3, 2] == 0
    assert pixels.max() == 255


def test_graymap() -> None:
    pixels, low, high = graymap(np.array([[1.0, math.nan], [3.0, 5.0]]))
    np.testing.assert_array_equal(pixels, [[0, 0], [128, 255]])
    assert (low, high) == (1.0, 5.0)

    flat, _, _ = graymap(np.full((2, 2), 7.0))
    assert not flat.any()

    empty, low, high = graymap(np.full((2, 2), math.nan))
    assert not empty.any() and math.isnan(low) and math.isnan(high)


def test_malformed_matrices(tmp_path, image) -> None:
    path = os.path.join(tmp_path, 'bad.csv')
    for text in ('', 'hello,world\n1,2\n', 'n_rows=1,n_cols=2,step_m=1.0,origin_x_m=0.0,'
                 'origin_z_m=0.0,channel=r\n1.0,2.0,3.0\n'):
        with open(path, 'w', encoding='utf-8') as csv_file:
            csv_file.write(text)
        with pytest.raises(ImageFormatError):
            load_matrix(path)


def test_malformed_sidecars(tmp_path, image) -> None:
    sidecar = save_image(image, tmp_path, 'target')
    with open(sidecar, encoding='utf-8') as json_file:
        document = json.load(json_file)

    broken = os.path.join(tmp_path, 'broken.json')
    with open(broken, 'w', encoding='utf-8') as json_file:
        json_file.write('{')
    with pytest.raises(ImageFormatError):
        load_image(broken)

    del document['channels']['phi']
    missing = os.path.join(tmp_path, 'missing.json')
    with open(missing, 'w', encoding='utf-8') as json_file:
        json.dump(document, json_file)
    with pytest.raises(ImageFormatError):
        load_image(missing)

    document['channels']['phi'] = {'file': 'target_r.csv'}
    swapped = os.path.join(tmp_path, 'swapped.json')
    with open(swapped, 'w', encoding='utf-8') as json_file:
        json.dump(document, json_file)
    with pytest.raises(ImageFormatError):
        load_image(swapped)
