"""Tests for scenario.py."""
import glob
import json
import os

import numpy as np
import pytest

from emi_errors import BackgroundRequired, ScenarioError
from imaging import EmiImage, FastSinglePoint, FullSweep
from scenario import acoustic_speed_default, load_scenario, parse_scenario, save_scenario, \
    seed_override
import emi_constants as const

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                            'data', 'scenarios')


def scenario_path(name: str) -> str:
    return os.path.join(SCENARIO_DIR, name)


def test_empty_file_takes_every_default() -> None:
    scenario = parse_scenario('{}', {}).to_scenario()
    assert scenario.grid.shape() == (35, 35)
    assert scenario.grid.origin == pytest.approx((-0.017, -0.017))
    assert scenario.targets == ()
    assert isinstance(scenario.mode, FullSweep)
    assert scenario.mode.n_points == const.SWEEP_POINTS
    assert scenario.noise.seed == const.MASTER_SEED
    assert scenario.aods[0].acoustic_speed == const.ACOUSTIC_SPEED


def test_grid_without_origin_is_centred() -> None:
    values = parse_scenario('{"grid": {"n_rows": 5, "n_cols": 3, "step_mm": 2.0}}', {}).values
    assert values['grid']['origin_mm'] == [-2.0, -4.0]


def test_unknown_keys_are_rejected() -> None:
    with pytest.raises(ScenarioError):
        parse_scenario('{"grid": {"rows": 5}}', {})
    with pytest.raises(ScenarioError):
        parse_scenario('{"lighting": {}}', {})
    with pytest.raises(ScenarioError):
        parse_scenario('{"targets": [{"colour": "red", "outline_mm": [[0, 0], [1, 0], [0, 1]]}]}',
                       {})


@pytest.mark.parametrize('text', [
    'not json',
    '[1, 2]',
    '{"grid": {"step_mm": true}}',
    '{"grid": {"n_rows": 0}}',
    '{"grid": {"n_rows": 2.5}}',
    '{"mode": {"name": "slow"}}',
    '{"targets": {}}',
    '{"targets": [{"outline_mm": [[0, 0], [1, 0]]}]}',
])
def test_malformed_scenarios(text: str) -> None:
    with pytest.raises(ScenarioError):
        parse_scenario(text, {})


def test_out_of_range_values_fail_at_parse_time() -> None:
    with pytest.raises(ScenarioError):
        parse_scenario('{"grid": {"n_rows": 70, "n_cols": 70, "step_mm": 1.0}}', {})
    with pytest.raises(ScenarioError):
        parse_scenario('{"targets": [{"conductivity_s_per_m": -1.0}]}', {})


def test_canonical_text_is_a_fixed_point() -> None:
    scenario = load_scenario(scenario_path('cu_square.json'), {})
    again = parse_scenario(scenario.canonical_text(), {})
    assert again.canonical_text() == scenario.canonical_text()
    assert again.hash() == scenario.hash()


def test_hash_ignores_key_order_and_spacing() -> None:
    first = parse_scenario('{"noise": {"rms_v": 0.1, "seed": 3}}', {})
    second = parse_scenario('{ "noise" : {"seed": 3,\n "rms_v": 0.1} }', {})
    assert first.hash() == second.hash()
    assert len(first.hash()) == 64
    assert first.with_seed(4).hash() != first.hash()


def test_targets_share_a_geometry_hash() -> None:
    square = load_scenario(scenario_path('cu_square.json'), {})
    triangle = load_scenario(scenario_path('cu_triangle.json'), {})
    background = load_scenario(scenario_path('background.json'), {})
    assert square.hash() != triangle.hash()
    assert square.geometry_hash() == triangle.geometry_hash() == background.hash()


def test_target_units() -> None:
    plate = load_scenario(scenario_path('cu_square.json'), {}).to_scenario().targets[0]
    assert plate.name == 'cu_square'
    assert plate.outline[0] == pytest.approx((-12.5e-3, -12.5e-3))
    assert plate.thickness == pytest.approx(1e-3)
    assert plate.height_y == pytest.approx(12e-3)
    assert plate.material.conductivity == 5.96e7


def test_every_stock_scenario_parses() -> None:
    paths = sorted(glob.glob(os.path.join(SCENARIO_DIR, '*.json')))
    assert len(paths) >= 5
    for path in paths:
        load_scenario(path, {}).to_scenario()


def test_save_and_load(tmp_path) -> None:
    scenario = load_scenario(scenario_path('cu_triangle.json'), {}).with_seed(9)
    path = os.path.join(tmp_path, 'saved.json')
    save_scenario(scenario, path)
    assert load_scenario(path, {}).hash() == scenario.hash()
    with open(path, encoding='utf-8') as saved:
        assert json.load(saved)['noise']['seed'] == 9


def test_fast_mode_needs_a_background() -> None:
    scenario = parse_scenario('{"grid": {"n_rows": 3, "n_cols": 3, "step_mm": 2.0}, '
                              '"mode": {"name": "fast"}}', {})
    with pytest.raises(BackgroundRequired):
        scenario.to_scenario()

    grid = scenario.with_mode('full').to_scenario().grid
    zeros = np.zeros(grid.shape())
    ones = np.ones(grid.shape(), dtype=bool)
    background = EmiImage(grid, r=zeros + 1.0, phi=zeros, omega0=zeros + const.LARMOR_OMEGA,
                          gamma=zeros + const.LINEWIDTH, converged=ones, valid=ones,
                          steer=zeros, control=zeros, measure=zeros)
    mode = scenario.to_scenario(background).mode
    assert isinstance(mode, FastSinglePoint)
    assert mode.omega_table == (const.LARMOR_OMEGA,) * 9
    assert mode.dwell == pytest.approx(const.FAST_DWELL)


def test_mode_override() -> None:
    scenario = parse_scenario('{}', {})
    assert scenario.with_mode('fast').mode_name() == 'fast'
    with pytest.raises(ScenarioError):
        scenario.with_mode('slow')


def test_seed_override() -> None:
    assert seed_override(None, {}) is None
    assert seed_override(5, {}) == 5
    assert seed_override(5, {'EMISCAN_SEED': '12'}) == 12
    with pytest.raises(ScenarioError):
        seed_override(5, {'EMISCAN_SEED': 'twelve'})


def test_acoustic_speed_override() -> None:
    assert acoustic_speed_default({}) == const.ACOUSTIC_SPEED
    environ = {'EMISCAN_ACOUSTIC_SPEED': '700'}
    assert parse_scenario('{}', environ).values['aod']['acoustic_speed_m_per_s'] == 700.0
    for text in ('fast', '-1', 'nan'):
        with pytest.raises(ScenarioError):
            acoustic_speed_default({'EMISCAN_ACOUSTIC_SPEED': text})
