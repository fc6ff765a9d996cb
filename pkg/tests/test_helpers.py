"""Tests for helpers.py."""
import numpy as np
from hypothesis import given
from hypothesis.strategies import floats

from helpers import clamp, distance_to_edges, points_in_polygon, polygon_area, \
    polygon_is_simple

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


@given(floats(allow_nan=False), floats(-10, 0), floats(0, 10))
def test_clamp_stays_in_range(number, low, high) -> None:
    assert low <= clamp(number, low, high) <= high


def test_area_sign_follows_orientation() -> None:
    assert polygon_area(UNIT_SQUARE) == 1.0
    assert polygon_area(UNIT_SQUARE[::-1]) == -1.0
    assert polygon_area([(0, 0), (2, 0), (0, 2)]) == 2.0


def test_bow_tie_is_not_simple() -> None:
    assert polygon_is_simple(UNIT_SQUARE)
    assert not polygon_is_simple([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_points_near_edges_count_as_outside() -> None:
    points = np.array([[0.5, 0.5], [0.5, 0.01], [1.5, 0.5]])
    assert list(points_in_polygon(points, UNIT_SQUARE)) == [True, True, False]
    assert list(points_in_polygon(points, UNIT_SQUARE, tolerance=0.05)) == [True, False, False]


def test_distance_to_edges() -> None:
    points = np.array([[0.5, 0.5], [2.0, 0.5], [0.5, 0.0]])
    np.testing.assert_allclose(distance_to_edges(points, UNIT_SQUARE), [0.5, 1.0, 0.0])
