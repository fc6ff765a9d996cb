"""Tests for vector.py."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats

from vector import Vector3

COMPONENTS = floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_rejects_non_finite_components() -> None:
    with pytest.raises(ValueError):
        Vector3(math.nan, 0.0, 0.0)


def test_arithmetic() -> None:
    a, b = Vector3(1, 2, 3), Vector3(4, 5, 6)
    assert a + b == Vector3(5, 7, 9)
    assert b - a == Vector3(3, 3, 3)
    assert a * 2 == Vector3(2, 4, 6)
    assert a / 2 == Vector3(0.5, 1, 1.5)


def test_rejects_non_vector_operands() -> None:
    a = Vector3(1, 2, 3)
    with pytest.raises(TypeError):
        a + (1, 1, 1)
    with pytest.raises(TypeError):
        a * a
    assert a != (1, 2, 3)


def test_array_round_trip() -> None:
    v = Vector3(0.1, -0.2, 0.3)
    assert Vector3.from_array(v.array()) == v
    assert list(v) == [0.1, -0.2, 0.3]


@given(COMPONENTS, COMPONENTS, COMPONENTS, COMPONENTS, COMPONENTS, COMPONENTS)
def test_cross_is_orthogonal(ax, ay, az, bx, by, bz) -> None:
    a, b = Vector3(ax, ay, az), Vector3(bx, by, bz)
    c = a.cross(b)
    scale = max(a.norm() * b.norm(), 1.0)
    assert abs(c.dot(a)) <= 1e-9 * scale * max(a.norm(), 1.0)
    assert abs(c.dot(b)) <= 1e-9 * scale * max(b.norm(), 1.0)
    np.testing.assert_allclose(c.array(), np.cross(a.array(), b.array()), atol=1e-9 * scale)


def test_unit_has_length_one() -> None:
    assert math.isclose(Vector3(3, 4, 12).unit().norm(), 1.0)


@given(COMPONENTS, COMPONENTS, COMPONENTS)
def test_equal_vectors_hash_equally(x, y, z) -> None:
    a, b = Vector3(x, y, z), Vector3(x, y, z)
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1


def test_nearby_vectors_are_distinct() -> None:
    a, b = Vector3(0.0, 0.0, 0.0), Vector3(1e-16, 0.0, 0.0)
    assert a != b
    assert len({a, b}) == 2
