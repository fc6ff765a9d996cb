"""emiscan

Module containing the Vector3 class, which stores a point or field direction in the
instrument frame (x across the cell, y up towards the coil, z along the cell).
"""
from __future__ import annotations

from typing import Any, Iterator
import math

import numpy as np


class Vector3:
    """A class representing a three dimensional vector. Vectors are never mutated after
    construction, so they are safe to share between threads.

    Instance Attributes:
        - x: The x-coordinate of the vector.
        - y: The y-coordinate of the vector.
        - z: The z-coordinate of the vector.

    Representation Invariants:
        - math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)
    """
    x: float
    y: float
    z: float

    def __init__(self, x: float, y: float, z: float) -> None:
        """Initialize a vector object.

        Args:
            - x: The x-coordinate of the vector.
            - y: The y-coordinate of the vector.
            - z: The z-coordinate of the vector.
        """
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            raise ValueError(f'vector components must be finite, got ({x}, {y}, {z})')
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)

    @classmethod
    def from_array(cls, values: Any) -> Vector3:
        """Returns a vector from any length-3 sequence or array.

        >>> Vector3.from_array([1, 2, 3])
        Vector3(1.0, 2.0, 3.0)
        """
        x, y, z = (float(value) for value in values)
        return cls(x, y, z)

    def __add__(self, other: Vector3) -> Vector3:
        """Adds the vector with another vector, returning the resultant vector.

        Args:
            - other: The other vector to be added.
        """
        if not isinstance(other, Vector3):
            return NotImplemented
        return Vector3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Vector3) -> Vector3:
        """Subtracts another vector from this vector, returning the resultant vector.

        Args:
            - other: The other vector to be subtracted.
        """
        if not isinstance(other, Vector3):
            return NotImplemented
        return Vector3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, other: float) -> Vector3:
        """Scales the vector by a number.

        Args:
            - other: The scale factor.
        """
        if not isinstance(other, (int, float)):
            return NotImplemented
        return Vector3(self.x * other, self.y * other, self.z * other)

    def __truediv__(self, other: float) -> Vector3:
        if not isinstance(other, (int, float)):
            return NotImplemented
        return Vector3(self.x / other, self.y / other, self.z / other)

    def __eq__(self, other: Any) -> bool:
        """Returns whether the other vector has exactly the same components. Equal vectors
        hash equally, so vectors can key dictionaries and caches.

        Args:
            - other: The object to be compared to.
        """
        if not isinstance(other, Vector3):
            return NotImplemented
        return self.tuple() == other.tuple()

    def __hash__(self) -> int:
        return hash(self.tuple())

    def __iter__(self) -> Iterator[float]:
        return iter(self.tuple())

    def __repr__(self) -> str:
        """Returns text representation of this vector."""
        return f'Vector3({self.x}, {self.y}, {self.z})'

    def tuple(self) -> tuple[float, float, float]:
        """Returns the vector as a tuple of three floats."""
        return self.x, self.y, self.z

    def array(self) -> np.ndarray:
        """Returns the vector as a numpy array of shape (3,)."""
        return np.array(self.tuple())

    def dot(self, other: Vector3) -> float:
        """Returns the dot product with another vector.

        >>> Vector3(1, 2, 3).dot(Vector3(4, 5, 6))
        32.0
        """
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: Vector3) -> Vector3:
        """Returns the cross product self x other.

        >>> Vector3(1, 0, 0).cross(Vector3(0, 1, 0))
        Vector3(0.0, 0.0, 1.0)
        """
        return Vector3(self.y * other.z - self.z * other.y,
                       self.z * other.x - self.x * other.z,
                       self.x * other.y - self.y * other.x)

    def norm(self) -> float:
        """Returns the Euclidean length of the vector.

        >>> Vector3(3, 4, 0).norm()
        5.0
        """
        return math.sqrt(self.dot(self))

    def unit(self) -> Vector3:
        """Returns the vector scaled to unit length.

        Preconditions:
            - self.norm() > 0
        """
        return self / self.norm()


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['math', 'numpy'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
