"""emiscan

Module containing useful helper functions, to be used in other modules. Polygons are
sequences of (x, z) vertices in metres.
"""
from typing import Sequence

import numpy as np


def clamp(number: float, min_val: float, max_val: float) -> float:
    """Returns the value of number clamped between min_val and max_val.

    Args:
        - number: The number to be clamped.
        - min_val: The minimum value of the returned number.
        - max_val: The maximum value of the returned number.

    Preconditions:
        - min_val <= max_val

    >>> clamp(0.0, 1.0, 2.0)
    1.0
    >>> clamp(5.0, 1.0, 2.0)
    2.0
    >>> clamp(1.5, 1.0, 2.0)
    1.5
    """
    return max(min_val, min(max_val, number))


def polygon_area(vertices: Sequence[tuple[float, float]]) -> float:
    """Returns the signed shoelace area of the polygon, positive when counterclockwise.

    Args:
        - vertices: The polygon's vertices in order.

    >>> polygon_area([(0, 0), (1, 0), (1, 1), (0, 1)])
    1.0
    >>> polygon_area([(0, 0), (0, 1), (1, 1), (1, 0)])
    -1.0
    """
    points = np.asarray(vertices, dtype=float)
    x, z = points[:, 0], points[:, 1]
    return float(0.5 * (np.dot(x, np.roll(z, -1)) - np.dot(z, np.roll(x, -1))))


def _orientation(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Returns the sign of the turn a -> b -> c."""
    return float(np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])))


def _segments_cross(p1: np.ndarray, p2: np.ndarray, q1: np.ndarray, q2: np.ndarray) -> bool:
    """Returns whether the closed segments p1p2 and q1q2 intersect."""
    d1 = _orientation(q1, q2, p1)
    d2 = _orientation(q1, q2, p2)
    d3 = _orientation(p1, p2, q1)
    d4 = _orientation(p1, p2, q2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on_segment(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> bool:
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and \
            min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return (d1 == 0 and on_segment(q1, q2, p1)) or (d2 == 0 and on_segment(q1, q2, p2)) or \
        (d3 == 0 and on_segment(p1, p2, q1)) or (d4 == 0 and on_segment(p1, p2, q2))


def polygon_is_simple(vertices: Sequence[tuple[float, float]]) -> bool:
    """Returns whether no two non-adjacent edges of the polygon intersect.

    Args:
        - vertices: The polygon's vertices in order.

    >>> polygon_is_simple([(0, 0), (1, 0), (1, 1), (0, 1)])
    True
    >>> polygon_is_simple([(0, 0), (1, 1), (1, 0), (0, 1)])
    False
    """
    points = np.asarray(vertices, dtype=float)
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            # Adjacent edges share a vertex by construction.
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]):
                return False
    return True


def distance_to_edges(points: np.ndarray, vertices: Sequence[tuple[float, float]]) -> np.ndarray:
    """Returns the distance from each 2-D point to the nearest polygon edge.

    Args:
        - points: Array of shape (N, 2).
        - vertices: The polygon's vertices in order.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    polygon = np.asarray(vertices, dtype=float)
    best = np.full(len(points), np.inf)
    for start, end in zip(polygon, np.roll(polygon, -1, axis=0)):
        edge = end - start
        t = np.clip((points - start) @ edge / np.dot(edge, edge), 0.0, 1.0)
        nearest = start + t[:, None] * edge
        best = np.minimum(best, np.linalg.norm(points - nearest, axis=1))
    return best


def points_in_polygon(points: np.ndarray, vertices: Sequence[tuple[float, float]],
                      tolerance: float = 0.0) -> np.ndarray:
    """Returns a boolean mask of the points strictly inside the polygon. Points within
    tolerance of an edge count as outside.

    Args:
        - points: Array of shape (N, 2).
        - vertices: The polygon's vertices in order.
        - tolerance: The distance from an edge below which a point is outside.

    >>> points_in_polygon(np.array([[0.5, 0.5], [2.0, 0.5]]), [(0, 0), (1, 0), (1, 1), (0, 1)])
    array([ True, False])
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    polygon = np.asarray(vertices, dtype=float)
    x, z = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)

    # Even-odd ray casting along +x.
    for start, end in zip(polygon, np.roll(polygon, -1, axis=0)):
        straddles = (start[1] > z) != (end[1] > z)
        with np.errstate(divide='ignore', invalid='ignore'):
            crossing = start[0] + (z - start[1]) * (end[0] - start[0]) / (end[1] - start[1])
        inside ^= straddles & (x < crossing)

    return inside & (distance_to_edges(points, vertices) > tolerance)


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['numpy'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
