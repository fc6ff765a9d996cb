"""emiscan

Module containing the electromagnetic forward model: the primary field of the square RF
coil, the eddy-current response of meshed conductive plates, and the secondary field
those currents radiate back into the vapour cell.

The eddy model treats each mesh cell as an independent current loop (no mutual
inductance between cells). Each loop's resistance and inductance are evaluated at the
mesh's loop scale rather than its pitch; the induced moment of a cell is its
loop current times its own area, so refining the pitch at a fixed loop scale only
refines the quadrature of the same moment density.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union
import math

import numpy as np

from emi_errors import DegenerateOutline, NonConductive, PointOnConductor, TooCloseToSource
from helpers import points_in_polygon, polygon_area, polygon_is_simple
from vector import Vector3
import emi_constants as const


@dataclass(frozen=True)
class PhasorField:
    """A complex magnetic field amplitude at the RF drive frequency, at one point.

    Instance Attributes:
        - re: The in-phase part of the field, in tesla.
        - im: The quadrature part of the field, in tesla.
        - omega: The angular frequency of the phasor, in rad/s.

    Representation Invariants:
        - self.omega > 0
    """
    re: Vector3
    im: Vector3
    omega: float

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f'phasor frequency must be positive, got {self.omega}')

    @classmethod
    def from_complex(cls, values: np.ndarray, omega: float) -> PhasorField:
        """Returns a phasor from a complex array of shape (3,)."""
        values = np.asarray(values, dtype=complex)
        return cls(Vector3.from_array(values.real), Vector3.from_array(values.imag), omega)

    def complex_array(self) -> np.ndarray:
        """Returns the phasor as a complex array of shape (3,)."""
        return self.re.array() + 1j * self.im.array()

    def component(self, axis: Vector3) -> complex:
        """Returns the complex amplitude of the field projected on axis.

        Args:
            - axis: The unit vector to project on.
        """
        return complex(self.re.dot(axis), self.im.dot(axis))

    def magnitude(self) -> float:
        """Returns |re + i im|, the Hermitian norm of the phasor."""
        return math.sqrt(self.re.dot(self.re) + self.im.dot(self.im))

    def __add__(self, other: PhasorField) -> PhasorField:
        return PhasorField(self.re + other.re, self.im + other.im, self.omega)


@dataclass(frozen=True)
class CoilSpec:
    """A square RF coil driven with a sinusoidal current.

    Instance Attributes:
        - side_length: The side of the square, in metres.
        - center: The centre of the square.
        - normal: The unit normal; positive current circulates counterclockwise about it.
        - current_amplitude: The current amplitude, in amperes.
        - drive_omega: The drive angular frequency, in rad/s.

    Representation Invariants:
        - self.side_length > 0
        - abs(self.normal.norm() - 1) <= 1e-12
    """
    side_length: float = const.COIL_SIDE
    center: Vector3 = const.COIL_CENTER
    normal: Vector3 = const.Y_AXIS
    current_amplitude: float = const.COIL_CURRENT
    drive_omega: float = const.DRIVE_OMEGA

    def __post_init__(self) -> None:
        if not self.side_length > 0:
            raise ValueError(f'coil side must be positive, got {self.side_length}')
        if abs(self.normal.norm() - 1) > 1e-12:
            raise ValueError(f'coil normal must be a unit vector, got {self.normal}')
        if not self.drive_omega > 0:
            raise ValueError(f'drive frequency must be positive, got {self.drive_omega}')

    def corners(self) -> np.ndarray:
        """Returns the four corners, ordered counterclockwise about the normal, as an
        array of shape (4, 3)."""
        n = self.normal
        reference = const.X_AXIS if abs(n.dot(const.X_AXIS)) < 0.9 else const.Z_AXIS
        u = (reference - n * reference.dot(n)).unit()
        v = n.cross(u)
        half = self.side_length / 2
        c, u, v = self.center.array(), u.array(), v.array()
        return np.array([c + half * (-u - v), c + half * (u - v),
                         c + half * (u + v), c + half * (-u + v)])


@dataclass(frozen=True)
class Material:
    """The electrical and magnetic characteristics of a target.

    Instance Attributes:
        - conductivity: The conductivity, in S/m.
        - relative_permeability: The relative permeability.

    Representation Invariants:
        - self.conductivity >= 0
        - self.relative_permeability > 0
    """
    conductivity: float = const.COPPER_CONDUCTIVITY
    relative_permeability: float = 1.0

    def __post_init__(self) -> None:
        if not self.conductivity >= 0:
            raise ValueError(f'conductivity must be non-negative, got {self.conductivity}')
        if not self.relative_permeability > 0:
            raise ValueError('relative permeability must be positive, '
                             f'got {self.relative_permeability}')


@dataclass(frozen=True)
class TargetPlate:
    """A flat conductive plate lying in a horizontal plane between the coil and the cell.

    Instance Attributes:
        - outline: The polygon of the plate in the x-z plane, as (x, z) vertices in metres.
        - thickness: The plate thickness, in metres.
        - height_y: The y-coordinate of the plate's plane.
        - material: The plate's material.
        - name: A label used in logs and reports.

    Representation Invariants:
        - len(self.outline) >= 3
        - self.thickness > 0
        - the outline is a simple polygon
    """
    outline: tuple[tuple[float, float], ...]
    thickness: float = const.PLATE_THICKNESS
    height_y: float = const.PLATE_HEIGHT_Y
    material: Material = Material()
    name: str = 'plate'

    def __post_init__(self) -> None:
        outline = tuple((float(x), float(z)) for x, z in self.outline)
        object.__setattr__(self, 'outline', outline)
        if len(outline) < 3:
            raise DegenerateOutline(f'outline needs at least 3 vertices, got {len(outline)}')
        if not self.thickness > 0:
            raise ValueError(f'plate thickness must be positive, got {self.thickness}')
        if not polygon_is_simple(outline):
            raise DegenerateOutline(f'outline of {self.name!r} intersects itself')


@dataclass(frozen=True)
class LoopCell:
    """One square current loop of an eddy mesh.

    Instance Attributes:
        - center: The centre of the loop.
        - area: The area of plate the loop stands for, in square metres.
        - resistance: The loop resistance, in ohms (infinite for an insulator).
        - self_inductance: The loop inductance, in henries.
        - induced_moment: The complex magnetic moment along the plate normal, in A m^2.

    Representation Invariants:
        - self.area > 0
        - self.resistance > 0
        - self.self_inductance > 0
    """
    center: Vector3
    area: float
    resistance: float
    self_inductance: float
    induced_moment: complex = 0j


@dataclass(frozen=True)
class EddyMesh:
    """A discretised plate, as independent current loops.

    Instance Attributes:
        - cells: The loops of the mesh.
        - cell_pitch: The side of each square cell, in metres.
        - loop_scale: The loop side at which each cell's R and L were evaluated.
        - omega: The frequency of the induced moments, in rad/s.
        - normal: The plate normal shared by every loop.

    Representation Invariants:
        - self.cell_pitch > 0
    """
    cells: tuple[LoopCell, ...]
    cell_pitch: float
    loop_scale: float = const.DEFAULT_MESH_PITCH
    omega: float = const.DRIVE_OMEGA
    normal: Vector3 = const.PLATE_NORMAL

    def __post_init__(self) -> None:
        object.__setattr__(self, 'cells', tuple(self.cells))
        if not self.cell_pitch > 0:
            raise ValueError(f'mesh pitch must be positive, got {self.cell_pitch}')

    def centers(self) -> np.ndarray:
        """Returns the cell centres as an array of shape (N, 3)."""
        return np.array([cell.center.tuple() for cell in self.cells]).reshape(-1, 3)

    def moments(self) -> np.ndarray:
        """Returns the induced moments as a complex array of shape (N,)."""
        return np.array([cell.induced_moment for cell in self.cells], dtype=complex)


FieldSources = Optional[Union[EddyMesh, Sequence[EddyMesh]]]


def _as_points(points: np.ndarray) -> np.ndarray:
    return np.atleast_2d(np.asarray(points, dtype=float)).reshape(-1, 3)


def coil_field_array(coil: CoilSpec, points: np.ndarray) -> np.ndarray:
    """Returns the Biot-Savart field of the coil at each point, as a real array of shape
    (N, 3). The coil phasor has phase zero, so the field is purely real.

    Each side is a finite straight segment A -> B, whose field at P is
    mu0 I / 4 pi * (l x r1) / |l x r1|^2 * (l . r1/|r1| - l . r2/|r2|), with l = B - A,
    r1 = P - A and r2 = P - B.

    Args:
        - coil: The coil producing the field.
        - points: The field points, as an array of shape (N, 3).
    """
    points = _as_points(points)
    corners = coil.corners()
    total = np.zeros_like(points)

    for start, end in zip(corners, np.roll(corners, -1, axis=0)):
        length = end - start
        r1 = points - start
        r2 = points - end

        t = np.clip(r1 @ length / np.dot(length, length), 0.0, 1.0)
        gap = np.linalg.norm(r1 - t[:, None] * length, axis=1)
        if np.any(gap <= const.ON_CONDUCTOR_DISTANCE):
            raise PointOnConductor(f'point within {const.ON_CONDUCTOR_DISTANCE} m of the coil')

        perp = np.cross(length, r1)
        perp_sq = np.einsum('ij,ij->i', perp, perp)
        span = r1 @ length / np.linalg.norm(r1, axis=1) - r2 @ length / np.linalg.norm(r2, axis=1)
        # Points on the segment's line but beyond its ends get no field from it.
        with np.errstate(divide='ignore', invalid='ignore'):
            factor = np.where(perp_sq > 0, span / perp_sq, 0.0)
        total += perp * factor[:, None]

    return const.MU_0 * coil.current_amplitude / (4 * math.pi) * total


def coil_field(coil: CoilSpec, point: Vector3) -> PhasorField:
    """Returns the primary field of the coil at the point.

    Args:
        - coil: The coil producing the field.
        - point: The field point.

    >>> coil = CoilSpec(0.055, Vector3(0, 0, 0), Vector3(0, 1, 0), 1.0)
    >>> round(coil_field(coil, Vector3(0, 0, 0)).re.y * 1e5, 3)
    2.057
    """
    values = coil_field_array(coil, point.array())[0]
    return PhasorField(Vector3.from_array(values), Vector3(0.0, 0.0, 0.0), coil.drive_omega)


def skin_depth(material: Material, omega: float) -> float:
    """Returns the skin depth sqrt(2 / (mu0 mu_r sigma omega)), in metres.

    Args:
        - material: The conducting material.
        - omega: The angular frequency of the field.

    >>> round(skin_depth(Material(5.96e7), 2 * math.pi * 105e3) * 1e6)
    201
    """
    if material.conductivity == 0:
        raise NonConductive('skin depth is undefined for a non-conductive material')
    if not omega > 0:
        raise ValueError(f'frequency must be positive, got {omega}')
    return math.sqrt(2 / (const.MU_0 * material.relative_permeability
                          * material.conductivity * omega))


def loop_resistance(material: Material, thickness: float, side: float, omega: float) -> float:
    """Returns the resistance of a square loop of the given side cut from the plate. The
    loop's wire is side/4 wide and as thick as the smaller of the plate and the skin depth.

    Args:
        - material: The plate material.
        - thickness: The plate thickness.
        - side: The loop side.
        - omega: The drive frequency.
    """
    if material.conductivity == 0:
        return math.inf
    effective_thickness = min(thickness, skin_depth(material, omega))
    cross_section = effective_thickness * side * const.LOOP_WIRE_FRACTION
    return 4 * side / (material.conductivity * cross_section)


def loop_inductance(side: float) -> float:
    """Returns the self-inductance mu0 s (ln(8 s / w) - 2) of a square loop of side s and
    wire width w = s / 4.

    Args:
        - side: The loop side.
    """
    width = side * const.LOOP_WIRE_FRACTION
    return const.MU_0 * side * (math.log(8 * side / width) - 2)


def mesh_plate(plate: TargetPlate, pitch: float = const.DEFAULT_MESH_PITCH,
               loop_scale: float = const.DEFAULT_MESH_PITCH,
               omega: float = const.DRIVE_OMEGA) -> EddyMesh:
    """Returns the plate discretised into square cells of side pitch whose centres fall
    strictly inside the outline. Cells sit on the lattice bbox_min + pitch/2 + k pitch.

    Args:
        - plate: The plate to mesh.
        - pitch: The cell side.
        - loop_scale: The loop side for R and L, independent of the quadrature pitch.
        - omega: The frequency at which the skin depth limits the loop thickness.
    """
    if not pitch > 0:
        raise ValueError(f'mesh pitch must be positive, got {pitch}')
    if abs(polygon_area(plate.outline)) <= 0:
        raise DegenerateOutline(f'outline of {plate.name!r} has no area')

    outline = np.array(plate.outline)
    low, high = outline.min(axis=0), outline.max(axis=0)
    if pitch > min(high - low):
        raise DegenerateOutline(f'pitch {pitch} m is larger than plate {plate.name!r}')

    xs = np.arange(low[0] + pitch / 2, high[0], pitch)
    zs = np.arange(low[1] + pitch / 2, high[1], pitch)
    grid_x, grid_z = np.meshgrid(xs, zs, indexing='ij')
    candidates = np.column_stack([grid_x.ravel(), grid_z.ravel()])
    inside = candidates[points_in_polygon(candidates, plate.outline, tolerance=1e-9 * pitch)]
    if len(inside) == 0:
        raise DegenerateOutline(f'no cell of pitch {pitch} m fits inside {plate.name!r}')

    if not loop_scale > 0:
        raise ValueError(f'loop scale must be positive, got {loop_scale}')
    resistance = loop_resistance(plate.material, plate.thickness, loop_scale, omega)
    inductance = loop_inductance(loop_scale)
    cells = tuple(LoopCell(Vector3(x, plate.height_y, z), pitch ** 2, resistance, inductance)
                  for x, z in inside)
    return EddyMesh(cells, pitch, loop_scale, omega)


def induce(mesh: EddyMesh, coil: CoilSpec) -> EddyMesh:
    """Returns the mesh with each cell's moment set by the coil's primary field.

    For each cell, flux = B_normal(center) * loop_scale^2, the loop current is
    -i omega flux / (R + i omega L), and the moment is that current times the cell area.

    Args:
        - mesh: The mesh of the target.
        - coil: The coil driving the eddy currents.
    """
    if not mesh.cells:
        raise DegenerateOutline('cannot induce currents in an empty mesh')

    omega = coil.drive_omega
    b_normal = coil_field_array(coil, mesh.centers()) @ mesh.normal.array()
    flux = b_normal * mesh.loop_scale ** 2

    cells = []
    for cell, cell_flux in zip(mesh.cells, flux):
        if math.isinf(cell.resistance):
            current = 0j
        else:
            current = -1j * omega * cell_flux / complex(cell.resistance,
                                                        omega * cell.self_inductance)
        cells.append(replace(cell, induced_moment=complex(current * cell.area)))

    return replace(mesh, cells=tuple(cells), omega=omega)


def secondary_field_array(mesh: EddyMesh, points: np.ndarray) -> np.ndarray:
    """Returns the summed magnetic-dipole field of the mesh's induced moments at each
    point, as a complex array of shape (N, 3).

    Args:
        - mesh: The induced mesh.
        - points: The field points, as an array of shape (N, 3).
    """
    points = _as_points(points)
    if not mesh.cells:
        return np.zeros(points.shape, dtype=complex)

    offsets = points[:, None, :] - mesh.centers()[None, :, :]
    distance = np.linalg.norm(offsets, axis=2)
    if np.any(distance <= mesh.cell_pitch / 2):
        raise TooCloseToSource(f'point within {mesh.cell_pitch / 2} m of an eddy cell')

    unit = offsets / distance[:, :, None]
    moments = mesh.moments()[None, :, None] * mesh.normal.array()[None, None, :]
    projection = np.sum(unit * moments, axis=2, keepdims=True)
    dipoles = (3 * unit * projection - moments) / distance[:, :, None] ** 3
    return const.MU_0 / (4 * math.pi) * dipoles.sum(axis=1)


def secondary_field(mesh: EddyMesh, point: Vector3) -> PhasorField:
    """Returns the secondary field of the induced mesh at the point.

    Args:
        - mesh: The induced mesh.
        - point: The field point.
    """
    return PhasorField.from_complex(secondary_field_array(mesh, point.array())[0], mesh.omega)


def _meshes(sources: FieldSources) -> list[EddyMesh]:
    if sources is None:
        return []
    if isinstance(sources, EddyMesh):
        return [sources]
    return list(sources)


def total_rf_field_array(coil: CoilSpec, sources: FieldSources, points: np.ndarray) -> np.ndarray:
    """Returns the primary plus secondary field at each point, as a complex array of
    shape (N, 3).

    Args:
        - coil: The coil producing the primary field.
        - sources: None, one induced mesh, or a sequence of induced meshes.
        - points: The field points, as an array of shape (N, 3).
    """
    total = coil_field_array(coil, points).astype(complex)
    for mesh in _meshes(sources):
        total = total + secondary_field_array(mesh, points)
    return total


def total_rf_field(coil: CoilSpec, sources: FieldSources, point: Vector3) -> PhasorField:
    """Returns the field sensed at the point: the coil field plus the field of every
    induced mesh. An absent mesh contributes nothing.

    Args:
        - coil: The coil producing the primary field.
        - sources: None, one induced mesh, or a sequence of induced meshes.
        - point: The field point.
    """
    values = total_rf_field_array(coil, sources, point.array())[0]
    return PhasorField.from_complex(values, coil.drive_omega)


def square_outline(side: float = const.PLATE_SIDE,
                   center: tuple[float, float] = (0.0, 0.0)) -> tuple[tuple[float, float], ...]:
    """Returns the counterclockwise outline of an axis-aligned square.

    >>> square_outline(2.0)
    ((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0))
    """
    half = side / 2
    x, z = center
    return ((x - half, z - half), (x + half, z - half), (x + half, z + half), (x - half, z + half))


def right_triangle_outline(leg: float = const.PLATE_SIDE,
                           center: tuple[float, float] = (0.0, 0.0)
                           ) -> tuple[tuple[float, float], ...]:
    """Returns the outline of a right-angled triangle with equal legs along +x and +z,
    whose bounding box is centred on center.

    >>> right_triangle_outline(2.0)
    ((-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0))
    """
    half = leg / 2
    x, z = center
    return ((x - half, z - half), (x + half, z - half), (x - half, z + half))


def default_plate(outline: Optional[tuple[tuple[float, float], ...]] = None,
                  name: str = 'cu_square') -> TargetPlate:
    """Returns the 25 x 25 x 1 mm copper square of the default scenario, or a copper
    plate with the given outline."""
    return TargetPlate(outline if outline is not None else square_outline(), name=name)


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['dataclasses', 'math', 'numpy', 'emi_constants', 'emi_errors',
                          'helpers', 'vector'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
