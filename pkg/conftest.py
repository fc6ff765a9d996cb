"""emiscan

Shared pytest fixtures. The modules live at the repository root, so the root is put on the
import path for the tests directory.
"""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from beamsteer import PixelGrid  # noqa: E402
from fields import default_plate, right_triangle_outline  # noqa: E402
from imaging import FullSweep, ScanScenario  # noqa: E402
from lockin import NoiseSpec  # noqa: E402


@pytest.fixture
def small_grid() -> PixelGrid:
    """A 5 x 5 pixel grid at 4 mm steps, centred on the cell axis."""
    return PixelGrid.centered(5, 5, 4e-3)


@pytest.fixture
def square_plate():
    """The default 25 mm copper square."""
    return default_plate()


@pytest.fixture
def triangle_plate():
    """A copper right-angled triangle with 25 mm legs."""
    return default_plate(right_triangle_outline(), name='cu_triangle')


@pytest.fixture
def quick_scenario(small_grid, square_plate) -> ScanScenario:
    """A noiseless, analytic scan of the copper square on the small grid."""
    return ScanScenario(targets=(square_plate,), grid=small_grid, noise=NoiseSpec(0.0, 7),
                        mode=FullSweep(20), analytic=True)
