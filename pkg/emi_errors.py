"""emiscan

Module with the exceptions raised across the simulator. Every error is a ValueError, so
callers that only care about bad input can catch that.
"""


class EmiError(ValueError):
    """Base class of every error raised by the simulator."""


class PointOnConductor(EmiError):
    """A field point lies on a coil segment."""


class NonConductive(EmiError):
    """A skin depth was requested for an insulator."""


class DegenerateOutline(EmiError):
    """A target outline has no area, or meshes to no cells."""


class TooCloseToSource(EmiError):
    """A field point lies inside the exclusion radius of an eddy cell."""


class VoxelOutsideCell(EmiError):
    """A sensor voxel centre lies outside the vapour cell."""


class InvalidDriveConfig(EmiError):
    """A drive configuration breaks its invariants."""


class NyquistViolation(EmiError):
    """The sample rate cannot represent the RF drive."""


class LengthMismatch(EmiError):
    """A time series does not match the drive configuration's record length."""


class UnphysicalOrder(EmiError):
    """A diffraction order has no Bragg angle."""


class FrequencyOutOfRange(EmiError):
    """An AOD drive frequency is outside the deflector's band."""


class OutsideCell(EmiError):
    """A beam position falls outside the cell aperture."""


class GridExceedsSpan(EmiError):
    """A pixel grid needs drive frequencies outside the AOD span."""


class DegenerateSweep(EmiError):
    """A sweep record is too short or too narrow to fit."""


class UndefinedPhase(EmiError):
    """Both quadratures vanish, so the phase has no value."""


class GridMismatch(EmiError):
    """Two images were sampled on different pixel grids."""


class ScenarioError(EmiError):
    """A scenario file or scenario value is invalid."""


class ImageFormatError(EmiError):
    """An image or sweep file could not be parsed."""


class BackgroundRequired(EmiError):
    """Fast single-point imaging was requested without a background image."""


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import doctest
    doctest.testmod()
