"""emiscan

Module with the physical constants and instrument defaults of the raster-scanned
magnetometer, to be used in other modules. Lengths are in metres, times in seconds,
fields in tesla and angular frequencies in rad/s unless the name says otherwise.
"""
import math

from scipy.constants import mu_0

from vector import Vector3


TWO_PI = 2 * math.pi
MU_0 = mu_0

# Axes
X_AXIS = Vector3(1.0, 0.0, 0.0)
Y_AXIS = Vector3(0.0, 1.0, 0.0)
Z_AXIS = Vector3(0.0, 0.0, 1.0)
SENSING_AXIS = Y_AXIS
PLATE_NORMAL = Y_AXIS

# Vapour Cell Constants
CELL_WIDTH = 60e-3
CELL_LENGTH = 60e-3
CELL_HEIGHT = 20e-3
CELL_CENTER = Vector3(0.0, 0.0, 0.0)
DIFFUSION_LENGTH = 1.95e-3
PUMP_DIAMETER = 3.4e-3
PROBE_DIAMETER = 2.5e-3
IMAGING_PLANE_Y = 6e-3

# RF Coil Constants
COIL_SIDE = 55e-3
COIL_HEIGHT_ABOVE_CELL = 25e-3
COIL_CENTER = Vector3(0.0, CELL_HEIGHT / 2 + COIL_HEIGHT_ABOVE_CELL, 0.0)
COIL_CURRENT = 1.0
ON_CONDUCTOR_DISTANCE = 1e-9

# Bias Field and Resonance Constants
GYROMAGNETIC_SLOPE = TWO_PI * 7.0e9
NOMINAL_BIAS = 1.5e-5
LARMOR_OMEGA = GYROMAGNETIC_SLOPE * NOMINAL_BIAS
DRIVE_OMEGA = TWO_PI * 105e3
LINEWIDTH = TWO_PI * 2.4e3
MAX_BIAS_SHIFT = TWO_PI * 2e3
IMAGING_AREA_SIDE = 40e-3
SHIFT_RADIUS = math.sqrt(2) * IMAGING_AREA_SIDE / 2
SHIFT_SIGN = 1
CORNER_AMPLITUDE_RATIO = 0.55
PIXEL_AMPLITUDE = 1.0

# Target Constants
COPPER_CONDUCTIVITY = 5.96e7
PLATE_SIDE = 25e-3
PLATE_THICKNESS = 1e-3
PLATE_HEIGHT_Y = 12e-3
DEFAULT_MESH_PITCH = 2.5e-3
LOOP_WIRE_FRACTION = 0.25

# Acousto-Optic Deflector and Lens Constants
ACOUSTIC_SPEED = 650.0
REFRACTIVE_INDEX = 2.26
WAVELENGTH = 780e-9
AOD_CENTER_FREQ = 100e6
AOD_FREQ_SPAN = 50e6
AOD_RISE_TIME = 8e-6
FOCAL_LENGTH = 1.0

# Pixel Grid Constants
GRID_SIZE = 35
GRID_STEP = 1e-3

# Lock-In Constants
SAMPLE_RATE = 2e6
LP_TIME_CONSTANT = 3e-3
LP_ORDER = 1
SWEEP_DWELL = 15e-3
FAST_DWELL = 40e-3
SWEEP_POINTS = 50
SWEEP_HALF_SPAN_GAMMAS = 5
NOISE_RMS = 0.05
MASTER_SEED = 45

# Fitting Constants
INITIAL_DAMPING = 1e-3
DAMPING_UP = 10.0
DAMPING_DOWN = 10.0
PARAM_TOLERANCE = 1e-8
MAX_ITERATIONS = 200
MIN_SWEEP_POINTS = 5
FIT_SIGNIFICANCE = 5.0

# Timing Constants
SOFTWARE_CONTROL_LATENCY = 0.1
HARDWARE_CONTROL_LATENCY = 1e-6
MECHANICAL_STEER_TIME = 1.0

# Imaging Constants
SMOOTH_RADIUS = 1
MODE_CODES = {'full': 0, 'fast': 1}


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['math', 'scipy.constants', 'vector'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
