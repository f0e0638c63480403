import os

OUTPUT_DIR = os.environ.get('TOBOGGAN_OUTPUT_DIR', os.getcwd())

# contour sampling
BASE_STEP = 0.05
MAX_JUMP = 0.05
MAX_DEPTH = 40
CRITICAL_GUARD = 1e-6

# classification
GRAZING_TOLERANCE = 1e-12
RAY_TILT = 1e-6
MAX_DESCRIPTOR_HALF_LENGTH = 6

# shooting
POLE_TOLERANCE = 1e-3
SHOOTING_S_MAX = 6.0
# |x| reached by the default integration range along the tails
SHOOTING_X_REACH = 6.0
SHOOTING_STEP = 0.01
LOCAL_TOLERANCE = 1e-10
MIN_STEP = 1e-9
TOL_ENERGY = 1e-9
TOL_RESIDUAL = 1e-6
MAX_ITER = 50
# roots whose tails are not classically forbidden depend on the cut-off
MIN_TAIL_DECAY = 0.5

MAX_CRITICAL_M = 64
CRITICAL_DIGITS = 20
CSV_DIGITS = 17

# figure id: (kappa, epsilon expression, descriptor named in the caption)
FIGURE_PRESETS = {
    1: (3, '0.25', 'LR'),
    2: (3, 'crit(1,1)-0.0005', 'LR'),
    3: (3, 'crit(1,1)-0.0001', 'LR'),
    4: (3, 'crit(1,1)+0.0001', 'RL'),
    5: (3, '0.4', 'RL'),
    6: (5, 'crit(2,1)-0.0005', 'LLRR'),
    7: (5, 'crit(2,1)+0.0005', 'RRLL'),
    8: (5, 'crit(2,2)-0.005', 'RRLL'),
    9: (5, 'crit(2,2)+0.005', 'RLRL'),
}
FIGURE_S_RANGE = 8.0
