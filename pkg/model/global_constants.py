# This file contains all the global constants

# Cache and machine defaults (words)
DEFAULT_M = 2 ** 14
DEFAULT_B = 64

# SPMS parameters
DEFAULT_C = 6
BASE_THRESHOLD = 24

# Cost model defaults (ticks)
DEFAULT_MISS_COST = 8
DEFAULT_STEAL_COST = 32
DEFAULT_PROCESSORS = 1

# Disciplines under audit
BUFFERED_WRITE_LIMIT = 4
FRAME_WORDS = 2
SHARED_BLOCK_LIMIT = 4
MISALIGNMENT_LIMIT = 4
SCRATCH_DELAY_FACTOR = 16
STACK_PATH_FACTOR = 4
STACK_DELAY_FACTOR = 16

# Frozen bands
BAND_SPREAD = 3                 # max / min of the work and span ratios over an n sweep
MISS_BAND_FACTOR = 2            # miss ratio within this factor of the calibration cell
MISS_CALIBRATION_N = 2 ** 14
SMALL_INPUT_MISS_FACTOR = 4     # Q_seq <= 4 n / B for B^2 <= n <= M
STEAL_MISS_FACTOR = 8           # C_R: R(S) <= C_R S M / B
FS_TOTAL_FACTOR = 32            # C_F: F <= C_F S B
BLOCK_DELAY_FACTOR = 32         # C_f: max block delay <= C_f B
STEAL_COUNT_FACTOR = 4          # S <= 4 p (span + b / s B log n / log B)
BLOCK_DELAY_SLOPE = 2.5         # max block delay growth per doubling of B

# Partition window
WEAK_WINDOW_FACTOR = 3

# Report schema
SCHEMA_VERSION = 1

# Environment variable enabling trace dumps
TRACE_DIR_ENV = 'SPMS_TRACE_DIR'

# Exit codes
EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
