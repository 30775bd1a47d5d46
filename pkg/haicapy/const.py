"""
This module contains all common constants used by this library.
"""

# Project metadata
PROJECT_NAME = 'haicapy'
PROJECT_DESCRIPTION = "Hierarchical active inference agents with belief " \
                      "resonance for cooperative kitchen tasks."
PROJECT_VERSION = '0.1.0'
__version__ = PROJECT_VERSION

# Numerical floors used by the belief engine
PROB_EPSILON = 1e-12
VARIANCE_FLOOR = 1e-6
NORMALIZATION_TOLERANCE = 1e-9
TIE_TOLERANCE = 1e-12

# Kalman gains for prediction / evidence
DEFAULT_K_P = 0.5
DEFAULT_K_E = 0.5

# Satisficing theory of mind
DEFAULT_TOM_ALPHA = 0.9
DEFAULT_TOM_BETA = 2.0
DEFAULT_TOM_MU = 0.1

# Intention punishment
PUNISH_FACTOR = 0.5
PUNISH_FLOOR = 0.05
PUNISH_DECAY = 0.1

# Affordance shaping magnitudes
AFFORDANCE_SLACK = 0.05
HANDOVER_DAMPING = 0.25
DROP_DAMPING = 0.5
COOKING_POT_WEIGHT = 0.5

# Soup domain dynamics
POT_CAPACITY = 3
COOK_TIME_ONION = 20
COOK_TIME_TOMATO = 15
REWARD_ONION_SOUP = 20
REWARD_TOMATO_SOUP = 15
ORDER_COUNT = 2

# Salad domain dynamics
REWARD_SALAD_TASK = 1.0

# Episode lengths
MAX_STEPS_SOUP = 400
MAX_STEPS_SALAD = 100

# Sweep defaults
DEFAULT_SP_GRID = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_EPISODES_PER_CELL = 20
DEFAULT_SEED = 0

# Soup layouts studied in the sweeps, in presentation order
SOUP_LAYOUTS = ('asymmetric', 'spacey', 'cramped', 'ring', 'forced')

# Salad layouts; each is shipped once per task
SALAD_LAYOUTS = ('full_divider', 'partial_divider', 'open_divider')

# Layout file markers
LAYOUT_SUFFIX = '.layout'
LAYOUT_HEADER_SEPARATOR = ';'

# Output file names
RECORDS_FILE = 'records.csv'
TIMINGS_FILE = 'timings.csv'
MANIFEST_FILE = 'manifest'
HEATMAP_PREFIX = 'heatmap_'
HEATMAP_SUFFIX = '.tsv'
TRACE_PREFIX = 'episode_'
TRACE_SUFFIX = '.jsonl'
