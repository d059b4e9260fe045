"""
System constants for bandgate.
"""

# Selection methods
METHODS = ('chbs', 'ehbs', 'all-bands', 'random-k', 'variance-k')
OPTIMIZERS = ('adam', 'sgd')
CONCRETE_INITS = ('segmented', 'plain', 'seeded')

# Reported hyperparameters for the stochastic gates
EHBS_SIGMA = 0.5
EHBS_MU0 = 0.5
EHBS_LAMBDA0 = 0.5
EHBS_PHASE2_FRACTION = 0.2

# Reported hyperparameters for the concrete selector
REMOTE_SENSING_CONCRETE = {'tau0': 1.5, 'alpha': 0.99998, 'beta': 0.15}
DRIVING_CONCRETE = {'tau0': 8.5, 'alpha': 0.9999, 'beta': 0.15}

# Training defaults
DEFAULT_BATCH_SIZE = 256
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_EPOCHS = 30
DEFAULT_HIDDEN = (64, 32)
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8

# Numeric floors
GUMBEL_U_FLOOR = 1e-300
SEGMENT_OFFSET_FRACTION = 0.5   # in-segment offset as a fraction of the Xavier bound
SEEDED_BOOST_FRACTION = 2.0     # prior-band boost as a fraction of the Xavier bound

# Checkpoint format
CHECKPOINT_MAGIC = b"BGNET1"

# CSV layouts
PROGRESSION_COLUMNS = ['epoch', 'loss', 'val_oa', 'selected_bands']
METRIC_COLUMNS = ['method', 'k', 'fold', 'metric', 'value']
SELECTION_COLUMNS = ['method', 'k', 'fold', 'selected_bands']
FOLD_METRICS = (
    'oa', 'aa', 'kappa', 'mean_iou', 'overall_iou', 'weighted_iou',
    'mean_precision', 'mean_recall', 'distinct_bands',
)
AUC_ROW_K = 'all'
AUC_ROW_FOLD = 'mean'
AUC_METRIC = 'bands_auc'
FLOAT_FORMAT = '%.17g'

# SVG canvas
SVG_WIDTH = 800
SVG_HEIGHT = 500
SVG_MARGIN_FRACTION = 0.1
SVG_COLORS = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
]

# Exit codes
EXIT_CODES = {
    'SUCCESS': 0,
    'RUNTIME_FAILURE': 1,
    'USAGE_ERROR': 2,
}

# Verification
FD_STEP = 1e-5
FD_ABSOLUTE_FLOOR = 1e-8
GRADIENT_TOLERANCE = 1e-5
