"""Multi-view fuzzy c-means with minimax-learned view weights."""

from .baselines import FcmResult, fcm_concatenated, fcm_fit
from .dataset import (
    DatasetError,
    MultiViewDataset,
    Normalization,
    ViewMatrix,
    concatenate_views,
    l1_normalize_rows,
    load_manifest,
    normalize,
    normalize_unit_variance_inv_sqrt_dim,
    write_manifest,
)
from .distance import DistanceMeasure, squared_distance
from .initialization import InitialState, init_view_weights, initial_state, select_initial_centroids
from .metrics import EvaluationReport, accuracy, contingency, evaluate, f_measure, nmi
from .solver import ClusteringResult, NumericalError, SolverConfig, fit, harden
from .synth import SynthSpec, generate

__version__ = "0.1.0"
