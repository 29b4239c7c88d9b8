"""Decision support for TBM thrust/torque control parameters.

Learns rock-machine surrogate models (penetration rate, cutter life)
from tunneling records and recommends the thrust/torque pair minimizing
a cutter-plus-schedule cost over a bounded grid.
"""

from .bundle import ModelBundle, load_model, save_model, train_model_bundle
from .decision import CostParams, CostSurface, GridSpec, Recommendation, cost, cost_surface, optimize
from .domain import (MachineSetting, RockMassState, SieveAnalysis, TunnelingRecord,
                     WearInterval, classify_muck_geometry, coarseness_index,
                     cutter_life_from_wear, mean_grain_size)
from .preprocess import PreprocessorState, fit_preprocessor, kfold_split, one_hot, pearson_matrix, transform
from .sabpnn import (EvalReport, NetworkArch, NetworkParams, TrainConfig, cross_validate,
                     evaluate, forward, gd_train, sa_init, train_sa_bpnn)
from .synth import GroundTruth, ScenarioSpec, generate_dataset, replicate_field_test

__version__ = "0.1.0"

__all__ = [
    "CostParams", "CostSurface", "EvalReport", "GridSpec", "GroundTruth",
    "MachineSetting", "ModelBundle", "NetworkArch", "NetworkParams",
    "PreprocessorState", "Recommendation", "RockMassState", "ScenarioSpec",
    "SieveAnalysis", "TrainConfig", "TunnelingRecord", "WearInterval",
    "classify_muck_geometry", "coarseness_index", "cost", "cost_surface",
    "cross_validate", "cutter_life_from_wear", "evaluate", "fit_preprocessor",
    "forward", "gd_train", "generate_dataset", "kfold_split", "load_model",
    "mean_grain_size", "one_hot", "optimize", "pearson_matrix",
    "replicate_field_test", "sa_init", "save_model", "train_model_bundle",
    "train_sa_bpnn", "transform",
]
