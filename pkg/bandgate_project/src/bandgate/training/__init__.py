"""
Training loop, configuration and cross-validation.
"""
from .config import PRESETS, TrainConfig, from_mapping, load_config_file, preset
from .cross_validation import CrossValidationReport, FoldResult, fold_indices, kfold_cross_validate
from .trainer import CollapseEvent, EpochRecord, Pipeline, TrainReport, TrainResult, Trainer, train
