"""
Datasets: containers, synthetic generation and CSV files.
"""
from .dataset import Dataset, Standardizer, holdout_split, variance_rank
from .io import load_csv, save_csv
from .synthetic import SyntheticSpec, generate, reflectance_curve
