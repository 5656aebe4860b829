"""Kernel random forests: closed-form kernels, estimators, simulation, spectra."""

from .estimators import (
    FiniteKerfRegressor,
    KerfRegressor,
    finite_kerf_predict,
    l2_error,
    load_model,
    save_model,
)
from .experiments import depth_for, generate_dataset, rate_exponents, run_experiment
from .forest import (
    ForestModel,
    TreeDescription,
    forest_predict,
    pair_proximity,
    proximity,
    sample_forest,
    sample_tree,
    same_cell,
)
from .kernels import (
    centered_kernel,
    centered_kernel_matrix,
    match_profile,
    uniform_kernel,
    uniform_kernel_factor,
    uniform_kernel_matrix,
)
from .spectral import (
    inverse_transform,
    membership_test,
    multiplier_check,
    phi,
    rkhs_dimension,
    rkhs_norm,
    spectral_measure,
    spectral_support,
)

__version__ = "0.1.0"

__all__ = [
    "KerfRegressor",
    "FiniteKerfRegressor",
    "finite_kerf_predict",
    "l2_error",
    "save_model",
    "load_model",
    "depth_for",
    "generate_dataset",
    "rate_exponents",
    "run_experiment",
    "ForestModel",
    "TreeDescription",
    "sample_tree",
    "sample_forest",
    "same_cell",
    "proximity",
    "pair_proximity",
    "forest_predict",
    "match_profile",
    "centered_kernel",
    "centered_kernel_matrix",
    "uniform_kernel",
    "uniform_kernel_factor",
    "uniform_kernel_matrix",
    "phi",
    "inverse_transform",
    "spectral_measure",
    "spectral_support",
    "rkhs_dimension",
    "rkhs_norm",
    "membership_test",
    "multiplier_check",
]
