"""Separability of two-mode Gaussian states: analytic covariance criteria
cross-checked against a truncated Fock-space oracle."""

from .covariance import (
    Classification,
    CovMatrix,
    GaussianParams,
    Region,
    StandardVParams,
    classify,
)
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "Classification",
    "CovMatrix",
    "GaussianParams",
    "Region",
    "StandardVParams",
    "classify",
]
__version__ = "0.1.0"
