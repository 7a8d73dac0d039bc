"""Algebraic Bethe ansatz for the ZF and IK 19-vertex models with upper-triangular boundaries."""

from .aba import build_phi, build_psi, lambda_eigenvalue
from .double_row import build_double_row, transfer_matrix
from .solver import RootSearchConfig, RootSet, multi_start, solve_system
from .weights import ModelKind, ModelParams

__version__ = "0.1.0"

__all__ = [
    "ModelKind", "ModelParams", "RootSearchConfig", "RootSet",
    "build_double_row", "transfer_matrix", "build_psi", "build_phi", "lambda_eigenvalue",
    "multi_start", "solve_system", "__version__",
]
