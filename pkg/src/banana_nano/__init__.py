"""Exact curve-counting and modular checks for the banana nano-manifolds, N in {5, 6, 8, 9}."""

from .banana_coeffs import CoeffTable, build_coeff_table, resum_lambda
from .dt_engine import TruncationCaps, z_banana_local, z_nano
from .errors import BananaError
from .models import ALLOWED_N, NanoModel, all_models
from .series import MultiSeries, VarSpec

__version__ = "0.1.0"

__all__ = [
    "ALLOWED_N", "BananaError", "CoeffTable", "MultiSeries", "NanoModel", "TruncationCaps", "VarSpec",
    "all_models", "build_coeff_table", "resum_lambda", "z_banana_local", "z_nano",
]
