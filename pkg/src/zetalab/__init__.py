"""Numerical laboratory for the mean-square error terms of zeta(1/2+it) and
of the Dirichlet divisor problem."""

from .divisor import DivisorTable, build_divisor_table, delta, delta_star, delta_star_alt
from .error_terms import ErrorTermGrid, build_error_terms, mean_square_main_term
from .zeta import EvalConfig, ZetaGrid, build_zeta_grid, hardy_z, zeta_abs_sq

__version__ = "0.1.0"

__all__ = [
    "DivisorTable", "build_divisor_table", "delta", "delta_star", "delta_star_alt",
    "ErrorTermGrid", "build_error_terms", "mean_square_main_term",
    "EvalConfig", "ZetaGrid", "build_zeta_grid", "hardy_z", "zeta_abs_sq",
]
