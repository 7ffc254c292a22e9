"""Numerical toolkit for bilinear square Fourier multipliers, multilinear square
functions, their commutators, maximal functions and multiple weights."""
from __future__ import annotations

__version__ = "0.1.0"

from .exponents import ExponentConfig, TQuad
from .grid import (ConfigError, Grid, SampledField, SpectralField, forward_transform,
                   inverse_transform, lp_norm, make_grid, weak_lp_quasinorm)
from .kernels import kernel_at, synthesize_kernel
from .symbols import Symbol, builtin_symbol, check_decay_condition, lp_piece, parse_symbol

__all__ = [
    "ExponentConfig", "TQuad", "ConfigError", "Grid", "SampledField", "SpectralField",
    "forward_transform", "inverse_transform", "lp_norm", "make_grid", "weak_lp_quasinorm",
    "kernel_at", "synthesize_kernel", "Symbol", "builtin_symbol", "check_decay_condition",
    "lp_piece", "parse_symbol",
]
