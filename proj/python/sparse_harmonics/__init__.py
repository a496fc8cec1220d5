"""Numerical harness for sparse bounds of multilinear commutators.

Arrays are cell averages on [left, left + length) with a power-of-two number of cells.
"""

import json
from pathlib import Path

from ._sparse_harmonics import (
    ConfigError,
    InputError,
    ParameterError,
    ResolutionError,
    a1_constant,
    ainfty_constants,
    ap_constant,
    bmo_norm,
    calderon_apply,
    commutator,
    constants_csv,
    fit_exponent,
    hilbert_transform,
    k0_p0,
    lorentz_one,
    lorentz_weak,
    make_function,
    make_symbol,
    make_weight,
    multi_ap_constant,
    reverse_holder_check,
    stein_square_function,
)
from . import _sparse_harmonics as _core

__all__ = [
    "ConfigError", "InputError", "ParameterError", "ResolutionError",
    "a1_constant", "ainfty_constants", "ap_constant", "bmo_norm", "calderon_apply", "commutator",
    "constants_csv", "fit_exponent", "hilbert_transform", "k0_p0", "lorentz_one", "lorentz_weak",
    "make_function", "make_symbol", "make_weight", "multi_ap_constant", "reverse_holder_check",
    "stein_square_function", "sharpness", "run_config",
]


def sharpness(L=14, symbol="log"):
    """Decay report for the log-symbol example (or its bounded-symbol contrast) as a dict."""
    return json.loads(_core._sharpness(L, symbol))


def run_config(config):
    """Run an INI config given as text or a path; returns (exit_code, reports, constants_csv)."""
    text = config
    if isinstance(config, Path) or ("\n" not in str(config) and Path(str(config)).is_file()):
        text = Path(config).read_text()
    code, reports, csv = _core._run_config(text)
    return code, json.loads(reports), csv
