"""Spectral Galerkin solver for bipolynomial fractional Dirichlet-Laplace problems.

Coefficient vectors are NumPy arrays in the eigenbasis of a `SpectralBasis`.
A fractional polynomial w is a list of (alpha, beta) pairs.
"""

import json

from ._fraclap import (
    Domain,
    FraclapError,
    SpectralBasis,
    __version__,
    analytic_box_basis,
    apply_poly,
    apply_power,
    discrete_basis,
    eval_poly,
    m_beta,
    make_box,
    make_polygon2d,
    minimize_builtin,
    minimize_linear,
    norm_beta,
    norm_tilde,
    solve_linear,
    synthetic_basis,
)
from ._fraclap import run_config as _run_config


def run_config(config, kind, base_dir="."):
    """Run a configuration (dict or JSON text). Returns (files, report, exit_code)."""
    text = config if isinstance(config, str) else json.dumps(config)
    out = _run_config(text, kind, str(base_dir))
    return out["files"], json.loads(out["report"]), out["exit_code"]


__all__ = [
    "Domain",
    "FraclapError",
    "SpectralBasis",
    "__version__",
    "analytic_box_basis",
    "apply_poly",
    "apply_power",
    "discrete_basis",
    "eval_poly",
    "m_beta",
    "make_box",
    "make_polygon2d",
    "minimize_builtin",
    "minimize_linear",
    "norm_beta",
    "norm_tilde",
    "run_config",
    "solve_linear",
    "synthetic_basis",
]
