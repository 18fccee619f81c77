"""Ginzburg-Landau solver and duality certificates."""

import numpy as np

from ._core import (
    CertificateError,
    GLParams,
    MagneticNormalization,
    amplitude_bound,
    certify_scalar,
    double_well_conjugate,
    bump_envelope,
    run_config,
    scalar_energy,
    scalar_nodes,
    select_K,
    solve_gl,
    solve_scalar,
)

__all__ = [
    "CertificateError",
    "GLParams",
    "MagneticNormalization",
    "amplitude_bound",
    "as_grid",
    "certify_scalar",
    "double_well_conjugate",
    "bump_envelope",
    "run_config",
    "scalar_energy",
    "scalar_nodes",
    "select_K",
    "solve_gl",
    "solve_scalar",
]


def as_grid(values, shape):
    """Reshape flat node values (x fastest) to an array indexed [i, j, k]."""
    return np.asarray(values).reshape(shape, order="F")
