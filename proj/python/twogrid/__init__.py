"""Two-grid convergence analysis for symmetric positive semidefinite systems."""

import json

from ._twogrid import (
    TwoGridError,
    aggregation_prolongation,
    exact_factor,
    neumann_laplacian_1d,
    neumann_laplacian_2d,
    solve,
    spectral_equivalence,
    sym_eig,
)
from ._twogrid import analyze_json as _analyze_json


def analyze(a, p, smoother="jacobi", m=None, bc=None, eps=None):
    """Full convergence report as a dict (same fields as the CLI's JSON)."""
    return json.loads(_analyze_json(a, p, smoother, m, bc, eps))


__all__ = [
    "TwoGridError",
    "aggregation_prolongation",
    "analyze",
    "exact_factor",
    "neumann_laplacian_1d",
    "neumann_laplacian_2d",
    "solve",
    "spectral_equivalence",
    "sym_eig",
]
