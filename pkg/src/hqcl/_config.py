"""Tolerances and backend selection shared by every module."""

import os

#: default tolerance for semantic assertions (probabilities, reduced states)
SEMANTIC_TOL = 1e-9
#: tolerance for exact algebraic gate identities
ALGEBRAIC_TOL = 1e-12
#: purity below ``1 - PROPER_MIXTURE_TOL`` counts as a proper mixture
PROPER_MIXTURE_TOL = 1e-9
#: ensemble members with weight at or below this are rejected
MIN_WEIGHT = 1e-12
#: largest qubit count for which dense 2^n x 2^n matrices are allowed
DENSE_MAX_QUBITS = 10


def semantic_tol() -> float:
    """Semantic tolerance, overridable through ``HQCL_TOL``."""
    raw = os.environ.get("HQCL_TOL")
    if not raw:
        return SEMANTIC_TOL
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"HQCL_TOL must be a float, got {raw!r}") from exc
    if not value > 0:
        raise ValueError(f"HQCL_TOL must be positive, got {raw!r}")
    return value


def backend_name() -> str:
    """Kernel backend requested through ``HQCL_BACKEND`` (``numba`` or ``numpy``)."""
    name = os.environ.get("HQCL_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"HQCL_BACKEND must be 'numba' or 'numpy', got {name!r}")
    return name
