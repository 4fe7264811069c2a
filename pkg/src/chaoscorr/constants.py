"""Shared numeric tolerances and size caps.

Two tolerance tiers are used throughout: ``ATOL_PHYSICAL`` for identities
that hold up to eigensolver / accumulation noise (norms, Hermiticity,
expectation realness), and ``ATOL_EXACT`` for identities that are pure
algebraic rearrangements of the same floating-point data.
"""

from __future__ import annotations

import os

ATOL_PHYSICAL = 1e-10
ATOL_EXACT = 1e-12

# Eigenvalues of positive-semidefinite matrices may round slightly negative.
PSD_EIG_FLOOR = -1e-8

_DEFAULT_MAX_STATE_SITES = 20   # 2^20 complex amplitudes = 16 MB
_DEFAULT_MAX_DENSE_SITES = 14   # dense 2^14 x 2^14 symmetric matrix

_ENV_MAX_N = "CHAOSCORR_MAX_N"


def max_state_sites() -> int:
    """Largest allowed qubit count for state vectors.

    Overridable through the ``CHAOSCORR_MAX_N`` environment variable for
    machines with more memory.
    """
    raw = os.environ.get(_ENV_MAX_N)
    if raw is None:
        return _DEFAULT_MAX_STATE_SITES
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{_ENV_MAX_N} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{_ENV_MAX_N} must be >= 1, got {value}")
    return value


def max_dense_sites() -> int:
    """Largest allowed qubit count for dense Hamiltonian diagonalization.

    When ``CHAOSCORR_MAX_N`` is set it overrides this cap as well.
    """
    if os.environ.get(_ENV_MAX_N) is None:
        return _DEFAULT_MAX_DENSE_SITES
    return max_state_sites()
