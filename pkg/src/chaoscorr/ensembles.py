"""Chaotic-state sampling and the matching closed-form ensemble predictions.

Eigenvectors of GUE (GOE) matrices are uniformly distributed on the complex
(real) unit sphere, so states are drawn directly as normalized i.i.d.
Gaussian vectors in O(2^N); ``sample_state_via_matrix`` keeps the literal
draw-a-matrix-and-diagonalize route as a cross-validation path.

The ``predicted_*`` functions are the exact ensemble averages the samplers
must reproduce.  All of them depend on the symmetry class only through
``q`` (0 for GUE, 1 for GOE):

* second moment of a coefficient:        mean |c_i|^2          = 1/d
* fourth moment:                         mean |c_i|^4          = (2+q) / (d (d+1+q))
* cross moment (i != j):                 mean |c_i|^2 |c_j|^2  = 1 / (d (d+1+q))
* covariance-matrix diagonal:            2^N / (2^N + 1 + q), off-diagonal mean 0
* squared two-point correlation:         (1+q) / (2^N + 1 + q)
* bipartite purity:                      (d_A + d_B + q) / (d_A d_B + 1 + q)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import max_state_sites
from .quantum_state import StateVector

_MAX_MATRIX_SAMPLER_SITES = 8


class EnsembleClass(Enum):
    """Gaussian random-matrix symmetry class; the value is the q parameter."""

    GUE = 0
    GOE = 1

    @property
    def q(self) -> int:
        return self.value


@dataclass(frozen=True)
class SampleSeed:
    """Deterministic per-sample RNG derivation.

    The stream is a pure function of ``(master_seed, sample_index)``, so
    ensembles may be generated in any order (or in parallel) without
    changing any sample.
    """

    master_seed: int
    sample_index: int

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError(f"master_seed must be a 64-bit unsigned int, got {self.master_seed!r}")
        if int(self.sample_index) < 0:
            raise ValueError(f"sample_index must be >= 0, got {self.sample_index!r}")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "sample_index", int(self.sample_index))

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator; distinct ``stream`` values give distinct
        streams for the same sample (state draw vs. measurement outcomes)."""
        ss = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.sample_index, stream)
        )
        return np.random.default_rng(ss)


def sample_state(ensemble: EnsembleClass, n_sites: int, seed: SampleSeed) -> StateVector:
    """Draw one chaotic eigenstate: uniform on the complex (GUE) or real
    (GOE) unit sphere in dimension 2^n_sites."""
    if n_sites < 1 or n_sites > max_state_sites():
        raise ValueError(f"n_sites={n_sites} outside [1, {max_state_sites()}]")
    rng = seed.rng()
    d = 1 << n_sites
    if ensemble is EnsembleClass.GUE:
        parts = rng.standard_normal((2, d))
        v = parts[0] + 1j * parts[1]
        v /= np.linalg.norm(v)
        return StateVector(n_sites, v, is_real=False)
    v = rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return StateVector(n_sites, v.astype(np.complex128), is_real=True)


def sample_state_via_matrix(
    ensemble: EnsembleClass, n_sites: int, seed: SampleSeed
) -> StateVector:
    """Validation sampler: draw a full 2^N x 2^N GUE/GOE matrix, diagonalize
    it and return a uniformly chosen eigenvector.

    Statistically indistinguishable from :func:`sample_state` but costs
    O(8^N); capped at N = 8 and used only in cross-checks.
    """
    if n_sites < 1 or n_sites > _MAX_MATRIX_SAMPLER_SITES:
        raise ValueError(
            f"n_sites={n_sites} outside [1, {_MAX_MATRIX_SAMPLER_SITES}] "
            "(matrix-sampler cost guard)"
        )
    rng = seed.rng()
    d = 1 << n_sites
    if ensemble is EnsembleClass.GUE:
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = 0.5 * (a + a.conj().T)
    else:
        a = rng.standard_normal((d, d))
        h = 0.5 * (a + a.T)
    _, vecs = np.linalg.eigh(h)
    v = vecs[:, int(rng.integers(d))]
    v = v / np.linalg.norm(v)
    if ensemble is EnsembleClass.GOE:
        return StateVector(n_sites, v.astype(np.complex128), is_real=True)
    return StateVector(n_sites, np.asarray(v, dtype=np.complex128), is_real=False)


def _check_q(q: int) -> int:
    if q not in (0, 1):
        raise ValueError(f"q must be 0 (GUE) or 1 (GOE), got {q!r}")
    return q


def predicted_moment2(d: int) -> float:
    """Mean |c_i|^2 of a coefficient in dimension d."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return 1.0 / d


def predicted_moment4(d: int, q: int) -> float:
    """Mean |c_i|^4 of a coefficient in dimension d."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return (2.0 + _check_q(q)) / (d * (d + 1 + q))


def predicted_cross_moment(d: int, q: int) -> float:
    """Mean |c_i|^2 |c_j|^2 for distinct components i != j."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return 1.0 / (d * (d + 1 + _check_q(q)))


def predicted_vcm_element(n_sites: int, q: int) -> float:
    """Mean diagonal element of the single-site-observable covariance matrix;
    the off-diagonal ensemble mean is exactly 0."""
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    d = 2.0**n_sites
    return d / (d + 1 + _check_q(q))


def predicted_sq_correlation(n_sites: int, q: int) -> float:
    """Mean |<sigma_a(l) sigma_b(l')>|^2 over the ensemble, for l != l'."""
    if n_sites < 2:
        raise ValueError(f"n_sites must be >= 2, got {n_sites}")
    return (1.0 + _check_q(q)) / (2.0**n_sites + 1 + q)


def predicted_purity(n_a_sites: int, n_b_sites: int, q: int) -> float:
    """Mean Tr(rho_A^2) for a bipartition into n_a + n_b sites."""
    if n_a_sites < 1 or n_b_sites < 1:
        raise ValueError("both subsystem sizes must be >= 1")
    d_a = 2.0**n_a_sites
    d_b = 2.0**n_b_sites
    return (d_a + d_b + _check_q(q)) / (d_a * d_b + 1 + q)


def predicted_purity_leading(n_a_sites: int, n_b_sites: int) -> float:
    """Leading large-system expansion (1/d_A)(1 + 2^-(N_B - N_A)) of the mean
    purity; requires the traced-out part to be at least as large."""
    if n_a_sites < 1 or n_b_sites < n_a_sites:
        raise ValueError("expansion requires 1 <= n_a_sites <= n_b_sites")
    delta = n_b_sites - n_a_sites
    return (1.0 + 2.0**-delta) / 2.0**n_a_sites
