"""Pure states of N qubits and fast Pauli-string observables.

Conventions used package-wide:

* Sites are numbered 1..N.  Site ``l`` is stored on bit ``l - 1`` of the
  basis index (little-endian), so basis index 0 is the all-up product state
  and index 2^N - 1 is all-down.
* Bit value 0 means spin up (+1 eigenstate of sigma_z), bit value 1 means
  spin down.
* Pauli axes are ordered ``("x", "y", "z")`` wherever an axis index appears.

Expectation values of Pauli strings are evaluated with bit-flip / phase
index arithmetic in O(2^N * n_factors); no 2^N x 2^N operator matrix is
ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .constants import ATOL_PHYSICAL, PSD_EIG_FLOOR, max_state_sites

AXES = ("x", "y", "z")

# Density-matrix eigenvalue validation is skipped above this dimension
# (the matrix is PSD by construction; the check guards small-case logic).
_PSD_CHECK_MAX_DIM = 512


@lru_cache(maxsize=8)
def _indices(n_sites: int) -> np.ndarray:
    """Read-only [0, 2^N) index array, cached per system size."""
    idx = np.arange(1 << n_sites, dtype=np.intp)
    idx.flags.writeable = False
    return idx


def _bit_signs(n_sites: int, site: int) -> np.ndarray:
    """Array of +1/-1: the sigma_z eigenvalue of ``site`` at each basis index."""
    bits = (_indices(n_sites) >> (site - 1)) & 1
    return 1.0 - 2.0 * bits


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of ``n_sites`` qubits.

    ``amplitudes`` is a read-only complex128 array of length 2^n_sites.
    ``is_real`` marks states whose imaginary parts are identically zero
    (GOE-class and spin-chain eigenstates); such states must be built from
    exactly-real data.
    """

    n_sites: int
    amplitudes: np.ndarray
    is_real: bool = False

    def __post_init__(self):
        n = self.n_sites
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"n_sites must be a positive integer, got {n!r}")
        if n > max_state_sites():
            raise ValueError(
                f"n_sites={n} exceeds the state-vector cap {max_state_sites()} "
                "(set CHAOSCORR_MAX_N to raise it)"
            )
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << n,):
            raise ValueError(
                f"expected {1 << n} amplitudes for {n} sites, got shape {amps.shape}"
            )
        norm_sq = float(np.sum(amps.real**2 + amps.imag**2))
        if abs(norm_sq - 1.0) > ATOL_PHYSICAL:
            raise ValueError(f"state is not normalized: sum |c|^2 = {norm_sq!r}")
        if self.is_real and np.any(amps.imag != 0.0):
            raise ValueError("is_real state has nonzero imaginary amplitudes")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_sites", int(n))

    @property
    def dim(self) -> int:
        return 1 << self.n_sites


@dataclass(frozen=True)
class LocalObservable:
    """A single Pauli matrix sigma_axis acting at one site."""

    site: int
    axis: str

    def __post_init__(self):
        if not isinstance(self.site, (int, np.integer)) or self.site < 1:
            raise ValueError(f"site must be a positive integer, got {self.site!r}")
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        object.__setattr__(self, "site", int(self.site))


@dataclass(frozen=True)
class PauliString:
    """Product of single-site Paulis on pairwise-distinct sites.

    Distinct sites make every factor commute with the others and the product
    Hermitian.  The empty string is the identity.
    """

    factors: tuple[LocalObservable, ...] = ()

    def __post_init__(self):
        factors = tuple(self.factors)
        sites = [f.site for f in factors]
        if len(set(sites)) != len(sites):
            raise ValueError(f"factors must act on pairwise-distinct sites, got {sites}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, str]]) -> "PauliString":
        """Build from ``(site, axis)`` pairs, e.g. ``[(1, "x"), (3, "z")]``."""
        return cls(tuple(LocalObservable(site, axis) for site, axis in pairs))

    def max_site(self) -> int:
        return max((f.site for f in self.factors), default=0)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD operator on ``n_sites`` qubits."""

    n_sites: int
    matrix: np.ndarray

    def __post_init__(self):
        n = self.n_sites
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"n_sites must be a positive integer, got {n!r}")
        d = 1 << n
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if mat.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL_PHYSICAL:
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > ATOL_PHYSICAL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if d <= _PSD_CHECK_MAX_DIM:
            if float(np.linalg.eigvalsh(mat)[0]) < PSD_EIG_FLOOR:
                raise ValueError("density matrix has a significantly negative eigenvalue")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "n_sites", int(n))


def basis_state(n_sites: int, index: int = 0) -> StateVector:
    """Computational basis state |index> (index 0 is all spins up)."""
    if not 0 <= index < (1 << n_sites):
        raise ValueError(f"basis index {index} out of range for {n_sites} sites")
    amps = np.zeros(1 << n_sites, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n_sites, amps, is_real=True)


def make_cat_state(n_sites: int) -> StateVector:
    """(|up..up> + |down..down>)/sqrt(2): two amplitudes, at index 0 and 2^N-1."""
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    amps = np.zeros(1 << n_sites, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return StateVector(n_sites, amps, is_real=True)


def pauli_expectation(state: StateVector, obs: PauliString) -> complex:
    """<state| product of Pauli factors |state>.

    Returned as the raw complex number; for any string on distinct sites the
    imaginary part is below 1e-10 and callers may take ``.real``.
    """
    factors = obs.factors
    if not factors:
        return 1.0 + 0.0j
    n = state.n_sites
    if obs.max_site() > n:
        raise ValueError(f"observable site {obs.max_site()} exceeds n_sites={n}")

    flip_mask = 0
    n_y = 0
    sign = None
    for f in factors:
        if f.axis == "x":
            flip_mask |= 1 << (f.site - 1)
            continue
        s = _bit_signs(n, f.site)
        if f.axis == "y":
            flip_mask |= 1 << (f.site - 1)
            n_y += 1
        sign = s if sign is None else sign * s

    amps = state.amplitudes
    ket = amps if sign is None else sign * amps
    bra = amps if flip_mask == 0 else amps[_indices(n) ^ flip_mask]
    return complex(1j**n_y) * complex(np.vdot(bra, ket))


def _coefficient_matrix(state: StateVector, keep_sites: Sequence[int]) -> np.ndarray:
    """Amplitudes as a 2^m x 2^(N-m) matrix: kept bits index rows.

    Row bit ``j`` is ``keep_sites[j]`` (the j-th kept site becomes site j+1
    of the subsystem); the traced-out sites index columns.
    """
    keep = [int(s) for s in keep_sites]
    n = state.n_sites
    if not keep:
        raise ValueError("keep_sites must be non-empty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"keep_sites contains duplicates: {keep}")
    if min(keep) < 1 or max(keep) > n:
        raise ValueError(f"keep_sites {keep} out of range for {n} sites")
    m = len(keep)
    # In the C-order (2,)*n view, axis k carries bit n-1-k, i.e. site n-k.
    kept_axes = [n - l for l in reversed(keep)]
    rest_axes = [ax for ax in range(n) if ax not in set(kept_axes)]
    tensor = state.amplitudes.reshape((2,) * n)
    return tensor.transpose(kept_axes + rest_axes).reshape(1 << m, 1 << (n - m))


def partial_trace(state: StateVector, keep_sites: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep_sites``, tracing out every other site.

    The kept sites are relabeled 1..m in ``keep_sites`` order.
    """
    c = _coefficient_matrix(state, keep_sites)
    rho = c @ c.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(len(keep_sites), rho)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), the squared Frobenius norm of a Hermitian density matrix."""
    m = rho.matrix
    return float(np.sum(m.real**2 + m.imag**2))


def purity_direct(state: StateVector, keep_sites: Sequence[int]) -> float:
    """Tr(rho_A^2) without forming rho_A when the complement is smaller.

    Uses whichever Gram matrix of the coefficient matrix is smaller, so the
    cost is O(2^N * 2^min(m, N-m)).
    """
    c = _coefficient_matrix(state, keep_sites)
    if c.shape[0] <= c.shape[1]:
        g = c @ c.conj().T
    else:
        g = c.conj().T @ c
    return float(np.sum(g.real**2 + g.imag**2))
