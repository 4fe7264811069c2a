"""Variance-covariance matrix of all single-site Paulis, additive-operator
fluctuations, and multi-point connected correlations.

The covariance matrix V is 3N x 3N, indexed site-major (row 3(l-1) + a for
axis index a in x, y, z order):

    V[(l, a), (l', b)] = <delta sigma_a(l) delta sigma_b(l')>,
    delta sigma = sigma - <sigma>.

Same-site blocks use the exact one-site algebra
sigma_a sigma_b = delta_ab I + i eps_abc sigma_c instead of generic
string evaluation, so they carry the imaginary antisymmetric part exactly.

Connected correlations (joint cumulants) of commuting observables at
distinct sites are evaluated with the set-partition Moebius formula

    kappa = sum over partitions pi of (-1)^(|pi|-1) (|pi|-1)!
            * product over blocks B of <prod_{i in B} a_i>,

which is finite and exact, in contrast to differentiating the moment
generator numerically (the test suites do that as an independent check).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._stats import SampleStats, summarize
from .constants import ATOL_PHYSICAL, PSD_EIG_FLOOR, max_state_sites
from .quantum_state import AXES, LocalObservable, PauliString, StateVector, pauli_expectation

# (a, b) -> (sign, c) with sigma_a sigma_b = i * sign * sigma_c for a != b
_EPSILON = {
    (0, 1): (1.0, 2),
    (1, 0): (-1.0, 2),
    (1, 2): (1.0, 0),
    (2, 1): (-1.0, 0),
    (2, 0): (1.0, 1),
    (0, 2): (-1.0, 1),
}

_MAX_CUMULANT_ORDER = 6

# Trace of the covariance matrix of a pure qubit state is
# sum_l (3 - |Bloch(l)|^2), hence between 2N and 3N.
_TRACE_TOL = 1e-8


@dataclass(frozen=True)
class VarianceCovarianceMatrix:
    """3N x 3N Hermitian PSD matrix of connected two-point functions."""

    n_sites: int
    matrix: np.ndarray

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 1:
            raise ValueError(f"n_sites must be >= 1, got {n}")
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if mat.shape != (3 * n, 3 * n):
            raise ValueError(f"expected a {3*n}x{3*n} matrix, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL_PHYSICAL:
            raise ValueError("covariance matrix is not Hermitian")
        eigs = np.linalg.eigvalsh(mat)
        if float(eigs[0]) < PSD_EIG_FLOOR:
            raise ValueError(f"covariance matrix is not PSD: min eigenvalue {eigs[0]}")
        tr = float(np.trace(mat).real)
        if not (2 * n - _TRACE_TOL <= tr <= 3 * n + _TRACE_TOL):
            raise ValueError(f"covariance-matrix trace {tr} outside [{2*n}, {3*n}]")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "_eigs", eigs)

    @staticmethod
    def index(site: int, axis: str) -> int:
        """Row/column index of (site, axis): site-major, axis within site."""
        return 3 * (site - 1) + AXES.index(axis)

    @property
    def e_max(self) -> float:
        return float(self._eigs[-1])

    @property
    def e_min(self) -> float:
        return float(self._eigs[0])


@dataclass(frozen=True)
class AdditiveOperatorSpec:
    """Coefficients c of an additive operator A = sum c_(a,l) sigma_a(l).

    Indexed like the covariance matrix and normalized to sum |c|^2 = N.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or c.size % 3 != 0 or c.size == 0:
            raise ValueError(f"coefficients must be a flat 3N vector, got shape {c.shape}")
        n = c.size // 3
        norm_sq = float(np.sum(c.real**2 + c.imag**2))
        if abs(norm_sq - n) > ATOL_PHYSICAL:
            raise ValueError(f"sum |c|^2 = {norm_sq!r}, expected N = {n}")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def n_sites(self) -> int:
        return self.coefficients.size // 3


def random_additive_spec(n_sites: int, rng: np.random.Generator) -> AdditiveOperatorSpec:
    """Random complex coefficients rescaled to the sum |c|^2 = N normalization."""
    parts = rng.standard_normal((2, 3 * n_sites))
    c = parts[0] + 1j * parts[1]
    c *= math.sqrt(n_sites) / np.linalg.norm(c)
    return AdditiveOperatorSpec(c)


@dataclass(frozen=True)
class CumulantRequest:
    """Observables at pairwise-distinct sites whose joint cumulant is wanted."""

    observables: tuple[LocalObservable, ...]

    def __post_init__(self):
        obs = tuple(self.observables)
        if not 1 <= len(obs) <= _MAX_CUMULANT_ORDER:
            raise ValueError(
                f"cumulant order must be in [1, {_MAX_CUMULANT_ORDER}], got {len(obs)}"
            )
        sites = [o.site for o in obs]
        if len(set(sites)) != len(sites):
            raise ValueError(f"observable sites must be pairwise distinct, got {sites}")
        object.__setattr__(self, "observables", obs)

    @property
    def order(self) -> int:
        return len(self.observables)


def _single_site_expectations(state: StateVector) -> np.ndarray:
    """<sigma_a(l)> as an (N, 3) real array (Hermitian, so real)."""
    n = state.n_sites
    out = np.empty((n, 3))
    for l in range(1, n + 1):
        for a, axis in enumerate(AXES):
            val = pauli_expectation(state, PauliString((LocalObservable(l, axis),)))
            out[l - 1, a] = val.real
    return out


def compute_vcm(state: StateVector) -> VarianceCovarianceMatrix:
    """Covariance matrix of all 3N single-site Pauli observables of a state."""
    n = state.n_sites
    if n > max_state_sites():
        raise ValueError(f"n_sites={n} exceeds cap {max_state_sites()}")
    single = _single_site_expectations(state)
    v = np.zeros((3 * n, 3 * n), dtype=np.complex128)

    for l in range(1, n + 1):
        base = 3 * (l - 1)
        bloch = single[l - 1]
        for a in range(3):
            v[base + a, base + a] = 1.0 - bloch[a] ** 2
            for b in range(a + 1, 3):
                sign, c = _EPSILON[(a, b)]
                entry = 1j * sign * bloch[c] - bloch[a] * bloch[b]
                v[base + a, base + b] = entry
                v[base + b, base + a] = np.conj(entry)

    for l in range(1, n + 1):
        for lp in range(l + 1, n + 1):
            for a, axis_a in enumerate(AXES):
                for b, axis_b in enumerate(AXES):
                    two = pauli_expectation(
                        state,
                        PauliString((LocalObservable(l, axis_a), LocalObservable(lp, axis_b))),
                    )
                    entry = two - single[l - 1, a] * single[lp - 1, b]
                    v[3 * (l - 1) + a, 3 * (lp - 1) + b] = entry
                    v[3 * (lp - 1) + b, 3 * (l - 1) + a] = np.conj(entry)

    return VarianceCovarianceMatrix(n, v)


def extremal_eigenvalues(vcm: VarianceCovarianceMatrix) -> tuple[float, float]:
    """(e_max, e_min) of the covariance matrix."""
    return vcm.e_max, vcm.e_min


def additive_fluctuation(
    state: StateVector,
    spec: AdditiveOperatorSpec,
    vcm: VarianceCovarianceMatrix | None = None,
) -> float:
    """<delta A^dag delta A> = c^dag V c; bounded by N * e_max."""
    if spec.n_sites != state.n_sites:
        raise ValueError(
            f"spec is for {spec.n_sites} sites, state has {state.n_sites}"
        )
    if vcm is None:
        vcm = compute_vcm(state)
    c = spec.coefficients
    value = float(np.real(c.conj() @ (vcm.matrix @ c)))
    return max(value, 0.0)


def _set_partitions(items: Sequence[int]):
    """Yield all partitions of ``items`` as lists of blocks (lists)."""
    if len(items) == 1:
        yield [[items[0]]]
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]
        yield [[first]] + partition


def connected_correlation(state: StateVector, request: CumulantRequest) -> float:
    """Joint cumulant of the requested observables in ``state``.

    Order 1 is the plain expectation; order 2 equals
    <a1 a2> - <a1><a2> exactly; higher orders come from the partition
    formula over moments of sub-products.
    """
    obs = request.observables
    m = len(obs)
    moments: dict[frozenset[int], float] = {}
    for mask in range(1, 1 << m):
        subset = frozenset(i for i in range(m) if mask >> i & 1)
        string = PauliString(tuple(obs[i] for i in sorted(subset)))
        moments[subset] = pauli_expectation(state, string).real

    total = 0.0
    for partition in _set_partitions(list(range(m))):
        k = len(partition)
        term = (-1.0) ** (k - 1) * math.factorial(k - 1)
        for block in partition:
            term *= moments[frozenset(block)]
        total += term
    return total


def two_point_sq_correlation_stat(
    states: Iterable[StateVector], site_l: int, site_lp: int
) -> SampleStats:
    """Mean over axes and samples of |<sigma_a(l) sigma_b(l')>|^2.

    The per-sample statistic is the average over the nine axis pairs; the
    returned standard error is over samples.
    """
    if site_l == site_lp:
        raise ValueError("the two sites must differ")
    per_sample = []
    for state in states:
        vals = []
        for axis_a in AXES:
            for axis_b in AXES:
                c = pauli_expectation(
                    state,
                    PauliString(
                        (LocalObservable(site_l, axis_a), LocalObservable(site_lp, axis_b))
                    ),
                )
                vals.append(abs(c) ** 2)
        per_sample.append(math.fsum(vals) / len(vals))
    return summarize(per_sample)
