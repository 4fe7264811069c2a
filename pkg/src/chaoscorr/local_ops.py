"""Single-site unitaries, projective measurements, and the invariance
experiments they enable.

Measuring site l in a local basis keeps the unmeasured amplitudes as a
renormalized coefficient slice; the remaining sites are relabeled 1..N-1
preserving their order (sites above l shift down by one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._stats import SampleStats, summarize
from .constants import ATOL_PHYSICAL
from .correlations import compute_vcm
from .ensembles import (
    EnsembleClass,
    SampleSeed,
    predicted_moment4,
    predicted_purity,
    predicted_vcm_element,
    sample_state,
)
from .quantum_state import StateVector, purity_direct

_MODES = ("sample", "forced-0", "forced-1")
_FORCED_PROB_FLOOR = 1e-12

_IDENTITY2 = np.eye(2, dtype=np.complex128)


def _require_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - _IDENTITY2)) > ATOL_PHYSICAL:
        raise ValueError("matrix is not unitary")
    return u


def _site_axis_view(state: StateVector, site: int) -> np.ndarray:
    """Amplitudes reshaped to (higher sites, measured site, lower sites)."""
    n = state.n_sites
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range for {n} sites")
    return state.amplitudes.reshape(1 << (n - site), 2, 1 << (site - 1))


def apply_local_unitary(state: StateVector, site: int, u: np.ndarray) -> StateVector:
    """Apply a 2x2 unitary to one site's tensor factor."""
    u = _require_unitary(u)
    cube = _site_axis_view(state, site)
    new = np.einsum("ab,hbl->hal", u, cube).reshape(-1)
    is_real = state.is_real and not np.any(u.imag)
    if is_real:
        new = new.real.astype(np.complex128)
    return StateVector(state.n_sites, new, is_real=is_real)


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of one single-site projective measurement."""

    site: int
    basis: np.ndarray
    outcome: int
    probability: float
    post_state: StateVector


def projective_measure(
    state: StateVector,
    site: int,
    basis: np.ndarray | None = None,
    mode: str = "sample",
    rng: np.random.Generator | None = None,
) -> MeasurementRecord:
    """Measure one site projectively and factor it out of the state.

    ``basis`` is a 2x2 unitary whose columns are the measured basis states
    (None means the computational basis).  ``mode`` is "sample" (Born-rule
    outcome from ``rng``), "forced-0" or "forced-1"; forcing an outcome
    whose probability is below 1e-12 raises.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    if state.n_sites < 2:
        raise ValueError("measuring the last remaining qubit leaves no state")
    basis_mat = _IDENTITY2 if basis is None else _require_unitary(basis)
    work = state if basis is None else apply_local_unitary(state, site, basis_mat.conj().T)

    cube = _site_axis_view(work, site)
    branches = [cube[:, k, :].reshape(-1) for k in (0, 1)]
    probs = [float(np.sum(b.real**2 + b.imag**2)) for b in branches]

    if mode == "sample":
        if rng is None:
            rng = np.random.default_rng()
        outcome = 0 if rng.random() < probs[0] else 1
    else:
        outcome = int(mode[-1])
        if probs[outcome] < _FORCED_PROB_FLOOR:
            raise ValueError(
                f"cannot force outcome {outcome}: probability {probs[outcome]:.3e}"
            )

    amps = branches[outcome] / math.sqrt(probs[outcome])
    is_real = work.is_real
    if is_real:
        amps = amps.real.astype(np.complex128)
    post = StateVector(state.n_sites - 1, amps, is_real=is_real)
    return MeasurementRecord(
        site=site,
        basis=basis_mat,
        outcome=outcome,
        probability=probs[outcome],
        post_state=post,
    )


_STATISTICS = ("purity", "moment4", "vcm_diag")


@dataclass(frozen=True)
class InvarianceStepReport:
    """One post-measurement comparison against the shrunken-system prediction."""

    statistic: str
    n_sites: int
    stats: SampleStats
    predicted: float
    z_score: float | None
    agrees: bool


def _evaluate_statistic(state: StateVector, statistic: str, m: int) -> float:
    if statistic == "purity":
        return purity_direct(state, tuple(range(1, m + 1)))
    if statistic == "moment4":
        p = np.abs(state.amplitudes) ** 2
        return float(np.mean(p**2))
    diag = np.diagonal(compute_vcm(state).matrix)
    return float(np.mean(diag.real))


def _predict_statistic(statistic: str, n_sites: int, m: int, q: int) -> float:
    if statistic == "purity":
        return predicted_purity(m, n_sites - m, q)
    if statistic == "moment4":
        return predicted_moment4(1 << n_sites, q)
    return predicted_vcm_element(n_sites, q)


def invariance_experiment(
    ensemble: EnsembleClass,
    n_sites: int,
    samples: int,
    statistic: str = "purity",
    subsystem_size: int = 3,
    steps: int = 1,
    master_seed: int = 0,
    basis: str | np.ndarray | None = None,
) -> list[InvarianceStepReport]:
    """Measure the last site repeatedly and test that the post-measurement
    ensemble keeps satisfying the closed-form predictions at its new size.

    Outcomes are Born-sampled.  ``basis`` is None (computational), "haar"
    (a fresh Haar-random local basis per measurement), or a fixed 2x2
    unitary.  Returns one report per measurement step; ``agrees`` flags
    |z| <= 3 between the empirical mean and the prediction.
    """
    if statistic not in _STATISTICS:
        raise ValueError(f"statistic must be one of {_STATISTICS}, got {statistic!r}")
    if not 1 <= steps <= n_sites - 1:
        raise ValueError(f"steps must be in [1, {n_sites - 1}], got {steps}")
    if statistic == "purity" and not 1 <= subsystem_size < n_sites - steps + 1:
        raise ValueError(
            f"subsystem_size {subsystem_size} too large for {n_sites} sites and {steps} steps"
        )

    per_step_values: list[list[float]] = [[] for _ in range(steps)]
    for i in range(samples):
        seed = SampleSeed(master_seed, i)
        state = sample_state(ensemble, n_sites, seed)
        rng = seed.rng(stream=1)
        for k in range(steps):
            u = basis
            if isinstance(basis, str):
                if basis != "haar":
                    raise ValueError(f"unknown basis spec {basis!r}")
                u = _haar_unitary_2x2(rng)
            record = projective_measure(
                state, site=state.n_sites, basis=u, mode="sample", rng=rng
            )
            state = record.post_state
            per_step_values[k].append(_evaluate_statistic(state, statistic, subsystem_size))

    reports = []
    for k in range(steps):
        stats = summarize(per_step_values[k])
        predicted = _predict_statistic(statistic, n_sites - k - 1, subsystem_size, ensemble.q)
        z = stats.z_score(predicted)
        reports.append(
            InvarianceStepReport(
                statistic=statistic,
                n_sites=n_sites - k - 1,
                stats=stats,
                predicted=predicted,
                z_score=z,
                agrees=(z is None and stats.mean == predicted) or (z is not None and abs(z) <= 3.0),
            )
        )
    return reports


def _haar_unitary_2x2(rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(a)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases


@dataclass(frozen=True)
class DisentangleProbeResult:
    """How many sequential single-site measurements it took to reach a
    product state (None if ``max_ops`` was exhausted first)."""

    state_family: str
    n_sites: int
    epsilon: float
    measurements_needed: int | None
    max_deficits: tuple[float, ...]


def _max_bipartite_deficit(state: StateVector) -> float:
    """Largest 1 - Tr(rho_A^2) over all bipartitions of the state."""
    n = state.n_sites
    if n < 2:
        return 0.0
    worst = 0.0
    full = (1 << n) - 1
    for mask in range(1, full):
        if not mask & 1:  # complements pair up; fix site 1 on side A
            continue
        sites = tuple(l for l in range(1, n + 1) if mask >> (l - 1) & 1)
        worst = max(worst, 1.0 - purity_direct(state, sites))
    return worst


def disentangling_cost_probe(
    state_family: str,
    n_sites: int,
    max_ops: int,
    master_seed: int = 0,
    sample_index: int = 0,
    ensemble: EnsembleClass = EnsembleClass.GUE,
    epsilon: float = 1e-6,
) -> DisentangleProbeResult:
    """Greedily measure sites in order (computational basis, sampled
    outcomes) until every bipartite purity of what remains exceeds
    1 - epsilon, or ``max_ops`` measurements have been spent.

    ``state_family`` is "chaotic-sampled" or "cat".  Measuring down to a
    single qubit counts as disentangled.
    """
    from .quantum_state import make_cat_state  # local import avoids cycle noise

    if state_family not in ("chaotic-sampled", "cat"):
        raise ValueError(f"state_family must be 'chaotic-sampled' or 'cat', got {state_family!r}")
    if not 0 <= max_ops <= n_sites:
        raise ValueError(f"max_ops must be in [0, {n_sites}], got {max_ops}")

    seed = SampleSeed(master_seed, sample_index)
    if state_family == "cat":
        state = make_cat_state(n_sites)
    else:
        state = sample_state(ensemble, n_sites, seed)
    rng = seed.rng(stream=1)

    deficits = [_max_bipartite_deficit(state)]
    needed: int | None = 0 if deficits[0] <= epsilon else None
    count = 0
    while needed is None and count < max_ops and state.n_sites >= 2:
        record = projective_measure(state, site=1, mode="sample", rng=rng)
        state = record.post_state
        count += 1
        deficits.append(_max_bipartite_deficit(state))
        if deficits[-1] <= epsilon:
            needed = count
    return DisentangleProbeResult(
        state_family=state_family,
        n_sites=n_sites,
        epsilon=epsilon,
        measurements_needed=needed,
        max_deficits=tuple(deficits),
    )
