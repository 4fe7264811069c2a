"""Purity sweeps over subsystem size and their analytic comparisons.

The headline quantity is -log2(mean purity): the ensemble average is taken
on the purity itself and the logarithm applied afterwards.  The
alternative order (mean of -log2 purity) differs by a Jensen gap and is
stored alongside, since plots conventionally put error bars on the log
scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from ._stats import summarize
from .ensembles import predicted_purity, predicted_purity_leading
from .quantum_state import StateVector, purity_direct

StateSource = Callable[[int], StateVector]

_POLICIES = ("contiguous", "random")


@dataclass(frozen=True)
class PurityPoint:
    """Aggregates for one subsystem size m."""

    m: int
    mean_purity: float
    std_purity: float
    neg_log2_mean_purity: float
    mean_neg_log2_purity: float
    std_neg_log2_purity: float
    sample_count: int
    analytic_prediction: float | None
    bound: int

    @property
    def standard_error_purity(self) -> float:
        if self.sample_count < 2:
            return 0.0
        return self.std_purity / math.sqrt(self.sample_count)


@dataclass(frozen=True)
class PuritySweepResult:
    n_sites: int
    subsystem_policy: str
    per_m: dict[int, PurityPoint]


def purity_bound(m: int, n_sites: int) -> float:
    """Smallest achievable Tr(rho_m^2): 2^-min(m, N-m), set by the Schmidt
    rank through the smaller tensor factor."""
    if not 1 <= m < n_sites:
        raise ValueError(f"m must satisfy 1 <= m < {n_sites}, got {m}")
    return 2.0 ** -min(m, n_sites - m)


def _subsystem_sites(
    policy, m: int, n_sites: int, rng: np.random.Generator | None
) -> tuple[int, ...]:
    if isinstance(policy, Mapping):
        sites = tuple(int(s) for s in policy[m])
        if len(sites) != m:
            raise ValueError(f"explicit policy gives {len(sites)} sites for m={m}")
        return sites
    if policy == "contiguous":
        return tuple(range(1, m + 1))
    if policy == "random":
        assert rng is not None
        picked = rng.choice(n_sites, size=m, replace=False)
        return tuple(sorted(int(s) + 1 for s in picked))
    raise ValueError(f"policy must be one of {_POLICIES} or an explicit mapping, got {policy!r}")


def _policy_descriptor(policy) -> str:
    if isinstance(policy, Mapping):
        return "explicit-list"
    return {"contiguous": "contiguous-from-site-1", "random": "random-subset"}[policy]


def purity_sweep(
    state_source: StateSource,
    n_sites: int,
    m_range: Sequence[int] | None = None,
    samples: int = 100,
    policy="contiguous",
    analytic_q: int | None = None,
    policy_seed: int = 0,
) -> PuritySweepResult:
    """Mean subsystem purity versus subsystem size m over an ensemble.

    ``state_source`` maps a sample index to a state; each sampled state is
    reused across all m.  ``policy`` picks which sites form the subsystem:
    "contiguous" (sites 1..m), "random" (fresh subset per sample, seeded by
    ``policy_seed``), or a mapping m -> explicit site tuple.
    ``analytic_q`` attaches the ensemble prediction for that symmetry class.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    ms = tuple(m_range) if m_range is not None else tuple(range(1, n_sites))
    if not ms or any(not 1 <= m < n_sites for m in ms):
        raise ValueError(f"every m must satisfy 1 <= m < {n_sites}, got {ms}")
    if not isinstance(policy, Mapping) and policy not in _POLICIES:
        raise ValueError(f"policy must be one of {_POLICIES} or an explicit mapping")

    values: dict[int, list[float]] = {m: [] for m in ms}
    for i in range(samples):
        state = state_source(i)
        if state.n_sites != n_sites:
            raise ValueError(
                f"state_source returned {state.n_sites}-site state, expected {n_sites}"
            )
        rng = (
            np.random.default_rng(np.random.SeedSequence(policy_seed, spawn_key=(i,)))
            if policy == "random"
            else None
        )
        for m in ms:
            sites = _subsystem_sites(policy, m, n_sites, rng)
            values[m].append(purity_direct(state, sites))

    per_m: dict[int, PurityPoint] = {}
    for m in ms:
        stats = summarize(values[m])
        logs = summarize([-math.log2(p) for p in values[m]])
        prediction = (
            predicted_purity(m, n_sites - m, analytic_q) if analytic_q is not None else None
        )
        per_m[m] = PurityPoint(
            m=m,
            mean_purity=stats.mean,
            std_purity=stats.std,
            neg_log2_mean_purity=-math.log2(stats.mean),
            mean_neg_log2_purity=logs.mean,
            std_neg_log2_purity=logs.std,
            sample_count=stats.sample_count,
            analytic_prediction=prediction,
            bound=min(m, n_sites - m),
        )
    return PuritySweepResult(
        n_sites=n_sites, subsystem_policy=_policy_descriptor(policy), per_m=per_m
    )


@dataclass(frozen=True)
class AsymptoticRow:
    delta_n: int
    exact: float
    leading: float
    relative_gap: float


def purity_asymptotic_check(n_sites: int, q: int) -> list[AsymptoticRow]:
    """Exact mean purity vs. its leading expansion as the size imbalance grows.

    One row per subsystem size m = N//2 .. 1 (delta_n = N - 2m ascending).
    ``relative_gap`` is |exact - leading| measured against the limiting
    purity 1/d_A; it shrinks monotonically with delta_n.
    """
    if n_sites < 4:
        raise ValueError(f"n_sites must be >= 4, got {n_sites}")
    rows = []
    for m in range(n_sites // 2, 0, -1):
        delta = n_sites - 2 * m
        exact = predicted_purity(m, n_sites - m, q)
        leading = predicted_purity_leading(m, n_sites - m)
        rows.append(
            AsymptoticRow(
                delta_n=delta,
                exact=exact,
                leading=leading,
                relative_gap=abs(exact - leading) * 2.0**m,
            )
        )
    return rows
