"""Deterministic summary statistics for ensemble runs.

Sums use ``math.fsum`` and values are consumed in caller-supplied
(sample-index) order, so aggregates are bit-reproducible no matter how the
samples were computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class SampleStats:
    """Mean / spread summary of one scalar statistic over an ensemble."""

    mean: float
    std: float
    standard_error: float
    sample_count: int

    def z_score(self, prediction: float) -> float | None:
        """(mean - prediction) / SE, or None when the SE is zero."""
        if self.standard_error == 0.0:
            return None
        return (self.mean - prediction) / self.standard_error


def summarize(values: Iterable[float]) -> SampleStats:
    """Sample mean, ddof=1 standard deviation and standard error.

    A single-value ensemble gets std = SE = 0 rather than NaN.
    """
    vals = [float(v) for v in values]
    n = len(vals)
    if n == 0:
        raise ValueError("cannot summarize an empty collection")
    mean = math.fsum(vals) / n
    if n == 1:
        return SampleStats(mean=mean, std=0.0, standard_error=0.0, sample_count=1)
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    std = math.sqrt(var)
    return SampleStats(mean=mean, std=std, standard_error=std / math.sqrt(n), sample_count=n)
