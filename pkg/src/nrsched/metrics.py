"""Fairness, sum rate and empirical CDFs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class EcdfCurve:
    points: tuple[tuple[float, float], ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.points])

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.points])

    def quantile(self, q: float) -> float:
        """Smallest value whose cumulative probability reaches ``q``."""
        if not 0.0 < q <= 1.0:
            raise ValueError("q must lie in (0, 1]")
        for value, prob in self.points:
            if prob >= q:
                return value
        return self.points[-1][0]

    def median(self) -> float:
        return self.quantile(0.5)


def jains_index(values: Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("need a nonempty 1-D vector")
    if np.any(v < 0):
        raise ValueError("values must be nonnegative")
    sq = float(np.dot(v, v))
    if sq == 0.0:
        raise ValueError("Jain's index is undefined for an all-zero vector")
    return float(v.sum()) ** 2 / (v.size * sq)


def ecdf(samples: Iterable[float]) -> EcdfCurve:
    """Right-continuous empirical CDF; one point per distinct value."""
    x = np.sort(np.asarray(list(samples), dtype=float))
    if x.size == 0:
        raise ValueError("ECDF of an empty sample")
    values, counts = np.unique(x, return_counts=True)
    cum = np.cumsum(counts)
    n = x.size
    points = tuple((float(v), float(c / n)) for v, c in zip(values, cum))
    return EcdfCurve(points)


def sum_rate(rates: Iterable[float]) -> float:
    # fsum is exact, so the total does not depend on UE order
    return math.fsum(rates)


def to_mbps(bps: float) -> float:
    return bps / 1e6
