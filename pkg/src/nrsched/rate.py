"""Shannon rate per UE, EWMA average rate, and the GPF slot objective."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from nrsched.channel import ChannelState, ResourceGrid


@dataclass(frozen=True)
class GpfParams:
    alpha: float = 1.0
    average_floor_bps: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.average_floor_bps <= 0:
            raise ValueError("average_floor_bps must be > 0")


@dataclass(frozen=True)
class UeRateState:
    instantaneous_bps: float = 0.0
    average_bps: float = 1.0
    ewma_epsilon: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.ewma_epsilon <= 1.0:
            raise ValueError("ewma_epsilon must lie in [0, 1]")
        if self.average_bps < 0:
            raise ValueError("average_bps must be >= 0")


@dataclass
class ConstraintReport:
    """Outcome of a feasibility check; ``violations`` holds offending (u, b) pairs."""

    violations: list[tuple[int, int]] = field(default_factory=list)
    columns: list[int] = field(default_factory=list)
    non_binary: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.violations or self.non_binary)

    def __bool__(self) -> bool:
        return self.ok


def instantaneous_rate(allocation_row, channel: ChannelState, grid: ResourceGrid) -> float:
    """Rate in bps for one UE given its row of the allocation matrix."""
    row = np.asarray(allocation_row, dtype=float)
    if row.shape != (grid.num_rbs,):
        raise ValueError(f"allocation row has shape {row.shape}, grid has {grid.num_rbs} RBs")
    return float(np.dot(grid.bandwidths, row) * np.log2(1.0 + channel.snr))


def rates(x, channels: Sequence[ChannelState], grid: ResourceGrid) -> np.ndarray:
    """Vector of per-UE rates for a full allocation matrix."""
    x = _as_matrix(x, len(channels), grid.num_rbs)
    spectral = np.log2(1.0 + np.array([c.snr for c in channels]))
    return (x @ grid.bandwidths) * spectral


def update_average_rate(state: UeRateState, new_rate: float) -> UeRateState:
    if new_rate < 0:
        raise ValueError("rate must be nonnegative")
    eps = state.ewma_epsilon
    avg = eps * state.average_bps + (1.0 - eps) * new_rate
    return replace(state, instantaneous_bps=float(new_rate), average_bps=float(avg))


def update_averages(averages, new_rates, epsilon: float) -> np.ndarray:
    """Array form of :func:`update_average_rate` across all UEs."""
    averages = np.asarray(averages, dtype=float)
    return epsilon * averages + (1.0 - epsilon) * np.asarray(new_rates, dtype=float)


def floored(averages, params: GpfParams) -> np.ndarray:
    avg = np.asarray(averages, dtype=float)
    return np.maximum(avg, params.average_floor_bps)


def gain_matrix(
    channels: Sequence[ChannelState], averages, grid: ResourceGrid, params: GpfParams
) -> np.ndarray:
    """Per-(UE, RB) objective coefficient f_b log2(1 + snr_u) / max(avg_u, floor)^alpha."""
    averages = np.asarray(averages, dtype=float)
    if averages.shape != (len(channels),):
        raise ValueError("need one average per channel state")
    spectral = np.log2(1.0 + np.array([c.snr for c in channels], dtype=float))
    weight = spectral / floored(averages, params) ** params.alpha
    return np.outer(weight, grid.bandwidths)


def gpf_objective(
    x, channels: Sequence[ChannelState], averages, grid: ResourceGrid, params: GpfParams
) -> float:
    """Sum over UEs of r_u / max(avg_u, floor)^alpha for allocation ``x``."""
    averages = np.asarray(averages, dtype=float)
    if averages.shape != (len(channels),):
        raise ValueError("need one average per channel state")
    r = rates(x, channels, grid)
    return float(np.sum(r / floored(averages, params) ** params.alpha))


def check_constraints(x) -> ConstraintReport:
    """Each RB goes to at most one UE; entries are 0 or 1. An empty allocation is feasible."""
    x = np.asarray(x)
    report = ConstraintReport()
    if x.ndim != 2:
        raise ValueError("allocation must be a U x B matrix")
    bad = ~((x == 0) | (x == 1))
    report.non_binary = [(int(u), int(b)) for u, b in zip(*np.nonzero(bad))]
    col_sums = np.where(bad, 1, x).sum(axis=0)
    for b in np.flatnonzero(col_sums > 1):
        report.columns.append(int(b))
        report.violations.extend((int(u), int(b)) for u in np.flatnonzero(x[:, b]))
    return report


def _as_matrix(x, num_ues: int, num_rbs: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (num_ues, num_rbs):
        raise ValueError(f"allocation has shape {x.shape}, expected {(num_ues, num_rbs)}")
    return x
