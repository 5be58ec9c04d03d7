"""NR resource grid and per-slot channel gains.

Gains follow a log-distance path loss times unit-mean exponential (Rayleigh
power) fading. Fading draws come from a Philox stream keyed by the fading
seed with the counter set from (ue, slot), so any sample can be reproduced
without replaying earlier slots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ALLOWED_SPACINGS_HZ = (15e3, 30e3, 60e3, 120e3, 240e3, 480e3)
SLOT_DURATION_S = 1e-3


@dataclass(frozen=True)
class Numerology:
    subcarrier_spacing_hz: float
    subcarriers_per_rb: int = 12

    def __post_init__(self):
        if self.subcarrier_spacing_hz not in ALLOWED_SPACINGS_HZ:
            raise ValueError(
                f"subcarrier spacing {self.subcarrier_spacing_hz:g} Hz not in "
                f"{[f'{s:g}' for s in ALLOWED_SPACINGS_HZ]}"
            )
        if self.subcarriers_per_rb < 1:
            raise ValueError("subcarriers_per_rb must be positive")

    @property
    def rb_bandwidth_hz(self) -> float:
        return self.subcarrier_spacing_hz * self.subcarriers_per_rb


@dataclass(frozen=True)
class ResourceBlock:
    index: int
    bandwidth_hz: float


@dataclass(frozen=True)
class ResourceGrid:
    rbs: tuple[ResourceBlock, ...]
    total_bandwidth_hz: float
    slot_duration_s: float = SLOT_DURATION_S

    def __post_init__(self):
        if self.total_bandwidth_hz <= 0:
            raise ValueError("total bandwidth must be positive")
        if self.slot_duration_s != SLOT_DURATION_S:
            raise ValueError("slot duration is fixed at 1 ms")
        if [rb.index for rb in self.rbs] != list(range(len(self.rbs))):
            raise ValueError("RB indices must be 0..B-1 in order")
        if any(rb.bandwidth_hz <= 0 for rb in self.rbs):
            raise ValueError("RB bandwidths must be positive")
        used = sum(rb.bandwidth_hz for rb in self.rbs)
        if used > self.total_bandwidth_hz * (1 + 1e-12):
            raise ValueError(
                f"RBs occupy {used:g} Hz, more than the {self.total_bandwidth_hz:g} Hz budget"
            )

    @property
    def num_rbs(self) -> int:
        return len(self.rbs)

    @property
    def bandwidths(self) -> np.ndarray:
        """Per-RB bandwidth vector f_b in Hz."""
        return np.array([rb.bandwidth_hz for rb in self.rbs], dtype=float)


def build_grid(numerology: Numerology, num_rbs: int, total_bandwidth_hz: float) -> ResourceGrid:
    """Uniform grid of ``num_rbs`` RBs, each 12 (by default) subcarriers wide."""
    if num_rbs < 1:
        raise ValueError("num_rbs must be positive")
    return build_mixed_grid([(numerology, num_rbs)], total_bandwidth_hz)


def build_mixed_grid(
    parts: Sequence[tuple[Numerology, int]], total_bandwidth_hz: float
) -> ResourceGrid:
    """Concatenate RBs of several numerologies, in the order given.

    ``parts`` is a sequence of ``(numerology, count)`` pairs, e.g.
    ``[(Numerology(15e3), 60), (Numerology(60e3), 40)]``.
    """
    widths: list[float] = []
    for numerology, count in parts:
        if count < 1:
            raise ValueError("every numerology part needs at least one RB")
        widths.extend([numerology.rb_bandwidth_hz] * count)
    if not widths:
        raise ValueError("grid needs at least one RB")
    rbs = tuple(ResourceBlock(i, w) for i, w in enumerate(widths))
    return ResourceGrid(rbs, float(total_bandwidth_hz))


@dataclass(frozen=True)
class UePlacement:
    ue_id: int
    distance_m: float
    tx_power_w: float = 1.0


@dataclass(frozen=True)
class ChannelModel:
    """Large-scale and noise parameters shared by every UE in the cell."""

    total_bandwidth_hz: float
    noise_power_w: float
    pathloss_exponent: float = 3.0
    ref_distance_m: float = 1.0
    static: bool = False  # fading pinned to 1

    def pathloss_gain(self, distance_m):
        return (np.asarray(distance_m, dtype=float) / self.ref_distance_m) ** (
            -self.pathloss_exponent
        )


@dataclass(frozen=True)
class ChannelState:
    ue_id: int
    slot: int
    gain: float
    snr: float


def place_ues(
    num_ues: int, cell_radius_m: float, seed: int, min_distance_m: float = 10.0,
    tx_power_w: float = 1.0,
) -> list[UePlacement]:
    """Drop UEs uniformly over the cell area, outside a small exclusion disk.

    Radii are drawn as sqrt(d_min^2 + u (R^2 - d_min^2)), which is uniform in
    area over the annulus [d_min, R].
    """
    if num_ues < 1:
        raise ValueError("num_ues must be >= 1")
    if not 0 <= min_distance_m < cell_radius_m:
        raise ValueError("need 0 <= min_distance_m < cell_radius_m")
    rng = np.random.default_rng(seed)
    u = rng.random(num_ues)
    r2 = min_distance_m**2 + u * (cell_radius_m**2 - min_distance_m**2)
    distances = np.sqrt(r2)
    # u in [0, 1) can give exactly d_min; keep d strictly positive
    distances = np.maximum(distances, np.nextafter(0.0, 1.0))
    return [UePlacement(i, float(d), tx_power_w) for i, d in enumerate(distances)]


def fading_sample(fading_seed: int, ue_id: int, slot: int) -> float:
    """Unit-mean exponential draw for one (ue, slot) cell of the fading field."""
    bitgen = np.random.Philox(key=fading_seed, counter=[0, ue_id, slot, 0])
    return float(np.random.Generator(bitgen).standard_exponential())


def sample_gain(
    placement: UePlacement, slot: int, fading_seed: int, model: ChannelModel
) -> ChannelState:
    if slot < 0:
        raise ValueError("slot must be nonnegative")
    fade = 1.0 if model.static else fading_sample(fading_seed, placement.ue_id, slot)
    gain = float(model.pathloss_gain(placement.distance_m)) * fade
    snr = placement.tx_power_w * gain / (model.noise_power_w * model.total_bandwidth_hz)
    return ChannelState(placement.ue_id, slot, gain, snr)


def sample_channels(
    placements: Sequence[UePlacement], slot: int, fading_seed: int, model: ChannelModel
) -> list[ChannelState]:
    return [sample_gain(p, slot, fading_seed, model) for p in placements]


def noise_for_snr(
    target_snr_db: float,
    distance_m: float,
    total_bandwidth_hz: float,
    pathloss_exponent: float = 3.0,
    ref_distance_m: float = 1.0,
    tx_power_w: float = 1.0,
) -> float:
    """Noise power N_0 that gives ``target_snr_db`` at ``distance_m`` with no fading."""
    gain = (distance_m / ref_distance_m) ** (-pathloss_exponent)
    return tx_power_w * gain / (10 ** (target_snr_db / 10) * total_bandwidth_hz)
