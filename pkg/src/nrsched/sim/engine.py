"""Slot loop, replications and alpha sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from nrsched import hnn, oracle
from nrsched.channel import ChannelModel, ResourceGrid, UePlacement, place_ues, sample_channels
from nrsched.metrics import ecdf, jains_index, sum_rate, to_mbps
from nrsched.rate import GpfParams, check_constraints, gain_matrix, rates, update_averages
from nrsched.sim.config import SimulationConfig

log = logging.getLogger(__name__)

_TIE_STREAM = 0x71E  # keeps tie-break draws apart from the placement stream


class SolverError(RuntimeError):
    def __init__(self, message: str, alpha: float, seed: int, slot: int):
        self.alpha, self.seed, self.slot = alpha, seed, slot
        super().__init__(f"{message} (alpha={alpha!r}, seed={seed}, slot={slot})")


@dataclass
class SlotRecord:
    slot: int
    alpha: float
    seed: int
    rates_bps: np.ndarray
    averages_bps: np.ndarray
    sum_rate_bps: float
    fairness: float
    sweeps: int
    energy: float
    allocation: np.ndarray  # U x B, int8

    @property
    def owners(self) -> np.ndarray:
        """UE index holding each RB, -1 where the RB is unassigned."""
        x = self.allocation
        return np.where(x.any(axis=0), np.argmax(x, axis=0), -1)


@dataclass
class ReplicationState:
    """Everything one (alpha, seed) replication carries from slot to slot."""

    config: SimulationConfig
    alpha: float
    seed: int
    grid: ResourceGrid
    model: ChannelModel
    params: GpfParams
    placements: list[UePlacement]
    averages: np.ndarray
    tie_rng: np.random.Generator | None = None

    @classmethod
    def initial(cls, config: SimulationConfig, alpha: float, seed: int) -> "ReplicationState":
        params = GpfParams(alpha=alpha, average_floor_bps=config.average_floor_bps)
        placements = place_ues(
            config.num_ues, config.cell_radius_m, seed,
            min_distance_m=config.min_distance_m, tx_power_w=config.tx_power_w,
        )
        tie_rng = None
        if config.tie_rule == hnn.TIE_RANDOM:
            tie_rng = np.random.default_rng([seed, _TIE_STREAM])
        return cls(
            config=config, alpha=alpha, seed=seed, grid=config.grid(),
            model=config.channel_model(), params=params, placements=placements,
            averages=np.full(config.num_ues, config.average_floor_bps), tie_rng=tie_rng,
        )


def _allocate(state: ReplicationState, g: np.ndarray, slot: int) -> tuple[np.ndarray, int]:
    solver = state.config.solver
    if solver == "hnn":
        net = hnn.network_from_gains(g)
        x, trace = hnn.solve(net, state.config.max_sweeps, rng=state.tie_rng)
        if not trace.converged:
            raise SolverError(
                f"Hopfield network did not settle within {state.config.max_sweeps} sweeps",
                state.alpha, state.seed, slot,
            )
        # the last sweep only confirms the fixed point
        return x, trace.sweep_count - 1
    if solver == "greedy":
        x, _ = oracle.greedy_gpf(g)
        return x, 1
    x, _ = oracle.exhaustive_allocate(g)
    return x, 0


def run_slot(state: ReplicationState, slot: int) -> SlotRecord:
    """Schedule one slot and advance the average rates in ``state``."""
    channels = sample_channels(state.placements, slot, state.seed, state.model)
    g = gain_matrix(channels, state.averages, state.grid, state.params)
    x, sweeps = _allocate(state, g, slot)
    report = check_constraints(x)
    if not report.ok:
        raise SolverError(f"infeasible allocation on RBs {report.columns}", state.alpha, state.seed, slot)

    r = rates(x, channels, state.grid)
    state.averages = update_averages(state.averages, r, state.config.ewma_epsilon)
    return SlotRecord(
        slot=slot,
        alpha=state.alpha,
        seed=state.seed,
        rates_bps=r,
        averages_bps=state.averages.copy(),
        sum_rate_bps=sum_rate(r),
        fairness=jains_index(state.averages),
        sweeps=sweeps,
        energy=hnn.energy(hnn.network_from_gains(g), x),
        allocation=x.astype(np.int8),
    )


def run_replication(config: SimulationConfig, alpha: float, seed: int) -> list[SlotRecord]:
    state = ReplicationState.initial(config, alpha, seed)
    return [run_slot(state, t) for t in range(config.num_slots)]


def _run_cell(args) -> list[SlotRecord]:
    return run_replication(*args)


@dataclass
class RunArtifact:
    config: SimulationConfig
    records: dict[tuple[float, int], list[SlotRecord]] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def post_warmup(self, alpha: float, seed: int | None = None) -> list[SlotRecord]:
        seeds = self.config.seeds if seed is None else (seed,)
        w = self.config.warmup_slots
        return [rec for s in seeds for rec in self.records[(alpha, s)][w:]]


def run_experiment(config: SimulationConfig, jobs: int = 1) -> RunArtifact:
    """Run every (alpha, seed) cell; the results do not depend on ``jobs``."""
    config.validate()
    cells = [(config, a, s) for a in config.alphas for s in config.seeds]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]
    artifact = RunArtifact(config)
    for (_, a, s), recs in zip(cells, results):
        artifact.records[(a, s)] = recs
    artifact.summary = summarize(artifact)
    return artifact


def _spread(values) -> dict:
    curve = ecdf(values)
    return {"min": curve.points[0][0], "median": curve.median(), "max": curve.points[-1][0]}


def summarize(artifact: RunArtifact) -> dict:
    config = artifact.config
    summary = {}
    for alpha in config.alphas:
        recs = artifact.post_warmup(alpha)
        sums = [to_mbps(r.sum_rate_bps) for r in recs]
        per_seed = {}
        for seed in config.seeds:
            own = artifact.post_warmup(alpha, seed)
            per_seed[str(seed)] = {
                "fairness_median": ecdf(r.fairness for r in own).median(),
                "sum_rate_mbps_median": ecdf(to_mbps(r.sum_rate_bps) for r in own).median(),
            }
        summary[repr(float(alpha))] = {
            "fairness": _spread([r.fairness for r in recs]),
            "sum_rate_mbps": _spread(sums),
            "num_slots": config.num_slots,
            "warmup_slots": config.warmup_slots,
            "seeds": list(config.seeds),
            "per_seed": per_seed,
            "sum_rate_ecdf": [list(p) for p in ecdf(sums).points],
        }
    return summary
