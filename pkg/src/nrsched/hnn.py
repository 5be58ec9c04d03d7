"""2-D Hopfield network for one slot's RB allocation.

Neuron (u, b) fires when RB b is given to UE u. Neurons are flattened
row-major, ``n = u * B + b``, and the 4-index weights w[(u,b),(k,l)] live in
an (U*B) x (U*B) sparse matrix. Networks built from the GPF objective only
carry self-weights, but the update and energy code accepts any symmetric
weight matrix so the classical dynamics can be exercised on their own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from nrsched.channel import ChannelState, ResourceGrid
from nrsched.rate import GpfParams, gain_matrix

TIE_LOWEST = "lowest-index"
TIE_RANDOM = "seeded-random"


@dataclass
class HopfieldNetwork:
    num_users: int
    num_rbs: int
    weights: sp.csr_array
    thresholds: np.ndarray
    state: np.ndarray

    def __post_init__(self):
        n = self.num_users * self.num_rbs
        if self.weights.shape != (n, n):
            raise ValueError(f"weights must be {n}x{n}, got {self.weights.shape}")
        if self.thresholds.shape != (self.num_users, self.num_rbs):
            raise ValueError("thresholds must be U x B")
        if self.state.shape != (self.num_users, self.num_rbs):
            raise ValueError("state must be U x B")
        self._diag = self.weights.diagonal()
        off = self.weights - sp.diags_array(self._diag, format="csr")
        off.eliminate_zeros()
        self.is_diagonal = off.nnz == 0

    @classmethod
    def from_dense(cls, w: np.ndarray, thresholds=None, state=None) -> "HopfieldNetwork":
        """Wrap a dense U x B x U x B weight tensor."""
        u, b = w.shape[:2]
        if w.shape != (u, b, u, b):
            raise ValueError("dense weights must have shape (U, B, U, B)")
        theta = np.zeros((u, b)) if thresholds is None else np.asarray(thresholds, float)
        v = np.zeros((u, b), dtype=np.int8) if state is None else np.asarray(state, np.int8)
        return cls(u, b, sp.csr_array(w.reshape(u * b, u * b)), theta, v.copy())

    def index(self, u: int, b: int) -> int:
        if not (0 <= u < self.num_users and 0 <= b < self.num_rbs):
            raise IndexError(f"neuron ({u}, {b}) outside {self.num_users}x{self.num_rbs}")
        return u * self.num_rbs + b

    def weight(self, u: int, b: int, i: int, j: int) -> float:
        return float(self.weights[self.index(u, b), self.index(i, j)])

    @property
    def self_weights(self) -> np.ndarray:
        return self._diag.reshape(self.num_users, self.num_rbs)

    def is_symmetric(self, tol: float = 0.0) -> bool:
        diff = abs(self.weights - self.weights.T)
        return diff.nnz == 0 or diff.max() <= tol


@dataclass
class UpdateTrace:
    sweep_count: int = 0
    energy_series: list[float] = field(default_factory=list)
    converged: bool = False


def delta(u: int, b: int, i: int, j: int, num_users: int | None = None, num_rbs: int | None = None) -> int:
    """Kronecker delta over neuron index pairs."""
    for name, val, bound in (("u", u, num_users), ("i", i, num_users), ("b", b, num_rbs), ("j", j, num_rbs)):
        if val < 0 or (bound is not None and val >= bound):
            raise IndexError(f"{name}={val} out of range")
    return int(u == i and b == j)


def network_from_gains(g: np.ndarray) -> HopfieldNetwork:
    """Self-weights from a U x B gain matrix, zero thresholds, all-off state."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2:
        raise ValueError("gain matrix must be U x B")
    u, b = g.shape
    w = sp.diags_array(g.ravel(), format="csr")
    return HopfieldNetwork(u, b, w, np.zeros((u, b)), np.zeros((u, b), dtype=np.int8))


def build_network(
    channels: Sequence[ChannelState], averages, grid: ResourceGrid, params: GpfParams
) -> HopfieldNetwork:
    """Network whose energy minimum is the GPF-optimal allocation for the slot.

    The only nonzero weights are w[(u,b),(u,b)] = f_b log2(1 + snr_u) /
    max(avg_u, floor)^alpha, and all thresholds are 0.
    """
    return network_from_gains(gain_matrix(channels, averages, grid, params))


def energy(network: HopfieldNetwork, state=None) -> float:
    """E(v) = -1/2 sum w_{ubkl} v_{ub} v_{kl} + sum theta_{ub} v_{ub}."""
    v = network.state if state is None else np.asarray(state)
    v = v.astype(float).ravel()
    quad = float(v @ (network.weights @ v))
    return -0.5 * quad + float(network.thresholds.ravel() @ v)


def _net_input(network: HopfieldNetwork, u: int, b: int, state: np.ndarray) -> float:
    row = network.weights[[network.index(u, b)], :]
    return float((row @ state.astype(float).ravel())[0])


def generic_update(network: HopfieldNetwork, u: int, b: int) -> int:
    """Classical threshold rule for one neuron; mutates and returns its new state."""
    h = _net_input(network, u, b, network.state)
    bit = int(h >= network.thresholds[u, b])
    network.state[u, b] = bit
    return bit


def activation(
    network: HopfieldNetwork, u: int, b: int, candidate_state=None, candidate_firing: bool = True
) -> float:
    """Input y_ub = sum_{k,l} w_{ubkl} x_kl - theta_ub.

    With ``candidate_firing`` the neuron's own state is taken as 1 while
    evaluating the sum; this is the rule the scheduler uses, and for a
    self-weight-only network it gives y_ub = w_{ubub}.
    """
    x = network.state if candidate_state is None else np.asarray(candidate_state)
    x = np.array(x, dtype=float)
    network.index(u, b)
    if candidate_firing:
        x[u, b] = 1.0
    return _net_input(network, u, b, x) - float(network.thresholds[u, b])


def _column_activations(network: HopfieldNetwork, b: int, x: np.ndarray) -> np.ndarray:
    rows = np.arange(network.num_users) * network.num_rbs + b
    sub = network.weights[rows, :]
    h = sub @ x.astype(float).ravel()
    # candidate firing: add the self term for neurons currently off
    h = h + network._diag[rows] * (1.0 - x[:, b])
    return h - network.thresholds[:, b]


def _argmax(y: np.ndarray, rng: np.random.Generator | None, incumbent: np.ndarray) -> int:
    if rng is None:
        return int(np.argmax(y))
    best = np.flatnonzero(y == y.max())
    if len(best) == 1:
        return int(best[0])
    held = best[incumbent[best] == 1]
    # a tied neuron that already fires keeps the RB, otherwise sweeps never settle
    if len(held):
        return int(held[0])
    return int(best[rng.integers(len(best))])


def winner_take_all_sweep(
    network: HopfieldNetwork, trace: UpdateTrace | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """One pass over the RB columns in ascending order, firing one neuron per column.

    Ties go to the lowest UE index unless ``rng`` is given, in which case a
    tied winner is picked uniformly with it (a tied neuron that is already
    firing keeps the RB). Mutates ``network.state`` and
    returns a copy of the new allocation.
    """
    x = network.state
    if network.is_diagonal:
        # activations do not depend on the state, so columns update independently
        y = network.self_weights - network.thresholds
        if rng is None:
            winners = np.argmax(y, axis=0)
        else:
            winners = np.array(
                [_argmax(y[:, b], rng, x[:, b]) for b in range(network.num_rbs)], dtype=int
            )
        x[:] = 0
        x[winners, np.arange(network.num_rbs)] = 1
    else:
        for b in range(network.num_rbs):
            y = _column_activations(network, b, x)
            win = _argmax(y, rng, x[:, b])
            x[:, b] = 0
            x[win, b] = 1
    if trace is not None:
        trace.sweep_count += 1
        trace.energy_series.append(energy(network))
    return x.copy()


def solve(
    network: HopfieldNetwork, max_sweeps: int = 10, rng: np.random.Generator | None = None
) -> tuple[np.ndarray, UpdateTrace]:
    """Sweep until the state repeats or ``max_sweeps`` is reached."""
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be >= 1")
    trace = UpdateTrace()
    previous = network.state.copy()
    for _ in range(max_sweeps):
        current = winner_take_all_sweep(network, trace, rng)
        if np.array_equal(current, previous):
            trace.converged = True
            break
        previous = current
    return network.state.copy(), trace
