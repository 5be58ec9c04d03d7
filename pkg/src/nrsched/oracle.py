"""Reference solvers for a single slot: exhaustive enumeration and per-RB greedy."""

from __future__ import annotations

import numpy as np

MAX_CANDIDATES = 10**7
_CHUNK = 1 << 16


def _check_gains(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or 0 in g.shape:
        raise ValueError("gain matrix must be a nonempty U x B array")
    if not np.all(np.isfinite(g)) or np.any(g < 0):
        raise ValueError("gains must be finite and nonnegative")
    return g


def exhaustive_allocate(g) -> tuple[np.ndarray, float]:
    """Best one-UE-per-RB allocation by brute force.

    Candidates are enumerated in lexicographic order of the assignment vector
    (RB 0 most significant) and the first maximizer wins. A column whose gains
    are all zero may also stay unassigned; that option sorts after every UE.
    """
    g = _check_gains(g)
    num_ues, num_rbs = g.shape
    if num_ues**num_rbs > MAX_CANDIDATES:
        raise ValueError(f"{num_ues}^{num_rbs} candidates exceed the {MAX_CANDIDATES} guard")

    empty_ok = ~np.any(g > 0, axis=0)
    radices = tuple(num_ues + int(e) for e in empty_ok)
    padded = np.vstack([g, np.zeros((1, num_rbs))])  # row U = unassigned
    total = int(np.prod(radices, dtype=np.int64))
    cols = np.arange(num_rbs)

    best_value, best_index = -np.inf, 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        digits = np.stack(np.unravel_index(idx, radices), axis=1)
        values = padded[digits, cols].sum(axis=1)
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_value, best_index = float(values[k]), int(idx[k])

    assign = np.array(np.unravel_index(best_index, radices))
    x = np.zeros((num_ues, num_rbs), dtype=np.int8)
    used = assign < num_ues
    x[assign[used], cols[used]] = 1
    return x, float(best_value)


def greedy_gpf(g) -> tuple[np.ndarray, float]:
    """Give each RB to its highest-gain UE (lowest index on ties)."""
    g = _check_gains(g)
    num_ues, num_rbs = g.shape
    cols = np.arange(num_rbs)
    winners = np.argmax(g, axis=0)
    x = np.zeros((num_ues, num_rbs), dtype=np.int8)
    x[winners, cols] = 1
    return x, float(g[winners, cols].sum())
