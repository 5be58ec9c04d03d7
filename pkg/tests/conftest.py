import itertools

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def brute_force_best(g):
    """Plain itertools search over every RB -> UE assignment; returns (value, assignment)."""
    g = np.asarray(g, dtype=float)
    num_ues, num_rbs = g.shape
    best = (-np.inf, None)
    for assign in itertools.product(range(num_ues), repeat=num_rbs):
        value = sum(g[u][b] for b, u in enumerate(assign))
        if value > best[0]:
            best = (value, assign)
    return best


def random_gains(rng, num_ues, num_rbs, zero_prob=0.1):
    """Nonnegative gain matrix with some exact ties and zeros mixed in."""
    g = rng.exponential(1.0, (num_ues, num_rbs)) * rng.choice([1e-3, 1.0, 1e3])
    g[rng.random(g.shape) < zero_prob] = 0.0
    if rng.random() < 0.3:
        b = rng.integers(num_rbs)
        g[:, b] = g[0, b]
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
