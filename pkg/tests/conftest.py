import numpy as np
import pytest

from bopim.diffusion import relevant_contacts
from bopim.temporal_graph import TemporalGraph

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_criterion():
    """Record a one-line verdict that is echoed in the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def random_temporal_graph(rng: np.random.Generator, n: int, T: int, p: float) -> TemporalGraph:
    snaps = []
    for _ in range(T):
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(len(iu)) < p
        snaps.append(list(zip(iu[keep], ju[keep])))
    return TemporalGraph.from_snapshots(n, snaps)


def small_enumerable_graph(rng: np.random.Generator, seeds, max_contacts: int = 12, n: int = 6, T: int = 3, p: float = 0.3):
    """Random graph whose seed-reachable contact count is at most ``max_contacts``."""
    while True:
        G = random_temporal_graph(rng, n, T, p)
        if 0 < relevant_contacts(G, seeds) <= max_contacts:
            return G


@pytest.fixture
def path_graph():
    # 0-1 in the first snapshot, 1-2 in the second
    return TemporalGraph.from_snapshots(3, [[(0, 1)], [(1, 2)]])
