import itertools

import pytest

from digraph_lab.digraph import build_digraph
from digraph_lab.occurrence import IntSequence
from digraph_lab.patterns import three_source_pattern, k_star, prepare_pattern

TRI_EDGES = [(1, 2), (4, 3), (3, 2), (6, 7), (7, 2), (3, 5), (5, 4)]
SAMPLE_SEQUENCE = [1, 2, 1, 3, 2, 1]


@pytest.fixture
def tri():
    return three_source_pattern()


@pytest.fixture
def tri_dec():
    return prepare_pattern(three_source_pattern())


@pytest.fixture
def star3_dec():
    return prepare_pattern(k_star(3))


@pytest.fixture
def sample_seq():
    return IntSequence(SAMPLE_SEQUENCE, 3)


def brute_force_embeddings(h, g):
    """Independent oracle: try every injective vertex map."""
    h_edges = h.edges()
    g_edges = set(g.edges())
    count = 0
    for phi in itertools.permutations(range(1, g.n + 1), h.n):
        if all((phi[u - 1], phi[v - 1]) in g_edges for u, v in h_edges):
            count += 1
    return count


def small_graph(n, d, edges):
    return build_digraph(n, d, edges)


# -- acceptance report -----------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
