import numpy as np
import pytest

from torsor.complex import random_complex


def acyclic_feasible(dims):
    r = 0
    for j, n in enumerate(dims):
        r = n - r
        nxt = dims[j + 1] if j + 1 < len(dims) else 0
        if r < 0 or r > nxt:
            return False
    return r == 0


def corpus(count=50, seed=0, max_len=5, max_dim=6):
    """Seeded random complexes of length <= max_len and dims <= max_dim."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(2, max_len + 2))
        dims = tuple(int(x) for x in rng.integers(0, max_dim + 1, size=n))
        acyclic = i % 3 == 0 and acyclic_feasible(dims)
        out.append(random_complex(dims, seed=1000 + i, random_grams=bool(i % 2), acyclic=acyclic))
    return out


@pytest.fixture(scope="session")
def random_corpus():
    return corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
