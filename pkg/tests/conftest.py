import random

import pytest

from blockforge.fixtures import random_connected_graph


@pytest.fixture(scope="session")
def small_corpus():
    """Thirty seeded connected graphs, n in [4,7]: unit-test scale."""
    rng = random.Random(20260819)
    return [random_connected_graph(rng, rng.randint(4, 7)) for _ in range(30)]


@pytest.fixture(scope="session")
def tiny_corpus(small_corpus):
    """The n <= 6 members, for exhaustive lemma checks."""
    return [g for g in small_corpus if g.n <= 6]
