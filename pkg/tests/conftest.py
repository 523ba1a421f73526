from __future__ import annotations

import random

import pytest

from gridhfk.gridkit import GridDiagram, component_count

# Braid words for the knots used as fixtures, verified against the Alexander
# polynomial oracle in test_gridkit (and pinned there with the literature
# values).
BRAIDS = {
    "unknot": [1],
    "trefoil": [1, 1, 1],
    "figure8": [1, -2, 1, -2],
    "5_2": [1, 1, 1, 2, -1, 2],
    "8_19": [1, 2, 1, 2, 1, 2, 1, 2],
    "8_20": [1, 1, 1, -2, -1, -1, -1, -2],
    "8_21": [1, 1, 1, 2, -1, -1, 2, 2],
}


def random_grid(n: int, rng: random.Random) -> GridDiagram:
    """A uniformly sampled valid one-component grid diagram of size ``n``."""
    rows = list(range(n))
    while True:
        xs = rows[:]
        os = rows[:]
        rng.shuffle(xs)
        rng.shuffle(os)
        if any(x == o for x, o in zip(xs, os)):
            continue
        g = GridDiagram(tuple(xs), tuple(os))
        if component_count(g) == 1:
            return g


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260815)
