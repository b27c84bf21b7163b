from __future__ import annotations

import pytest

from mdcsr.bounds import level_capacity
from mdcsr.system import System, SystemParams, build_system


def grid_system(d: int, l1: int, l2: int, p: int = 257) -> System:
    """An n = d+1 system with one stripe per level (B_j = capacity)."""
    l = l1 + l2
    sizes = {j: level_capacity(d, j, l) for j in range(l + 1, d + 1)}
    return build_system(SystemParams.create(d + 1, d, l1, l2, sizes, p=p))


@pytest.fixture(scope="session")
def fig_system() -> System:
    """The (4, 3, 0, 0) instance with B2 = 15, B3 = 30 over GF(257)."""
    return build_system(SystemParams.create(4, 3, 0, 0, {2: 15, 3: 30}))


@pytest.fixture(scope="session")
def split_system() -> System:
    """The (5, 4, 1, 1) instance with B3 = 2, B4 = 3."""
    return build_system(SystemParams.create(5, 4, 1, 1, {3: 2, 4: 3}))
