import numpy as np
import pytest
from hypothesis import settings

from cocyclelab import SFTSpace, SymbolicPoint

settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")


@pytest.fixture
def full2():
    return SFTSpace.full_shift(2)


@pytest.fixture
def golden():
    return SFTSpace.golden_mean()


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)


def random_point(space, rng, max_core=5):
    """Random eventually-periodic point, built from admissible pieces."""
    def admissible_word(length, start=None):
        w = [start if start is not None else int(rng.integers(space.k))]
        while len(w) < length:
            w.append(int(rng.choice(space.successors(w[-1]))))
        return tuple(w)

    while True:
        left = admissible_word(int(rng.integers(1, 4)))
        if not space.admissible_cycle(left):
            continue
        core = ()
        if rng.integers(0, 2):
            nxt = space.successors(left[-1])
            core = admissible_word(int(rng.integers(1, max_core + 1)), int(rng.choice(nxt)))
        prev = core[-1] if core else left[-1]
        right = admissible_word(int(rng.integers(1, 4)), int(rng.choice(space.successors(prev))))
        if not space.admissible_cycle(right):
            continue
        seam = (left[-1],) + core + (right[0],)
        if not space.admissible_word(seam):
            continue
        return SymbolicPoint.make(space, left, core, right, int(rng.integers(-4, 5)))
