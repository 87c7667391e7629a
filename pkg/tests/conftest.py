import random

import pytest

from tta.env.types import N_BUTTONS


def make_buttons(*slots: int) -> tuple:
    v = [False] * N_BUTTONS
    for s in slots:
        v[s] = True
    return tuple(v)


@pytest.fixture
def btn():
    return make_buttons


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
