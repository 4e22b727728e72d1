from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from mvdyn.core import FiniteMultiSystem

DATA = Path(__file__).parent / "data"

SIGMA = FiniteMultiSystem(((0, 1), (1, 0)), name="identity and swap")
TAU = FiniteMultiSystem(((0, 0), (1, 1)), name="two constants")


@st.composite
def systems(draw, max_m=4, max_n=3):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    maps = tuple(tuple(draw(st.lists(st.integers(0, m - 1), min_size=m, max_size=m))) for _ in range(n))
    return FiniteMultiSystem(maps)


def words(n, max_len=4):
    return st.lists(st.integers(1, n), max_size=max_len).map(tuple)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)
