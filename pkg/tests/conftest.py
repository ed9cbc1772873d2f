import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from fadingbc import ErasurePmf, FadingDist  # noqa: E402


@pytest.fixture
def ex1():
    # Fbar1 = (1, 3/4, 1/4), Fbar2 = (1, 1/2, 1/2)
    return ErasurePmf(2, (0.25, 0.5, 0.25)), ErasurePmf(2, (0.5, 0.0, 0.5))


@pytest.fixture
def ex2():
    # Fbar1 = (1, 3/4, 0), Fbar2 = (1, 1/2, 1/2)
    return ErasurePmf(2, (0.25, 0.75, 0.0)), ErasurePmf(2, (0.5, 0.0, 0.5))


def random_pmf(rng: np.random.Generator, q: int) -> ErasurePmf:
    w = rng.exponential(size=q + 1)
    w[rng.random(q + 1) < 0.2] = 0.0
    if w.sum() == 0:
        w[-1] = 1.0
    p = w / w.sum()
    p[-1] = 1.0 - p[:-1].sum()
    return ErasurePmf(q, tuple(max(x, 0.0) for x in p))


@st.composite
def pmf_pairs(draw, max_q=8):
    q = draw(st.integers(1, max_q))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return random_pmf(rng, q), random_pmf(rng, q)


@st.composite
def fading_dists(draw):
    kind = draw(st.sampled_from(["intermittent", "rayleigh", "mixture"]))
    snr = draw(st.floats(0.5, 1e4))
    if kind == "intermittent":
        return FadingDist.intermittent(draw(st.floats(0.05, 1.0)), snr)
    if kind == "rayleigh":
        return FadingDist.rayleigh(snr)
    w = draw(st.floats(0.1, 0.9))
    return FadingDist.mixture([w, 1 - w], [FadingDist.intermittent(1.0, snr), FadingDist.rayleigh(draw(st.floats(0.5, 1e3)))])
