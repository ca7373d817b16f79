import numpy as np
import pytest


def random_radii(rng, n, lo=0.6, hi=3.4, min_rel_gap=0.02):
    """Random pairwise-distinct radii (generic by a comfortable margin)."""
    while True:
        r = rng.uniform(lo, hi, n)
        diff = np.abs(r[:, None] - r[None, :])
        scale = np.maximum(r[:, None], r[None, :])
        off = ~np.eye(n, dtype=bool)
        if np.all(diff[off] > min_rel_gap * scale[off]):
            return r


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
