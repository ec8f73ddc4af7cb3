import math

import numpy as np
import pytest

from hypersc.manifolds import Hyperboloid, from_coords


def random_point(H, rng, spread=1.0):
    """Point within unit-curvature distance ``spread`` of the apex."""
    o = H.origin()
    c = rng.normal(size=H.dim)
    c *= spread * rng.uniform() / (np.linalg.norm(c) * math.sqrt(H.kappa))
    return H.exp(o, from_coords(H, o, c))


def random_tangent(M, x, rng, scale=1.0):
    return from_coords(M, x, rng.normal(size=M.dim) * scale)


def unit_tangent(M, x, rng):
    c = rng.normal(size=M.dim)
    return from_coords(M, x, c / np.linalg.norm(c))


def point_at(H, x, l, rng):
    """Point at metric distance ``l`` from ``x`` in a random direction."""
    return H.exp(x, unit_tangent(H, x, rng) * l)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=[(2, 1.0), (3, 1.0), (2, 4.0), (3, 0.25)], ids=lambda p: f"H{p[0]}-k{p[1]}")
def space(request):
    return Hyperboloid(*request.param)
