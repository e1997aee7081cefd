import numpy as np
import pytest

from harnack_lab.ensemble import build_orthonormal_basis, default_order
from harnack_lab.geometry import Weight

# standard weights used across the suite: the positively curved base case
# and a pole-centered bump strong enough to create a negative-curvature
# band (checked in test_geometry)
FS = Weight.fubini_study()
PERTURBED = Weight.perturbed(0.5, (0.0, 0.0, 1.0), 1.0)


@pytest.fixture(scope="session")
def onb_factory():
    cache = {}

    def get(n, weight=FS, order=None, method="cholesky"):
        key = (weight.spec_string(), n, order or default_order(n), method)
        if key not in cache:
            cache[key] = build_orthonormal_basis(n, weight, order=order, method=method)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
