import math

import numpy as np
import pytest

from penclose import geometry, mesh, wolff

# Reference periods frozen from a Richardson-extrapolated run of the same
# RK4 integrator at steps 1e-5 and 2e-5 (and cross-checked against an
# adaptive integrator at rtol 1e-12).  They agree with pi * p / (p - 1)
# to ~1e-12, a useful independent sanity anchor.
PERIOD_REFERENCE = {
    1.5: 9.424777960774104,
    3.0: 4.712388980384863,
    4.0: 4.18879020478633,
}

_PROFILE_CACHE = {}


@pytest.fixture(scope="session")
def profiles():
    """Session cache of oscillator profiles keyed by exponent."""

    def get(p, step=1e-3, span=40.0, a0=1.0, b0=0.0):
        key = (p, step, span, a0, b0)
        if key not in _PROFILE_CACHE:
            _PROFILE_CACHE[key] = wolff.integrate_profile(p, a0, b0, step, span)
        return _PROFILE_CACHE[key]

    return get


@pytest.fixture(scope="session")
def unit_square_origin():
    """Side-1 square centered at the origin: the reconstruction domain."""
    return geometry.square((0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def unit_square_01():
    """The square [0, 1]^2 (area 1), convenient for exact energies."""
    return geometry.square((0.5, 0.5), 1.0)


@pytest.fixture(scope="session")
def test_disk():
    """The standard inclusion: disk of radius 0.3 at (0.2, 0.1)."""
    return geometry.Disk(center=(0.2, 0.1), radius=0.3)


def disk_polygon(center, radius, n=512):
    ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return geometry.ConvexPolygon(
        np.column_stack((center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)))
    )


def make_mesh(shape, target_h):
    return mesh.generate_mesh(shape, target_h)
