import numpy as np
import pytest

from mhdbox.dynamics import PhysParams, State
from mhdbox.spectral import Grid, ScalarField, VectorField, perp_grad, random_smooth_field


@pytest.fixture(scope="session")
def grid32():
    return Grid(32, 32)


@pytest.fixture(scope="session")
def grid48():
    return Grid(48, 48)


@pytest.fixture(scope="session")
def grid64():
    return Grid(64, 64)


@pytest.fixture(scope="session")
def params():
    return PhysParams()


def mode_field(grid, k, amplitude):
    """Real field amplitude*2*Re(a e^{ik.x}) from a single coefficient."""
    c = grid.zeros()
    c[k[0] % grid.n1, k[1] % grid.n2] = amplitude
    c[(-k[0]) % grid.n1, (-k[1]) % grid.n2] = np.conj(amplitude)
    return ScalarField(grid, c)


def cos_field(grid, k):
    return mode_field(grid, k, 0.5)


def sin_field(grid, k):
    return mode_field(grid, k, -0.5j)


def random_state(grid, seed, amplitude, decay=0.7):
    rho = random_smooth_field(grid, (seed, 1), amplitude, decay)
    u = VectorField(random_smooth_field(grid, (seed, 2), amplitude, decay),
                    random_smooth_field(grid, (seed, 3), amplitude, decay))
    b = perp_grad(random_smooth_field(grid, (seed, 4), amplitude, decay))
    return State(rho, u, b)
