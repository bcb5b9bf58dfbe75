import numpy as np
import pytest

import exsym as ex


def make_grid(n=2, d=1, m=64, lo=-8.0, hi=8.0, boundary=ex.DIRICHLET):
    return ex.build_grid(ex.GridSpec.cube(n, d, lo, hi, m, boundary))


def l2_distance(a: ex.WaveFunction, b: ex.WaveFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(a.values - b.values) ** 2)
                         * a.grid.volume_element))


def random_normalized(grid, seed):
    return ex.random_state(grid, seed)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(m=64)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(m=32)


@pytest.fixture(scope="session")
def grid16_periodic():
    return make_grid(m=16, boundary=ex.PERIODIC)


@pytest.fixture(scope="session")
def slater64(grid64):
    return ex.slater_state(grid64, [ex.ho_orbital(0), ex.ho_orbital(1)])


@pytest.fixture(scope="session")
def slater32(grid32):
    return ex.slater_state(grid32, [ex.ho_orbital(0), ex.ho_orbital(1)])


@pytest.fixture(scope="session")
def boson64(grid64):
    return ex.symmetrized_product_state(
        grid64, [ex.ho_orbital(0), ex.ho_orbital(1)])


@pytest.fixture(scope="session")
def harmonic_ham():
    return ex.Hamiltonian(ex.PhysicalConstants(), ex.harmonic_trap(1.0))


@pytest.fixture(scope="session")
def interacting_ham():
    scalar = ex.sum_potentials([
        ex.harmonic_trap(1.0),
        ex.pairwise(ex.soft_coulomb_kernel(0.5), 1.0),
    ])
    return ex.Hamiltonian(ex.PhysicalConstants(), scalar)
