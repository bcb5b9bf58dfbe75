import numpy as np
import pytest

import exsym as ex
from exsym import potentials as pots
from exsym.errors import (
    EqualFrequencies,
    NonPositiveFrequency,
    SingularKernel,
)

from conftest import make_grid


def at_config(potential, *points, t=0.0):
    """Evaluate at one configuration given as per-particle coordinate tuples."""
    pts = np.array([points], dtype=float)
    if pts.ndim == 2:  # 1d particles passed as scalars
        pts = pts[:, :, None]
    return float(potential.at_points(pts, t)[0])


class TestHarmonicTrap:
    def test_value(self):
        trap = ex.harmonic_trap(1.0)
        assert at_config(trap, 1.0, 2.0) == pytest.approx(2.5)

    def test_exchange_symmetric_value(self):
        trap = ex.harmonic_trap(1.0)
        assert at_config(trap, 2.0, 1.0) == pytest.approx(2.5)

    def test_zero_frequency_rejected(self):
        with pytest.raises(NonPositiveFrequency):
            ex.harmonic_trap(0.0)

    def test_mass_scaling(self):
        trap = ex.harmonic_trap(2.0, ex.PhysicalConstants(mass=3.0))
        # 0.5 * 3 * 4 * (1 + 4)
        assert at_config(trap, 1.0, 2.0) == pytest.approx(30.0)


class TestPairwise:
    def test_gaussian_kernel_coincident(self):
        pot = ex.pairwise(ex.gaussian_kernel(1.0), strength=0.7)
        assert at_config(pot, 0.3, 0.3) == pytest.approx(0.7)

    def test_bare_coulomb_rejected(self):
        with pytest.raises(SingularKernel):
            ex.pairwise(ex.soft_coulomb_kernel(0.0))

    def test_swap_invariance(self):
        pot = ex.pairwise(ex.soft_coulomb_kernel(0.5), strength=1.3)
        assert at_config(pot, 1.0, -2.0) == at_config(pot, -2.0, 1.0)

    def test_three_particle_sum(self):
        pot = ex.pairwise(ex.soft_coulomb_kernel(1.0), strength=1.0)
        # separations 1, 1, 2 with softening 1
        expected = 1 / np.sqrt(2) + 1 / np.sqrt(2) + 1 / np.sqrt(5)
        assert at_config(pot, 0.0, 1.0, 2.0) == pytest.approx(expected)


class TestAsymmetricTrap:
    def test_values(self):
        trap = ex.asymmetric_trap(1.0, 2.0)
        assert at_config(trap, 1.0, 1.0) == pytest.approx(2.5)
        assert at_config(trap, 1.0, 0.0) == pytest.approx(0.5)
        assert at_config(trap, 0.0, 1.0) == pytest.approx(2.0)

    def test_equal_frequencies_rejected(self):
        with pytest.raises(EqualFrequencies):
            ex.asymmetric_trap(1.0, 1.0)

    def test_nonpositive_rejected(self):
        with pytest.raises(NonPositiveFrequency):
            ex.asymmetric_trap(-1.0, 2.0)


class TestSumPotentials:
    def test_certificate_merge(self):
        sym = ex.sum_potentials([ex.harmonic_trap(1.0),
                                 ex.pairwise(ex.gaussian_kernel(1.0))])
        assert sym.certificate == pots.EXCHANGE_SYMMETRIC
        broken = ex.sum_potentials([ex.harmonic_trap(1.0),
                                    ex.asymmetric_trap(1.0, 2.0)])
        assert broken.certificate == pots.ASYMMETRIC

    def test_values_add(self):
        total = ex.sum_potentials([ex.harmonic_trap(1.0),
                                   ex.pairwise(ex.gaussian_kernel(1.0), 2.0)])
        expected = 2.5 + 2.0 * np.exp(-0.5)
        assert at_config(total, 1.0, 2.0) == pytest.approx(expected)


class TestExchangeSymmetryVerification:
    def test_harmonic_passes(self, grid32):
        trap = ex.harmonic_trap(1.0)
        report = ex.verify_exchange_symmetry(trap, grid32, samples=64)
        assert report.passed and report.max_violation == 0.0
        assert trap.certificate == pots.EXCHANGE_SYMMETRIC

    def test_asymmetric_fails_with_witness(self, grid32):
        trap = ex.asymmetric_trap(1.0, 2.0)
        report = ex.verify_exchange_symmetry(trap, grid32, samples=64)
        assert not report.passed
        assert trap.certificate == pots.ASYMMETRIC
        config, pair, violation = report.witness
        assert pair == (0, 1) and violation > 1e-3
        # the witness configuration really does break the symmetry
        vals = trap.at_points(config.reshape(1, 2, 1))
        swapped = trap.at_points(config[::-1].reshape(1, 2, 1))
        assert abs(vals[0] - swapped[0]) > 1e-6

    def test_pairwise_passes(self, grid32):
        pot = ex.pairwise(ex.soft_coulomb_kernel(0.5))
        report = ex.verify_exchange_symmetry(pot, grid32, samples=64)
        assert report.passed and report.max_violation <= 1e-12

    def test_three_particles_all_pairs(self):
        grid = make_grid(n=3, m=8)
        pot = ex.pairwise(ex.gaussian_kernel(1.0))
        report = ex.verify_exchange_symmetry(pot, grid, samples=32)
        assert report.passed and report.pairs_checked == 3


class TestVectorPotentials:
    def test_uniform_cosine_profile(self):
        a = ex.cosine_vector_potential([0.5], 2.0, 1)
        assert a.gauge_certificate == pots.COULOMB_VERIFIED
        assert a.is_uniform
        assert a.at_time(0.0)[0] == pytest.approx(0.5)
        assert a.at_time(np.pi / 2)[0] == pytest.approx(-0.5)

    def test_uniform_divergence_is_zero(self):
        a = ex.uniform_vector_potential([1.0, -0.3], 2)
        report = ex.verify_coulomb_gauge(a, samples=16)
        assert report.passed and report.max_divergence == 0.0

    def test_divergence_free_shear_passes(self):
        a = ex.shear_vector_potential(0.7, 2)
        assert a.gauge_certificate == pots.UNVERIFIED
        report = ex.verify_coulomb_gauge(a, samples=32)
        assert report.passed
        assert a.gauge_certificate == pots.COULOMB_VERIFIED

    def test_rotational_field_passes(self):
        # A = (y, -x) has zero divergence.
        a = pots.general_vector_potential(
            lambda r, t: [np.asarray(r[1]), -np.asarray(r[0])], 2)
        assert ex.verify_coulomb_gauge(a, samples=32).passed

    def test_expanding_field_fails(self):
        # A = (x, y) has divergence 2 everywhere.
        a = pots.general_vector_potential(
            lambda r, t: [np.asarray(r[0]), np.asarray(r[1])], 2)
        report = ex.verify_coulomb_gauge(a, samples=32)
        assert not report.passed
        assert report.max_divergence == pytest.approx(2.0, rel=1e-5)
        assert a.gauge_certificate == pots.UNVERIFIED

    def test_shear_needs_two_dims(self):
        with pytest.raises(ValueError):
            ex.shear_vector_potential(1.0, 1)


class TestGridEvaluation:
    def test_on_grid_shapes_and_symmetry(self, grid32):
        v = ex.harmonic_trap(1.0).on_grid(grid32)
        assert v.shape == grid32.shape
        assert np.array_equal(v, v.T)

    def test_on_grid_rejects_singular(self, grid32):
        pot = ex.ScalarPotential(
            lambda coords, t: 1.0 / (np.asarray(coords[0][0])
                                     - np.asarray(coords[1][0])),
            label="bare")
        with pytest.raises(SingularKernel):
            pot.on_grid(grid32)
