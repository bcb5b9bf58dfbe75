import numpy as np
import pytest

import exsym as ex
from exsym.errors import TooLarge
from exsym.oracle import exchange_permutation_matrix

from conftest import l2_distance, make_grid


class TestDenseHamiltonian:
    def test_free_particle_fd_spectrum(self):
        # Oracle: the (M-2)-point Dirichlet second-difference matrix has
        # eigenvalues (hbar^2/(m dx^2)) (1 - cos(n pi / (M-1))), n = 1..M-2;
        # the two pinned boundary rows contribute two zeros.
        m = 32
        grid = make_grid(n=1, d=1, m=m, lo=0.0, hi=1.0)
        ham = ex.Hamiltonian(ex.PhysicalConstants(), ex.zero_potential())
        dense = ex.dense_hamiltonian(grid, ham)
        dx = grid.spacings[0]
        n = np.arange(1, m - 1)
        analytic = (1.0 / dx**2) * (1.0 - np.cos(n * np.pi / (m - 1)))
        expected = np.sort(np.concatenate([[0.0, 0.0], analytic]))
        eigs = np.linalg.eigvalsh(dense.matrix)
        assert np.max(np.abs(eigs - expected)) < 1e-10

    def test_low_modes_match_continuum(self):
        # low discrete modes approach hbar^2 k^2 / 2m with k = n pi / L
        m = 64
        grid = make_grid(n=1, d=1, m=m, lo=0.0, hi=1.0)
        ham = ex.Hamiltonian(ex.PhysicalConstants(), ex.zero_potential())
        eigs = np.sort(np.linalg.eigvalsh(
            ex.dense_hamiltonian(grid, ham).matrix))
        for n in (1, 2, 3):
            k = n * np.pi / 1.0
            continuum = 0.5 * k**2
            assert eigs[1 + n] == pytest.approx(continuum, rel=2e-3)

    def test_harmonic_ground_state_energy(self):
        ham = ex.Hamiltonian(ex.PhysicalConstants(), ex.harmonic_trap(1.0))

        def ground(m, kinetic):
            grid = make_grid(n=1, d=1, m=m)
            dense = ex.dense_hamiltonian(grid, ham, kinetic=kinetic)
            return float(np.min(np.linalg.eigvalsh(dense.matrix)))

        # 2nd-order stencil at M=64: truncation -(dx^2/12)(hbar^2/2m)<p^4>
        # = -2.0e-3 exactly; the eigensolve confirms hbar*omega/2 within it
        assert ground(64, "fd") == pytest.approx(0.5, abs=3e-3)
        # halving dx brings the stencil inside 1e-3 of hbar*omega/2
        assert ground(128, "fd") == pytest.approx(0.5, abs=1e-3)
        # the spectral kinetic resolves it to roundoff at M=64
        assert ground(64, "spectral") == pytest.approx(0.5, abs=1e-9)

    def test_exchange_symmetry_exact(self, grid32, interacting_ham):
        dense = ex.dense_hamiltonian(grid32, interacting_ham)
        perm = exchange_permutation_matrix(grid32, 0, 1)
        conjugated = perm @ dense.matrix @ perm.T
        assert np.array_equal(conjugated, dense.matrix)

    def test_hermiticity_defect_small(self, grid32):
        ham = ex.Hamiltonian(ex.PhysicalConstants(), ex.harmonic_trap(1.0),
                             ex.cosine_vector_potential([0.5], 2.0, 1))
        dense = ex.dense_hamiltonian(grid32, ham, t=0.2)
        assert dense.hermiticity_defect <= 1e-12
        assert np.max(np.abs(dense.matrix
                             - dense.matrix.conj().T)) == 0.0

    def test_spectral_kinetic_diagonalizes_plane_waves(self):
        grid = make_grid(n=1, d=1, m=32, boundary=ex.PERIODIC)
        ham = ex.Hamiltonian(ex.PhysicalConstants(), ex.zero_potential())
        dense = ex.dense_hamiltonian(grid, ham, kinetic="spectral")
        eigs = np.sort(np.linalg.eigvalsh(dense.matrix))
        expected = np.sort(0.5 * grid.wavenumbers[0] ** 2)
        assert np.max(np.abs(eigs - expected)) < 1e-10

    def test_too_large_rejected(self):
        grid = make_grid(n=2, d=1, m=65)
        ham = ex.Hamiltonian(ex.PhysicalConstants(), ex.harmonic_trap(1.0))
        with pytest.raises(TooLarge):
            ex.dense_hamiltonian(grid, ham)


class TestExactEvolve:
    def test_zero_time_is_identity(self, grid32, slater32, harmonic_ham):
        dense = ex.dense_hamiltonian(grid32, harmonic_ham)
        out = ex.exact_evolve(slater32, dense, 0.0)
        assert l2_distance(out, slater32) <= 1e-12

    def test_eigenstate_acquires_pure_phase(self, grid32, harmonic_ham):
        dense = ex.dense_hamiltonian(grid32, harmonic_ham)
        energies, modes = np.linalg.eigh(dense.matrix)
        idx = 2  # first non-boundary mode
        state = ex.WaveFunction(
            grid32, modes[:, idx].reshape(grid32.shape)).normalized()
        out = ex.exact_evolve(state, dense, 1.3)
        overlap = ex.inner_product(state, out)
        assert abs(overlap) >= 1.0 - 1e-12
        assert np.angle(overlap) == pytest.approx(-energies[idx] * 1.3,
                                                  abs=1e-9)

    def test_norm_conserved(self, grid32, harmonic_ham):
        dense = ex.dense_hamiltonian(grid32, harmonic_ham)
        psi = ex.random_state(grid32, 6)
        out = ex.exact_evolve(psi, dense, 2.7)
        assert abs(out.norm() - 1.0) <= 1e-12

    def test_split_operator_error_halves_twice(self, grid32, interacting_ham):
        # step-size halving reduces the endpoint error by about 4
        psi = ex.slater_state(grid32, [ex.ho_orbital(0), ex.ho_orbital(1)])
        dense = ex.dense_hamiltonian(grid32, interacting_ham,
                                     kinetic="spectral")
        ref = ex.exact_evolve(psi, dense, 0.5)

        def err(dt):
            traj = ex.evolve(psi, interacting_ham,
                             ex.Scheme(ex.SPLIT_OPERATOR, dt=dt), 0.5,
                             record_every=10**9)
            return l2_distance(traj.final_state, ref)

        ratio = err(0.01) / err(0.005)
        assert ratio == pytest.approx(4.0, abs=1.0)

    def test_overlap_series_conserved_exactly(self, grid32, interacting_ham):
        # [H, P] = 0 for the dense matrix, so S(t) is flat to roundoff.
        dense = ex.dense_hamiltonian(grid32, interacting_ham)
        psi = ex.random_state(grid32, 17)
        prop = ex.EigenPropagator(dense)
        series = prop.overlap_series(psi, np.linspace(0.0, 4.0, 9))
        assert np.max(np.abs(series - series[0])) <= 1e-12

    def test_sampled_evolution_matches_stepper(self):
        # time-dependent uniform field on a tiny grid
        grid = make_grid(n=2, d=1, m=16)
        psi = ex.slater_state(grid, [ex.ho_orbital(0), ex.ho_orbital(1)])
        ham = ex.Hamiltonian(ex.PhysicalConstants(), ex.harmonic_trap(1.0),
                             ex.cosine_vector_potential([0.5], 2.0, 1))
        ref = ex.exact_evolve_sampled(psi, ham, 0.1, dt_ref=1e-3)
        traj = ex.evolve(psi, ham, ex.Scheme(ex.IMPLICIT_FD, dt=1e-2,
                                             solver_tol=1e-12),
                         0.1, record_every=10**9)
        assert l2_distance(traj.final_state, ref) <= 1e-4


class TestAlternatingProjectionRate:
    def test_rate_below_one(self):
        grid = make_grid(n=3, d=1, m=12, lo=-6, hi=6)
        rate = ex.alternating_projection_decay_rate(grid)
        assert rate < 1.0
        # permutation algebra fixes the standard-representation angle at 30
        # degrees, so the per-round contraction is cos^2(30deg) = 3/4
        assert rate == pytest.approx(0.75, abs=1e-9)

    def test_rate_predicts_decay(self):
        grid = make_grid(n=3, d=1, m=8, lo=-6, hi=6)
        rate = ex.alternating_projection_decay_rate(grid)
        psi = ex.random_state(grid, 2)
        k = 40
        report = ex.mixed_symmetry_null_check(psi, iters=k)
        # ||(P_anti P_sym)^k|| <= cos(theta)^(2k-1) = rate^(k - 1/2)
        bound = rate ** (k - 0.5) * 1.01 + 1e-15
        assert report.final_norm <= bound
