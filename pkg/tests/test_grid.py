import numpy as np
import pytest

import exsym as ex
from exsym.errors import (
    CheckpointError,
    GridMismatch,
    IndexOutOfRange,
    InvalidAxis,
    MemoryBudgetExceeded,
)

from conftest import make_grid


class TestBuildGrid:
    def test_two_particle_spacing(self):
        grid = make_grid(n=2, d=1, m=64)
        assert grid.size == 4096
        assert grid.spacings[0] == pytest.approx(16.0 / 63.0, rel=1e-15)
        assert grid.coordinates[0][0] == -8.0
        assert grid.coordinates[0][-1] == 8.0

    def test_three_particle_size(self):
        grid = make_grid(n=3, d=1, m=32)
        assert grid.size == 32**3

    def test_periodic_spacing_excludes_endpoint(self):
        grid = make_grid(m=64, boundary=ex.PERIODIC)
        assert grid.spacings[0] == pytest.approx(16.0 / 64.0, rel=1e-15)
        assert grid.coordinates[0][-1] == pytest.approx(8.0 - 0.25)

    def test_budget_exceeded(self):
        # 64**6 complex128 values is about 1 TiB, far beyond 1 GiB.
        spec = ex.GridSpec.cube(2, 3, -8, 8, 64)
        with pytest.raises(MemoryBudgetExceeded):
            ex.build_grid(spec, budget=2**30)

    def test_budget_env_override(self, monkeypatch):
        spec = ex.GridSpec.cube(2, 1, -8, 8, 64)
        monkeypatch.setenv("EXSYM_MEMORY_BUDGET", "1024")
        with pytest.raises(MemoryBudgetExceeded):
            ex.build_grid(spec)
        monkeypatch.setenv("EXSYM_MEMORY_BUDGET", str(2**30))
        assert ex.build_grid(spec).size == 4096

    @pytest.mark.parametrize("lo,hi,m", [(8.0, -8.0, 64), (0.0, 0.0, 64),
                                         (-8.0, 8.0, 3)])
    def test_invalid_axis(self, lo, hi, m):
        with pytest.raises(InvalidAxis):
            ex.build_grid(ex.GridSpec.cube(2, 1, lo, hi, m))

    def test_invalid_particle_and_dim_counts(self):
        with pytest.raises(InvalidAxis):
            ex.GridSpec.cube(0, 1, -8, 8, 16).validate()
        with pytest.raises(InvalidAxis):
            ex.GridSpec.cube(2, 4, -8, 8, 16).validate()


class TestWaveFunction:
    def test_rejects_non_finite(self, grid32):
        values = np.zeros(grid32.shape, dtype=complex)
        values[0, 0] = np.nan
        with pytest.raises(ValueError):
            ex.WaveFunction(grid32, values)

    def test_rejects_shape_mismatch(self, grid32):
        with pytest.raises(GridMismatch):
            ex.WaveFunction(grid32, np.zeros((3, 3), dtype=complex))

    def test_values_are_read_only(self, slater32):
        with pytest.raises(ValueError):
            slater32.values[0, 0] = 1.0

    def test_builders_zero_dirichlet_boundary(self, grid32):
        psi = ex.random_state(grid32, 1)
        assert np.all(psi.values[grid32.boundary_mask()] == 0.0)
        packet = ex.gaussian_packet(grid32, width=1.0)
        assert np.all(packet.values[grid32.boundary_mask()] == 0.0)

    def test_normalized_flag_tolerance(self, slater32):
        assert slater32.is_normalized
        scaled = slater32.with_values(slater32.values * (1.0 + 1e-6))
        assert not scaled.is_normalized


class TestExchange:
    def test_symmetric_product_is_fixed_point(self, grid32):
        psi = ex.gaussian_packet(grid32, width=1.0)  # g(x1) g(x2)
        swapped = ex.exchange(psi, 0, 1)
        assert np.array_equal(swapped.values, psi.values)

    def test_involution_is_bitwise(self, grid32):
        psi = ex.random_state(grid32, 7)
        back = ex.exchange(ex.exchange(psi, 0, 1), 0, 1)
        assert np.max(np.abs(back.values - psi.values)) == 0.0

    def test_slater_negates(self, slater32):
        swapped = ex.exchange(slater32, 0, 1)
        assert np.max(np.abs(swapped.values + slater32.values)) < 1e-15

    def test_norm_preserved(self, grid32):
        # values move without arithmetic; only the summation order differs
        psi = ex.random_state(grid32, 9)
        assert ex.exchange(psi, 0, 1).norm() == pytest.approx(psi.norm(),
                                                              rel=1e-12)

    @pytest.mark.parametrize("i,j", [(0, 0), (0, 2), (-1, 1)])
    def test_index_errors(self, grid32, i, j):
        psi = ex.random_state(grid32, 3)
        with pytest.raises(IndexOutOfRange):
            ex.exchange(psi, i, j)

    def test_permutation_indices_involution(self, grid32):
        sigma = ex.ExchangeMap(grid32, 0, 1).permutation_indices()
        assert np.array_equal(sigma[sigma], np.arange(grid32.size))

    def test_three_particle_pairs(self):
        grid = make_grid(n=3, m=12)
        psi = ex.random_state(grid, 5)
        for pair in [(0, 1), (0, 2), (1, 2)]:
            back = ex.exchange(ex.exchange(psi, *pair), *pair)
            assert np.max(np.abs(back.values - psi.values)) == 0.0


class TestInnerProduct:
    def test_gaussian_norm_matches_analytic(self):
        # Oracle: the continuum integral of the normalized Gaussian is exactly 1;
        # on a 64-point box spanning +-8 widths both the tail truncation
        # (erfc(8/sqrt(2)) ~ 1e-15) and the Riemann-sum error are negligible.
        grid = make_grid(n=1, d=1, m=64)
        psi = ex.gaussian_packet(grid, center=0.0, width=1.0)
        raw = ex.WaveFunction(grid, psi.values * psi.norm())  # undo renorm
        assert ex.inner_product(raw, raw).real == pytest.approx(1.0, abs=1e-8)

    def test_orthogonal_orbitals(self):
        grid = make_grid(n=1, d=1, m=64)
        g0 = ex.product_state(grid, [ex.ho_orbital(0)])
        g1 = ex.product_state(grid, [ex.ho_orbital(1)])
        assert abs(ex.inner_product(g0, g1)) < 1e-10

    def test_zero_field(self, grid32):
        zero = ex.WaveFunction(grid32, np.zeros(grid32.shape, dtype=complex))
        psi = ex.random_state(grid32, 2)
        assert ex.inner_product(zero, psi) == 0.0

    def test_conjugate_symmetry_exact(self, grid32):
        a = ex.random_state(grid32, 10)
        b = ex.random_state(grid32, 11)
        assert ex.inner_product(a, b) == np.conj(ex.inner_product(b, a))

    @pytest.mark.parametrize("seed", range(5))
    def test_sesquilinearity(self, grid32, seed):
        rng = np.random.default_rng(seed)
        a = ex.random_state(grid32, seed)
        b = ex.random_state(grid32, seed + 100)
        c = ex.random_state(grid32, seed + 200)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        combo = b.with_values(alpha * b.values + c.values)
        lhs = ex.inner_product(a, combo)
        rhs = alpha * ex.inner_product(a, b) + ex.inner_product(a, c)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
        lhs2 = ex.inner_product(combo, a)
        rhs2 = np.conj(alpha) * ex.inner_product(b, a) + ex.inner_product(c, a)
        assert abs(lhs2 - rhs2) <= 1e-12 * max(1.0, abs(lhs2))

    def test_grid_mismatch(self, grid32, grid64):
        with pytest.raises(GridMismatch):
            ex.inner_product(ex.random_state(grid32, 0),
                             ex.random_state(grid64, 0))

    @pytest.mark.parametrize("seed", range(5))
    def test_exchange_preserves_inner_products(self, grid32, seed):
        a = ex.random_state(grid32, seed)
        b = ex.random_state(grid32, seed + 50)
        before = ex.inner_product(a, b)
        after = ex.inner_product(ex.exchange(a, 0, 1), ex.exchange(b, 0, 1))
        assert abs(after - before) <= 1e-12 * max(1.0, abs(before))


class TestNorm:
    def test_slater_normalized(self, slater64):
        assert ex.norm(slater64) == pytest.approx(1.0, abs=1e-8)

    def test_homogeneity(self, grid32):
        psi = ex.random_state(grid32, 4)
        doubled = psi.with_values(2.0 * psi.values)
        assert ex.norm(doubled) == pytest.approx(2.0 * ex.norm(psi), rel=1e-14)

    def test_zero(self, grid32):
        zero = ex.WaveFunction(grid32, np.zeros(grid32.shape, dtype=complex))
        assert ex.norm(zero) == 0.0


class TestCheckpoint:
    def test_roundtrip_bitwise(self, tmp_path, slater32):
        path = tmp_path / "state.sym"
        ex.save_checkpoint(slater32, path)
        back = ex.load_checkpoint(path)
        assert back.grid.spec == slater32.grid.spec
        assert np.array_equal(back.values, slater32.values)

    def test_roundtrip_periodic_flag(self, tmp_path):
        grid = make_grid(m=16, boundary=ex.PERIODIC)
        psi = ex.random_state(grid, 8)
        path = tmp_path / "p.sym"
        ex.save_checkpoint(psi, path)
        assert ex.load_checkpoint(path).grid.boundary == ex.PERIODIC

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.sym"
        path.write_bytes(b"NOPE!" + b"\x00" * 64)
        with pytest.raises(CheckpointError):
            ex.load_checkpoint(path)

    def test_truncated_payload(self, tmp_path, slater32):
        path = tmp_path / "state.sym"
        ex.save_checkpoint(slater32, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(CheckpointError):
            ex.load_checkpoint(path)

    def test_header_layout(self, tmp_path, slater32):
        path = tmp_path / "state.sym"
        ex.save_checkpoint(slater32, path)
        raw = path.read_bytes()
        assert raw[:5] == b"SYMW1"
        n = int.from_bytes(raw[5:9], "little")
        d = int.from_bytes(raw[9:13], "little")
        assert (n, d) == (2, 1)
        expected = 5 + 8 + d * 20 + 1 + slater32.grid.size * 16
        assert len(raw) == expected
