"""Dense-matrix reference: brute-force Hamiltonians and exact propagation.

Everything here is deliberately independent of the production steppers: the
Hamiltonian is materialized as a dense Hermitian matrix and propagated by
eigendecomposition, so it can serve as ground truth for convergence fits and
conservation checks on tiny grids (<= 4096 points).

Kinetic discretizations:

* ``fd`` (default) -- second-order central-difference Laplacian; Dirichlet
  boundary rows and columns are zeroed (boundary amplitudes stay pinned at
  zero), periodic grids wrap.
* ``spectral`` -- the FFT-diagonalized kinetic matrix F^-1 diag(hbar^2 k^2/2m) F,
  i.e. exactly the operator the split-operator scheme exponentiates. Use it
  when the oracle must share the spectral scheme's spatial operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooLarge
from .grid import DIRICHLET, Grid, WaveFunction, ExchangeMap
from .propagator import Hamiltonian

DENSE_CEILING = 4096

KINETIC_FD = "fd"
KINETIC_SPECTRAL = "spectral"


def _second_difference_1d(m: int, dx: float, dirichlet: bool) -> np.ndarray:
    lap = np.zeros((m, m))
    idx = np.arange(m)
    lap[idx, idx] = -2.0
    lap[idx[:-1], idx[1:]] = 1.0
    lap[idx[1:], idx[:-1]] = 1.0
    if dirichlet:
        lap[0, :] = lap[-1, :] = 0.0
        lap[:, 0] = lap[:, -1] = 0.0
    else:
        lap[0, -1] = lap[-1, 0] = 1.0
    return lap / (dx * dx)


def _central_difference_1d(m: int, dx: float, dirichlet: bool) -> np.ndarray:
    der = np.zeros((m, m))
    idx = np.arange(m)
    der[idx[:-1], idx[1:]] = 1.0
    der[idx[1:], idx[:-1]] = -1.0
    if dirichlet:
        der[0, :] = der[-1, :] = 0.0
        der[:, 0] = der[:, -1] = 0.0
    else:
        der[0, -1] = -1.0
        der[-1, 0] = 1.0
    return der / (2.0 * dx)


def _spectral_kinetic_1d(grid: Grid, dim: int) -> np.ndarray:
    k = grid.wavenumbers[dim]
    m = k.size
    return np.fft.ifft(k[:, None] ** 2 * np.fft.fft(np.eye(m), axis=0), axis=0)


def _embed(mat: np.ndarray, ax: int, shape: tuple[int, ...]) -> np.ndarray:
    before = int(np.prod(shape[:ax])) if ax > 0 else 1
    after = int(np.prod(shape[ax + 1:])) if ax + 1 < len(shape) else 1
    out = mat
    if before > 1:
        out = np.kron(np.eye(before), out)
    if after > 1:
        out = np.kron(out, np.eye(after))
    return out


@dataclass
class DenseHamiltonian:
    """Dense Hermitian matrix over the flattened grid."""

    matrix: np.ndarray
    grid: Grid
    hbar: float
    time: float
    hermiticity_defect: float
    kinetic: str


def dense_hamiltonian(grid: Grid, hamiltonian: Hamiltonian, t: float = 0.0,
                      kinetic: str = KINETIC_FD) -> DenseHamiltonian:
    """Materialize H(t) as a dense matrix (grids up to 4096 points).

    Builds the kinetic sum over all configuration axes, the diagonal scalar
    potential, and - when a vector potential is present - the symmetrized
    first-derivative coupling (i hbar q / 2m)(A D + D A) plus the diagonal
    q^2 A^2 / 2m term. The result is symmetrized; the pre-symmetrization
    defect max|H - H^dagger| is reported.
    """
    if grid.size > DENSE_CEILING:
        raise TooLarge(f"{grid.size} points exceeds the dense ceiling "
                       f"{DENSE_CEILING}")
    if kinetic not in (KINETIC_FD, KINETIC_SPECTRAL):
        raise ValueError(f"unknown kinetic discretization {kinetic!r}")
    c = hamiltonian.constants
    d = grid.dims_per_particle
    dirichlet = grid.boundary == DIRICHLET
    size = grid.size
    h = np.zeros((size, size), dtype=np.complex128)

    for ax in range(len(grid.shape)):
        dim = ax % d
        if kinetic == KINETIC_FD:
            t1 = (-0.5 * c.hbar**2 / c.mass) * _second_difference_1d(
                grid.shape[ax], grid.spacings[dim], dirichlet)
        else:
            t1 = (0.5 * c.hbar**2 / c.mass) * _spectral_kinetic_1d(grid, dim)
        h += _embed(t1, ax, grid.shape)

    v = hamiltonian.scalar.on_grid(grid, t).ravel()
    h[np.arange(size), np.arange(size)] += v

    if hamiltonian.vector is not None:
        coupling = 0.5j * c.hbar * c.charge / c.mass
        for p in range(grid.num_particles):
            coords = [grid.coordinate_field(p, a) for a in range(d)]
            comps = hamiltonian.vector(coords, t)
            for a in range(d):
                ax = grid.axis_index(p, a)
                a_flat = np.broadcast_to(
                    np.asarray(comps[a], dtype=np.float64),
                    grid.shape).ravel()
                der = _embed(_central_difference_1d(
                    grid.shape[ax], grid.spacings[a], dirichlet),
                    ax, grid.shape)
                h += coupling * (a_flat[:, None] * der + der * a_flat[None, :])
                h[np.arange(size), np.arange(size)] += \
                    (0.5 * c.charge**2 / c.mass) * a_flat * a_flat

    defect = float(np.max(np.abs(h - h.conj().T)))
    h = 0.5 * (h + h.conj().T)
    return DenseHamiltonian(h, grid, c.hbar, float(t), defect, kinetic)


class EigenPropagator:
    """Exact propagator e^{-iHt/hbar} via one eigendecomposition."""

    def __init__(self, dense: DenseHamiltonian):
        self.dense = dense
        self.energies, self.modes = np.linalg.eigh(dense.matrix)

    def advance(self, psi0: WaveFunction, t: float) -> WaveFunction:
        coeff = self.modes.conj().T @ psi0.values.ravel()
        coeff = coeff * np.exp(-1j * self.energies * t / self.dense.hbar)
        values = (self.modes @ coeff).reshape(psi0.grid.shape)
        return psi0.with_values(values)

    def overlap_series(self, psi0: WaveFunction, times,
                       i: int = 0, j: int = 1) -> np.ndarray:
        """S(t) = <psi(t) | P_ij psi(t)> at each requested time."""
        perm = ExchangeMap(psi0.grid, i, j)
        vol = psi0.grid.volume_element
        out = np.empty(len(times), dtype=np.complex128)
        coeff0 = self.modes.conj().T @ psi0.values.ravel()
        for n, t in enumerate(times):
            coeff = coeff0 * np.exp(-1j * self.energies * t / self.dense.hbar)
            values = (self.modes @ coeff).reshape(psi0.grid.shape)
            out[n] = np.vdot(values, perm.apply_to_array(values)) * vol
        return out


def exact_evolve(psi0: WaveFunction, dense: DenseHamiltonian,
                 t: float) -> WaveFunction:
    """Evolve under a time-independent dense Hamiltonian; norm conserved to
    roundoff."""
    return EigenPropagator(dense).advance(psi0, t)


def exact_evolve_sampled(psi0: WaveFunction, hamiltonian: Hamiltonian,
                         t_final: float, dt_ref: float,
                         kinetic: str = KINETIC_FD) -> WaveFunction:
    """Time-dependent reference via piecewise-constant midpoint sampling.

    One eigendecomposition per substep; intended for small grids and short
    horizons. Pick dt_ref at most a tenth of the step under test.
    """
    n = int(round(t_final / dt_ref))
    psi = psi0
    for k in range(n):
        t_mid = (k + 0.5) * dt_ref
        dense = dense_hamiltonian(psi.grid, hamiltonian, t_mid, kinetic)
        psi = EigenPropagator(dense).advance(psi, dt_ref)
    return psi


def exchange_permutation_matrix(grid: Grid, i: int, j: int) -> np.ndarray:
    """Dense permutation matrix X with (X v) = v[sigma]."""
    if grid.size > DENSE_CEILING:
        raise TooLarge(f"{grid.size} points exceeds the dense ceiling "
                       f"{DENSE_CEILING}")
    sigma = ExchangeMap(grid, i, j).permutation_indices()
    return np.eye(grid.size)[sigma]


def alternating_projection_decay_rate(grid: Grid, sym_pair=(0, 1),
                                      anti_pair=(1, 2)) -> float:
    """Spectral radius of the alternating projection product P_anti P_sym.

    Computed as the largest eigenvalue of the symmetric PSD matrix
    P_sym P_anti P_sym, whose nonzero spectrum coincides with that of
    P_anti P_sym (cyclic invariance; the values are squared cosines of the
    principal angles between the two subspaces). A value strictly below 1
    certifies geometric collapse of the alternating projections, i.e. the two
    subspaces intersect only in the zero function.
    """
    x_sym = exchange_permutation_matrix(grid, *sym_pair)
    x_anti = exchange_permutation_matrix(grid, *anti_pair)
    size = grid.size
    p_sym = 0.5 * (np.eye(size) + x_sym)
    p_anti = 0.5 * (np.eye(size) - x_anti)
    product = p_sym @ p_anti @ p_sym
    eigs = np.linalg.eigvalsh(product)
    return float(eigs[-1])
