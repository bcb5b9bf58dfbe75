"""Exchange-symmetry diagnostics computed on wavefunction snapshots.

Quantities:

* phase field phi_ij = arg((P_ij psi) / psi), defined where |psi| clears a
  relative threshold (the phase is undefined at nodes; the masked fraction is
  always reported);
* the weighted phase-gradient integral
  I = integral |psi|^2 sum_l (grad_l phi)^2 over unmasked points, which
  vanishes exactly when the exchange phase carries no spatial dependence;
* the exchange overlap S = <psi | P_ij psi>, conserved whenever the
  Hamiltonian commutes with the exchange permutation;
* sector weights ||Pi_sym psi||^2, ||Pi_anti psi||^2;
* the discrete continuity residual, including the A . grad|psi|^2 term for
  minimally coupled dynamics;
* the exchange sign (+1 / -1 / indeterminate) and its persistence along a
  trajectory.

All functions are pure and operate on read-only snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import EmptyMask, EmptyTrajectory, GridMismatch
from .grid import PERIODIC, Grid, WaveFunction, exchange, inner_product
from .symmetry import antisymmetric_projection, symmetric_projection, validate_pair

if TYPE_CHECKING:  # pragma: no cover
    from .propagator import Hamiltonian, Trajectory

DEFAULT_MASK_EPS = 1e-6
DEFAULT_SIGN_TOL = 1e-6

SIGN_SYMMETRIC = 1
SIGN_ANTISYMMETRIC = -1
SIGN_INDETERMINATE = 0

#: Frozen column order of the time-series CSV.
CSV_COLUMNS = ("t", "norm", "re_S", "im_S", "sector_sym", "sector_anti",
               "phase_grad_integral", "continuity_residual", "exchange_sign",
               "boundary_mass")


def _wrap_angle(x: np.ndarray) -> np.ndarray:
    """Map angles into [-pi, pi)."""
    return np.mod(x + np.pi, 2.0 * np.pi) - np.pi


def axis_gradient(field: np.ndarray, ax: int, dx: float,
                  boundary: str) -> np.ndarray:
    """Second-order gradient along one axis.

    Periodic grids wrap; Dirichlet grids use one-sided second-order stencils
    on the boundary slabs.
    """
    if boundary == PERIODIC:
        return (np.roll(field, -1, axis=ax) - np.roll(field, 1, axis=ax)) / (2 * dx)
    out = np.empty_like(field)
    f = np.moveaxis(field, ax, 0)
    g = np.moveaxis(out, ax, 0)
    g[1:-1] = (f[2:] - f[:-2]) / (2 * dx)
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2 * dx)
    g[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2 * dx)
    return out


@dataclass
class PhaseField:
    """Pointwise exchange phase for one particle pair.

    ``values`` holds phi in (-pi, pi] where ``mask`` is true and 0 elsewhere.
    """

    values: np.ndarray
    mask: np.ndarray
    pair: tuple[int, int]
    mask_eps: float
    masked_fraction: float


def phase_field(psi: WaveFunction, i: int, j: int,
                mask_eps: float = DEFAULT_MASK_EPS) -> PhaseField:
    """phi = arg((P_ij psi) / psi) where |psi| >= mask_eps * max|psi|."""
    if mask_eps <= 0:
        raise ValueError("mask_eps must be positive")
    validate_pair(psi.grid, i, j)
    mags = np.abs(psi.values)
    peak = float(mags.max())
    if peak == 0.0:
        raise EmptyMask("state is identically zero")
    mask = mags >= mask_eps * peak
    if not mask.any():
        raise EmptyMask("no point passed the phase-extraction threshold")
    swapped = exchange(psi, i, j).values
    values = np.zeros(psi.grid.shape, dtype=np.float64)
    values[mask] = np.angle(swapped[mask] / psi.values[mask])
    return PhaseField(values, mask, (i, j), mask_eps,
                      float(1.0 - mask.mean()))


def phase_gradient_integral(psi: WaveFunction, field: PhaseField) -> float:
    """Quadrature of |psi|^2 sum_l (grad_l phi)^2 over unmasked points.

    Neighbor differences are wrapped into [-pi, pi) before differencing, which
    removes branch-cut jumps without attempting a global unwrap (ill-posed
    around nodes). Gradients average the valid one-sided differences; points
    with no unmasked neighbor along an axis contribute zero for that axis.
    """
    if not field.mask.any():
        raise EmptyMask("phase field has an empty mask")
    grid = psi.grid
    weight = np.abs(psi.values) ** 2
    total = np.zeros(grid.shape, dtype=np.float64)
    naxes = len(grid.shape)
    for ax in range(naxes):
        dx = grid.spacings[ax % grid.dims_per_particle]
        phi = np.moveaxis(field.values, ax, 0)
        msk = np.moveaxis(field.mask, ax, 0)
        grad_sum = np.zeros_like(phi)
        count = np.zeros(phi.shape, dtype=np.int64)
        if grid.boundary == PERIODIC:
            diffs = _wrap_angle(np.roll(phi, -1, axis=0) - phi) / dx
            valid = msk & np.roll(msk, -1, axis=0)
            contrib = np.where(valid, diffs, 0.0)
            grad_sum += contrib + np.roll(contrib, 1, axis=0)
            count += valid.astype(np.int64) + np.roll(valid, 1, axis=0).astype(np.int64)
        else:
            diffs = _wrap_angle(phi[1:] - phi[:-1]) / dx
            valid = msk[1:] & msk[:-1]
            contrib = np.where(valid, diffs, 0.0)
            grad_sum[:-1] += contrib
            grad_sum[1:] += contrib
            count[:-1] += valid
            count[1:] += valid
        grad = grad_sum / np.maximum(count, 1)
        total += np.moveaxis(grad, 0, ax) ** 2
    return float(np.sum(weight[field.mask] * total[field.mask])
                 * grid.volume_element)


def overlap_s(psi: WaveFunction, i: int = 0, j: int = 1) -> complex:
    """Exchange overlap S = <psi | P_ij psi>; |S| <= 1 for normalized states."""
    return inner_product(psi, exchange(psi, i, j))


def sector_weights(psi: WaveFunction) -> tuple[float, float]:
    """(||Pi_sym psi||^2, ||Pi_anti psi||^2), each in [0, 1] for unit norm.

    For N=2 the two weights sum to 1; for N=3 mixed-symmetry representations
    carry the remainder. N <= 3 only.
    """
    sym = symmetric_projection(psi).norm() ** 2
    anti = antisymmetric_projection(psi).norm() ** 2
    return float(sym), float(anti)


def _vector_on_particle(vector, grid: Grid, particle: int, t: float):
    coords = [grid.coordinate_field(particle, a)
              for a in range(grid.dims_per_particle)]
    return [np.asarray(c, dtype=np.float64) for c in vector(coords, t)]


def continuity_residual(psi_prev: WaveFunction, psi_next: WaveFunction,
                        hamiltonian: "Hamiltonian", t: float, dt: float) -> float:
    """L1 norm of the discrete continuity defect between two snapshots.

    residual field = d|psi|^2/dt + sum_l div_l j_l - (q/m) sum_l A_l . grad_l |psi|^2

    with the time derivative from the symmetric two-snapshot difference at the
    step midpoint, j = (hbar/m) Im(psi* grad psi) from central differences on
    the midpoint state, and the A term present iff the Hamiltonian carries a
    vector potential.
    """
    if not psi_prev.grid.compatible(psi_next.grid):
        raise GridMismatch("snapshots live on different grids")
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = psi_prev.grid
    consts = hamiltonian.constants
    mid = 0.5 * (psi_prev.values + psi_next.values)
    t_mid = t + 0.5 * dt

    residual = (np.abs(psi_next.values) ** 2 - np.abs(psi_prev.values) ** 2) / dt
    rho_mid = np.abs(mid) ** 2
    d = grid.dims_per_particle

    for p in range(grid.num_particles):
        a_comps = None
        if hamiltonian.vector is not None:
            a_comps = _vector_on_particle(hamiltonian.vector, grid, p, t_mid)
        for a in range(d):
            ax = grid.axis_index(p, a)
            dx = grid.spacings[a]
            grad_mid = axis_gradient(mid, ax, dx, grid.boundary)
            current = (consts.hbar / consts.mass) * np.imag(np.conj(mid) * grad_mid)
            residual = residual + axis_gradient(current, ax, dx, grid.boundary)
            if a_comps is not None:
                grad_rho = axis_gradient(rho_mid, ax, dx, grid.boundary)
                residual = residual - ((consts.charge / consts.mass)
                                       * a_comps[a] * grad_rho)

    return float(np.sum(np.abs(residual)) * grid.volume_element)


def exchange_sign(psi: WaveFunction, i: int = 0, j: int = 1,
                  tol: float = DEFAULT_SIGN_TOL) -> int:
    """Classify the exchange eigenvalue of a normalized state.

    Returns +1 when ||P psi - psi|| <= tol, -1 when ||P psi + psi|| <= tol,
    otherwise 0 (indeterminate). Both distances are exactly invariant under a
    global phase psi -> e^{i theta} psi, so the classification is
    representative independent.
    """
    swapped = exchange(psi, i, j).values
    scale = np.sqrt(psi.grid.volume_element)
    d_plus = float(np.linalg.norm((swapped - psi.values).ravel())) * scale
    d_minus = float(np.linalg.norm((swapped + psi.values).ravel())) * scale
    if d_plus <= tol:
        return SIGN_SYMMETRIC
    if d_minus <= tol:
        return SIGN_ANTISYMMETRIC
    return SIGN_INDETERMINATE


@dataclass
class DiagnosticsRecord:
    """One row of the diagnostics time series."""

    t: float
    norm: float
    s: complex
    sector_sym: float
    sector_anti: float
    phase_grad_integral: float
    continuity_residual: float
    exchange_sign: int
    boundary_mass: float

    def to_csv_row(self) -> str:
        fields = (self.t, self.norm, self.s.real, self.s.imag,
                  self.sector_sym, self.sector_anti, self.phase_grad_integral,
                  self.continuity_residual, float(self.exchange_sign),
                  self.boundary_mass)
        return ",".join(repr(float(x)) for x in fields)


def compute_record(psi: WaveFunction, t: float, *,
                   hamiltonian: "Hamiltonian | None" = None,
                   psi_prev: WaveFunction | None = None,
                   dt: float | None = None,
                   pair: tuple[int, int] = (0, 1),
                   mask_eps: float = DEFAULT_MASK_EPS,
                   sign_tol: float = DEFAULT_SIGN_TOL) -> DiagnosticsRecord:
    """Assemble the full diagnostics record for one snapshot.

    The continuity residual needs the previous snapshot; the first record of a
    trajectory reports 0 for it. Sector weights are reported as NaN above
    N = 3. Single-particle grids have no exchange pair; the exchange columns
    degenerate to S = 1, sign = +1.
    """
    grid = psi.grid
    if grid.num_particles >= 2:
        s_val = overlap_s(psi, *pair)
        sign = exchange_sign(psi, *pair, tol=sign_tol)
        pgi = phase_gradient_integral(psi, phase_field(psi, *pair, mask_eps))
    else:
        s_val, sign, pgi = 1.0 + 0.0j, SIGN_SYMMETRIC, 0.0
    if grid.num_particles <= 3:
        sym_w, anti_w = sector_weights(psi)
    else:
        sym_w = anti_w = float("nan")
    if psi_prev is not None and hamiltonian is not None and dt:
        cres = continuity_residual(psi_prev, psi, hamiltonian, t - dt, dt)
    else:
        cres = 0.0
    return DiagnosticsRecord(
        t=float(t), norm=psi.norm(), s=complex(s_val),
        sector_sym=sym_w, sector_anti=anti_w,
        phase_grad_integral=pgi, continuity_residual=cres,
        exchange_sign=sign, boundary_mass=psi.boundary_mass())


@dataclass
class PersistenceReport:
    """Sign/overlap persistence along a trajectory."""

    initial_sign: int
    s0: complex
    tolerance: float
    violations: list  # (t, reason) tuples, chronological
    max_s_drift: float

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def first_violation_time(self) -> float | None:
        return self.violations[0][0] if self.violations else None


def sign_persistence(trajectory: "Trajectory",
                     tol: float = DEFAULT_SIGN_TOL) -> PersistenceReport:
    """Check that the exchange sign and S(t) stay at their initial values.

    A record violates persistence when its sign differs from the t=0 sign or
    when |S(t) - S(0)| exceeds ``tol``. An empty violation list verifies
    persistence over the whole trajectory.
    """
    records = list(trajectory.records)
    if not records:
        raise EmptyTrajectory("trajectory carries no diagnostic records")
    sign0 = records[0].exchange_sign
    s0 = records[0].s
    violations = []
    max_drift = 0.0
    for rec in records:
        drift = abs(rec.s - s0)
        max_drift = max(max_drift, drift)
        if rec.exchange_sign != sign0:
            violations.append((rec.t, f"sign {rec.exchange_sign} != {sign0}"))
        elif drift > tol:
            violations.append((rec.t, f"|S - S0| = {drift:.3e} > {tol:.3e}"))
    return PersistenceReport(sign0, s0, tol, violations, float(max_drift))
