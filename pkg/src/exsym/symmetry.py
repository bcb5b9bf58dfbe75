"""Symmetrized initial states and the mixed-symmetry collapse check.

Projectors onto the totally symmetric / antisymmetric sectors average the
N! particle permutations (exact signs, N <= 3 at desk scale). The collapse
check realizes the fact that a state symmetric under one transposition and
antisymmetric under another can only be the zero function: alternating
projections onto those two subspaces contract any state to zero because the
subspaces intersect trivially.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.special import eval_hermite, gammaln

from .errors import IndexOutOfRange, UnsupportedParticleCount
from .grid import DIRICHLET, Grid, WaveFunction

NULL_THRESHOLD = 1e-12
COLLAPSE_THRESHOLD = 1e-8


def permutation_sign(sigma) -> int:
    sign = 1
    seen = [False] * len(sigma)
    for start in range(len(sigma)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = sigma[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permutation_axis_order(grid: Grid, sigma) -> list[int]:
    """Axis order realizing (P_sigma psi)(r_1..r_N) = psi(r_sigma(1)..r_sigma(N))."""
    d = grid.dims_per_particle
    return [sigma[k] * d + a for k in range(grid.num_particles) for a in range(d)]


def apply_permutation(values: np.ndarray, grid: Grid, sigma) -> np.ndarray:
    return np.ascontiguousarray(values.transpose(permutation_axis_order(grid, sigma)))


def _projector(values: np.ndarray, grid: Grid, signed: bool) -> np.ndarray:
    n = grid.num_particles
    if n > 3:
        raise UnsupportedParticleCount(
            f"sector projectors are implemented for N <= 3, got N={n}")
    acc = np.zeros_like(values)
    count = 0
    for sigma in permutations(range(n)):
        term = apply_permutation(values, grid, sigma)
        if signed and permutation_sign(sigma) < 0:
            acc -= term
        else:
            acc += term
        count += 1
    return acc / count


def symmetric_projection(psi: WaveFunction) -> WaveFunction:
    """(1/N!) sum_sigma P_sigma psi, unnormalized."""
    return psi.with_values(_projector(psi.values, psi.grid, signed=False))


def antisymmetric_projection(psi: WaveFunction) -> WaveFunction:
    """(1/N!) sum_sigma sgn(sigma) P_sigma psi, unnormalized."""
    return psi.with_values(_projector(psi.values, psi.grid, signed=True))


@dataclass
class ProjectionResult:
    """Renormalized projection, or the zero field with ``null`` set."""

    state: WaveFunction
    null: bool
    raw_norm: float


def _finish_projection(projected: WaveFunction) -> ProjectionResult:
    n = projected.norm()
    if n > NULL_THRESHOLD:
        return ProjectionResult(projected.with_values(projected.values / n),
                                null=False, raw_norm=n)
    zero = projected.with_values(np.zeros_like(projected.values))
    return ProjectionResult(zero, null=True, raw_norm=n)


def symmetrize(psi: WaveFunction) -> ProjectionResult:
    """Project onto the totally symmetric sector and renormalize.

    Returns the zero field with ``null=True`` when the projection norm falls
    below 1e-12 (the state had no symmetric component).
    """
    return _finish_projection(symmetric_projection(psi))


def antisymmetrize(psi: WaveFunction) -> ProjectionResult:
    """Project onto the totally antisymmetric sector and renormalize.

    Identical orbitals annihilate under this projection (Pauli exclusion),
    reported via ``null=True``.
    """
    return _finish_projection(antisymmetric_projection(psi))


def transposition_project(psi: WaveFunction, i: int, j: int,
                          sign: int) -> WaveFunction:
    """(psi + sign * P_ij psi) / 2, unnormalized.

    Orthogonal projection onto the sign-(anti)symmetric subspace of the (i, j)
    swap; never increases the norm.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    from .grid import exchange

    swapped = exchange(psi, i, j)
    return psi.with_values(0.5 * (psi.values + sign * swapped.values))


@dataclass
class MixedSymmetryReport:
    """Norm decay under alternating sym(i,j) / antisym(k,l) projections."""

    norms: list[float]  # norm after each full round, norms[0] is the input
    iterations: int
    threshold: float
    verdict: str  # PASS, FAIL, or INCONCLUSIVE

    @property
    def final_norm(self) -> float:
        return self.norms[-1]


def mixed_symmetry_null_check(psi0: WaveFunction, iters: int = 200, *,
                              threshold: float = COLLAPSE_THRESHOLD,
                              sym_pair=(0, 1), anti_pair=(1, 2)) -> MixedSymmetryReport:
    """Alternately project onto sym(0,1) and antisym(1,2); track the norm.

    For three identical particles the two subspaces intersect only in the
    zero function, so the alternating projections contract every state to
    zero geometrically. PASS iff the final norm is <= ``threshold``;
    INCONCLUSIVE when no iterations were requested.
    """
    if psi0.grid.num_particles != 3:
        raise UnsupportedParticleCount(
            f"mixed-symmetry collapse needs N=3, got N={psi0.grid.num_particles}")
    state = psi0
    norms = [state.norm()]
    for _ in range(iters):
        state = transposition_project(state, sym_pair[0], sym_pair[1], +1)
        state = transposition_project(state, anti_pair[0], anti_pair[1], -1)
        norms.append(state.norm())
    if iters == 0:
        verdict = "INCONCLUSIVE"
    elif norms[-1] <= threshold:
        verdict = "PASS"
    else:
        verdict = "FAIL"
    return MixedSymmetryReport(norms, iters, threshold, verdict)


# ---------------------------------------------------------------------------
# Orbitals and initial states
# ---------------------------------------------------------------------------

def ho_orbital(n):
    """Harmonic-oscillator eigenfunction(s), hbar = m = omega = 1.

    ``n`` is an int (d=1) or a sequence with one quantum number per dimension.
    Returns a callable mapping per-dimension coordinate arrays to amplitudes.
    """
    ns = (n,) if np.isscalar(n) else tuple(n)

    def _eval(coords):
        out = 1.0
        for a, x in enumerate(coords):
            na = ns[a] if a < len(ns) else ns[-1]
            x = np.asarray(x, dtype=np.float64)
            lognorm = -0.5 * (na * np.log(2.0) + gammaln(na + 1)
                              + 0.5 * np.log(np.pi))
            out = out * (np.exp(lognorm) * eval_hermite(na, x)
                         * np.exp(-0.5 * x * x))
        return out.astype(np.complex128)

    return _eval


def gaussian_orbital(center=0.0, width=1.0, momentum=0.0):
    """Gaussian packet whose |psi|^2 has standard deviation ``width`` per axis.

    psi(x) ~ exp(-(x-c)^2 / (4 w^2) + i k (x-c)); with this convention a free
    packet spreads as sigma(t)^2 = w^2 (1 + (hbar t / (2 m w^2))^2).
    """
    def _per_axis(param, a):
        arr = np.atleast_1d(np.asarray(param, dtype=np.float64))
        return float(arr[a]) if arr.size > 1 else float(arr[0])

    def _eval(coords):
        out = 1.0
        for a, x in enumerate(coords):
            c = _per_axis(center, a)
            w = _per_axis(width, a)
            k = _per_axis(momentum, a)
            x = np.asarray(x, dtype=np.float64)
            out = out * ((2.0 * np.pi * w * w) ** -0.25
                         * np.exp(-((x - c) ** 2) / (4.0 * w * w)
                                  + 1j * k * (x - c)))
        return np.asarray(out, dtype=np.complex128)

    return _eval


def _mask_and_normalize(grid: Grid, values: np.ndarray) -> WaveFunction:
    if grid.boundary == DIRICHLET:
        values = values.copy()
        values[grid.boundary_mask()] = 0.0
    psi = WaveFunction(grid, values, copy=False)
    return psi.normalized()


def _orbital_fields(grid: Grid, orbitals) -> list[list[np.ndarray]]:
    """fields[o][p]: orbital o evaluated on particle p's axes (broadcastable)."""
    fields = []
    for orb in orbitals:
        per_particle = []
        for p in range(grid.num_particles):
            coords = [grid.coordinate_field(p, a)
                      for a in range(grid.dims_per_particle)]
            per_particle.append(np.asarray(orb(coords), dtype=np.complex128))
        fields.append(per_particle)
    return fields


def product_state(grid: Grid, orbitals) -> WaveFunction:
    """psi = prod_k phi_k(r_k), normalized on the grid."""
    if len(orbitals) != grid.num_particles:
        raise ValueError(f"need {grid.num_particles} orbitals, got {len(orbitals)}")
    fields = _orbital_fields(grid, orbitals)
    values = np.ones(grid.shape, dtype=np.complex128)
    for p in range(grid.num_particles):
        values = values * fields[p][p]
    return _mask_and_normalize(grid, np.ascontiguousarray(values))


def _permanent_like(grid: Grid, orbitals, signed: bool) -> WaveFunction:
    if len(orbitals) != grid.num_particles:
        raise ValueError(f"need {grid.num_particles} orbitals, got {len(orbitals)}")
    n = grid.num_particles
    if n > 3:
        raise UnsupportedParticleCount(
            f"(anti)symmetrized products are implemented for N <= 3, got N={n}")
    fields = _orbital_fields(grid, orbitals)
    acc = np.zeros(grid.shape, dtype=np.complex128)
    for sigma in permutations(range(n)):
        term = np.ones(grid.shape, dtype=np.complex128)
        for p in range(n):
            term = term * fields[sigma[p]][p]
        if signed and permutation_sign(sigma) < 0:
            acc -= term
        else:
            acc += term
    return _mask_and_normalize(grid, acc)


def slater_state(grid: Grid, orbitals) -> WaveFunction:
    """Antisymmetrized product of orbitals (normalized Slater determinant)."""
    return _permanent_like(grid, orbitals, signed=True)


def symmetrized_product_state(grid: Grid, orbitals) -> WaveFunction:
    """Symmetrized product of orbitals, normalized."""
    return _permanent_like(grid, orbitals, signed=False)


def gaussian_packet(grid: Grid, center=0.0, width=1.0, momentum=0.0) -> WaveFunction:
    """Product of one Gaussian orbital per particle.

    ``center`` and ``momentum`` may be scalars, per-dimension sequences, or
    nested per-particle sequences of per-dimension values.
    """
    def _per_particle(param, p):
        arr = np.asarray(param, dtype=np.float64)
        if arr.ndim == 2:
            return arr[p]
        return arr

    orbitals = [gaussian_orbital(_per_particle(center, p), width,
                                 _per_particle(momentum, p))
                for p in range(grid.num_particles)]
    return product_state(grid, orbitals)


def random_state(grid: Grid, seed: int = 0) -> WaveFunction:
    """Complex standard-normal amplitudes, boundary-masked, normalized."""
    rng = np.random.default_rng(seed)
    values = (rng.standard_normal(grid.shape)
              + 1j * rng.standard_normal(grid.shape))
    return _mask_and_normalize(grid, values)


def validate_pair(grid: Grid, i: int, j: int) -> None:
    n = grid.num_particles
    if i == j or not (0 <= i < n) or not (0 <= j < n):
        raise IndexOutOfRange(f"invalid particle pair ({i}, {j}) for N={n}")
