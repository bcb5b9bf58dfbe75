"""Scalar and vector potentials with symmetry and gauge certificates.

Scalar potentials map a configuration (all particle positions) and a time to
an energy; the exchange-symmetry certificate records sampled runtime evidence
that V is invariant under swapping any two particle slots. Vector potentials
are single-particle fields A(r, t); the Coulomb-gauge certificate records
sampled evidence that div A vanishes. Certificates are evidence, not proofs.

A separate single-particle electric potential is not modeled: any such term
is a particle-symmetric scalar potential and belongs in the scalar part.

Evaluators take coordinates as nested broadcastable arrays (``coords[k][a]``
is dimension ``a`` of particle ``k``), so the same callable serves pointwise
sampling and whole-grid evaluation without materializing a coordinate stack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EqualFrequencies,
    NonPositiveFrequency,
    SingularKernel,
)
from .grid import Grid, PhysicalConstants

# Scalar-potential symmetry certificates.
EXCHANGE_SYMMETRIC = "exchange_symmetric"
ASYMMETRIC = "asymmetric"
UNVERIFIED = "unverified"

# Vector-potential gauge certificates and spatial profiles.
COULOMB_VERIFIED = "coulomb_verified"
UNIFORM = "uniform"
GENERAL = "general"

SYMMETRY_RTOL = 1e-12
GAUGE_RTOL = 1e-8


class ScalarPotential:
    """Scalar potential V(r_1..r_N, t) with an exchange-symmetry certificate."""

    def __init__(self, func, *, certificate: str = UNVERIFIED,
                 static: bool = True, label: str = "custom"):
        self._func = func
        self.certificate = certificate
        self.static = static  # True when V has no time dependence
        self.label = label

    def __call__(self, coords, t: float = 0.0):
        return self._func(coords, t)

    def on_grid(self, grid: Grid, t: float = 0.0) -> np.ndarray:
        """Evaluate V at every grid point; raises SingularKernel on non-finite."""
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = np.asarray(self(grid.config_coords(), t), dtype=np.float64)
        out = np.broadcast_to(raw, grid.shape)
        if not np.isfinite(out).all():
            raise SingularKernel(
                f"potential {self.label!r} evaluated non-finite on the grid")
        return np.ascontiguousarray(out)

    def at_points(self, points: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Evaluate at explicit configurations, shape (n, N, d) -> (n,)."""
        pts = np.asarray(points, dtype=np.float64)
        coords = [[pts[:, k, a] for a in range(pts.shape[2])]
                  for k in range(pts.shape[1])]
        return np.broadcast_to(np.asarray(self(coords, t), dtype=np.float64),
                               (pts.shape[0],)).copy()

    def __repr__(self) -> str:
        return f"ScalarPotential({self.label!r}, certificate={self.certificate})"


class VectorPotential:
    """Single-particle vector potential A(r, t) in d dimensions."""

    def __init__(self, func, dims: int, *, spatial_profile: str = GENERAL,
                 gauge_certificate: str = UNVERIFIED, label: str = "custom"):
        self._func = func
        self.dims = dims
        self.spatial_profile = spatial_profile
        self.gauge_certificate = gauge_certificate
        self.label = label

    @property
    def is_uniform(self) -> bool:
        return self.spatial_profile == UNIFORM

    def __call__(self, r, t: float):
        """Components at position r (sequence of d broadcastable arrays)."""
        return self._func(r, t)

    def at_time(self, t: float) -> np.ndarray:
        """Uniform value A(t) as a (d,) array. Uniform profiles only."""
        if not self.is_uniform:
            raise ValueError("at_time is defined for uniform profiles only")
        zeros = [np.float64(0.0)] * self.dims
        return np.array([np.asarray(c, dtype=np.float64).reshape(())
                         for c in self(zeros, t)], dtype=np.float64)

    def __repr__(self) -> str:
        return (f"VectorPotential({self.label!r}, profile={self.spatial_profile}, "
                f"gauge={self.gauge_certificate})")


def zero_potential() -> ScalarPotential:
    """V = 0 (free motion); trivially exchange symmetric."""
    return ScalarPotential(lambda coords, t: np.float64(0.0),
                           certificate=EXCHANGE_SYMMETRIC, label="free")


def harmonic_trap(omega: float,
                  constants: PhysicalConstants = PhysicalConstants()) -> ScalarPotential:
    """Isotropic trap V = (1/2) m omega^2 sum_k |r_k|^2.

    Exchange symmetric by construction (same trap for every particle).
    """
    if omega <= 0:
        raise NonPositiveFrequency(f"harmonic trap needs omega > 0, got {omega}")
    pref = 0.5 * constants.mass * omega * omega

    def _eval(coords, t):
        total = 0.0
        for particle in coords:
            for x in particle:
                total = total + np.asarray(x) ** 2
        return pref * total

    return ScalarPotential(_eval, certificate=EXCHANGE_SYMMETRIC,
                           label=f"harmonic(omega={omega})")


def gaussian_kernel(width: float = 1.0):
    """kernel(s) = exp(-s^2 / (2 width^2)); kernel(0) = 1."""
    if width <= 0:
        raise ValueError("gaussian kernel width must be positive")
    return lambda s: np.exp(-0.5 * (np.asarray(s) / width) ** 2)


def soft_coulomb_kernel(softening: float):
    """kernel(s) = 1 / sqrt(s^2 + a^2). Singular at s=0 when a=0."""
    a2 = softening * softening
    return lambda s: 1.0 / np.sqrt(np.asarray(s) ** 2 + a2)


def pairwise(kernel, strength: float = 1.0) -> ScalarPotential:
    """Interaction V = strength * sum_{k<l} kernel(|r_k - r_l|).

    Depends only on unordered separations, hence exchange symmetric by
    construction. The kernel is probed at zero separation (always achievable
    since particles share axes) and rejected if non-finite.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        probe = np.asarray(kernel(np.float64(0.0)), dtype=np.float64)
    if not np.isfinite(probe).all():
        raise SingularKernel(
            "kernel is non-finite at zero separation; add a softening parameter")

    def _eval(coords, t):
        total = 0.0
        n = len(coords)
        for k in range(n):
            for l in range(k + 1, n):
                sep2 = 0.0
                for a in range(len(coords[k])):
                    diff = np.asarray(coords[k][a]) - np.asarray(coords[l][a])
                    sep2 = sep2 + diff * diff
                total = total + kernel(np.sqrt(sep2))
        return strength * total

    return ScalarPotential(_eval, certificate=EXCHANGE_SYMMETRIC,
                           label=f"pairwise(strength={strength})")


def asymmetric_trap(omega1: float, omega2: float,
                    constants: PhysicalConstants = PhysicalConstants()) -> ScalarPotential:
    """Two-particle control V = (1/2) m (omega1^2 |r_1|^2 + omega2^2 |r_2|^2).

    Deliberately breaks exchange symmetry; used as the negative control for
    the conservation diagnostics. Requires exactly two particles.
    """
    if omega1 <= 0 or omega2 <= 0:
        raise NonPositiveFrequency("asymmetric trap needs positive frequencies")
    if omega1 == omega2:
        raise EqualFrequencies(
            "equal frequencies give a symmetric trap; use harmonic_trap")
    m = constants.mass
    w2 = (0.5 * m * omega1 * omega1, 0.5 * m * omega2 * omega2)

    def _eval(coords, t):
        if len(coords) != 2:
            raise ValueError("asymmetric_trap is defined for exactly 2 particles")
        total = 0.0
        for k in (0, 1):
            r2 = 0.0
            for x in coords[k]:
                r2 = r2 + np.asarray(x) ** 2
            total = total + w2[k] * r2
        return total

    return ScalarPotential(_eval, certificate=ASYMMETRIC,
                           label=f"asymmetric(omega1={omega1}, omega2={omega2})")


def sum_potentials(parts: list[ScalarPotential]) -> ScalarPotential:
    """Pointwise sum; certificate is the weakest of the parts'."""
    if not parts:
        raise ValueError("sum_potentials needs at least one term")
    if any(p.certificate == ASYMMETRIC for p in parts):
        cert = ASYMMETRIC
    elif all(p.certificate == EXCHANGE_SYMMETRIC for p in parts):
        cert = EXCHANGE_SYMMETRIC
    else:
        cert = UNVERIFIED

    def _eval(coords, t):
        total = parts[0](coords, t)
        for p in parts[1:]:
            total = total + p(coords, t)
        return total

    return ScalarPotential(_eval, certificate=cert,
                           static=all(p.static for p in parts),
                           label="+".join(p.label for p in parts))


def uniform_vector_potential(profile, dims: int) -> VectorPotential:
    """Spatially uniform A(t); satisfies the Coulomb gauge identically.

    ``profile`` maps a time to a length-d sequence of components (or is a
    constant sequence).
    """
    if callable(profile):
        time_profile = profile
    else:
        const = np.asarray(profile, dtype=np.float64).reshape(dims)
        time_profile = lambda t: const

    def _eval(r, t):
        vals = np.asarray(time_profile(t), dtype=np.float64).reshape(dims)
        return [np.float64(vals[a]) for a in range(dims)]

    return VectorPotential(_eval, dims, spatial_profile=UNIFORM,
                           gauge_certificate=COULOMB_VERIFIED, label="uniform")


def cosine_vector_potential(amplitude, omega: float, dims: int) -> VectorPotential:
    """A(t) = amplitude * cos(omega t), spatially uniform."""
    amp = np.asarray(amplitude, dtype=np.float64).reshape(dims)
    pot = uniform_vector_potential(lambda t: amp * np.cos(omega * t), dims)
    pot.label = f"uniform_cos(|A|={np.linalg.norm(amp):.3g}, omega={omega})"
    return pot


def shear_vector_potential(strength: float, dims: int,
                           omega: float = 0.0) -> VectorPotential:
    """Non-uniform divergence-free field A = strength*cos(omega t) * (r_y, 0, ..).

    Needs d >= 2 (in one dimension every divergence-free field is uniform).
    Certificate starts unverified; run :func:`verify_coulomb_gauge` to
    upgrade it.
    """
    if dims < 2:
        raise ValueError("shear vector potential needs at least 2 dimensions")

    def _eval(r, t):
        factor = strength * (np.cos(omega * t) if omega else 1.0)
        out = [np.asarray(r[1], dtype=np.float64) * factor]
        for a in range(1, dims):
            out.append(np.zeros_like(np.asarray(r[a], dtype=np.float64)))
        return out

    return VectorPotential(_eval, dims, spatial_profile=GENERAL,
                           label=f"shear(strength={strength})")


def general_vector_potential(func, dims: int) -> VectorPotential:
    """Wrap an arbitrary A(r, t); certificate starts unverified."""
    return VectorPotential(func, dims, spatial_profile=GENERAL, label="general")


@dataclass
class SymmetryReport:
    """Outcome of sampled exchange-symmetry verification."""

    samples: int
    pairs_checked: int
    max_violation: float
    tolerance: float
    passed: bool
    witness: tuple | None  # (configuration, pair, violation) on failure


@dataclass
class GaugeReport:
    """Outcome of sampled Coulomb-gauge verification."""

    samples: int
    max_divergence: float
    tolerance: float
    passed: bool
    failures: list


def verify_exchange_symmetry(potential: ScalarPotential, grid: Grid,
                             samples: int = 128, *, t_values=(0.0,),
                             rng=None) -> SymmetryReport:
    """Sample random grid configurations and compare V under every pair swap.

    Sets the potential's certificate from the observed evidence. Tolerance is
    relative: |V(..r_i..r_j..) - V(..r_j..r_i..)| <= 1e-12 * (1 + |V|).
    """
    rng = np.random.default_rng(rng if rng is not None else 0)
    n, d = grid.num_particles, grid.dims_per_particle
    idx = rng.integers(0, [grid.shape[ax] for ax in range(n * d)],
                       size=(samples, n * d))
    pts = np.empty((samples, n, d))
    for p in range(n):
        for a in range(d):
            pts[:, p, a] = grid.coordinates[a][idx[:, p * d + a]]

    max_violation = 0.0
    witness = None
    pairs = 0
    for t in t_values:
        base = potential.at_points(pts, t)
        for i in range(n):
            for j in range(i + 1, n):
                pairs += 1
                swapped = pts.copy()
                swapped[:, [i, j], :] = swapped[:, [j, i], :]
                other = potential.at_points(swapped, t)
                viol = np.abs(base - other) / (1.0 + np.abs(base))
                worst = int(np.argmax(viol))
                if viol[worst] > max_violation:
                    max_violation = float(viol[worst])
                    witness = (pts[worst].copy(), (i, j), max_violation)
    passed = n < 2 or max_violation <= SYMMETRY_RTOL
    potential.certificate = EXCHANGE_SYMMETRIC if passed else ASYMMETRIC
    return SymmetryReport(samples, pairs, max_violation, SYMMETRY_RTOL,
                          passed, None if passed else witness)


def verify_coulomb_gauge(potential: VectorPotential, samples: int = 64, *,
                         extent: tuple[float, float] = (-1.0, 1.0),
                         t_values=(0.0, 0.3, 1.7), step: float = 1e-4,
                         rng=None) -> GaugeReport:
    """Sample central-difference divergence of A at random points and times.

    Upgrades the gauge certificate iff every sample satisfies
    |div A| <= 1e-8 * (1 + |A|).
    """
    rng = np.random.default_rng(rng if rng is not None else 0)
    d = potential.dims
    lo, hi = extent
    points = rng.uniform(lo, hi, size=(samples, d))
    max_div = 0.0
    failures = []
    for t in t_values:
        for point in points:
            div = 0.0
            for a in range(d):
                plus = [np.float64(point[b] + (step if b == a else 0.0))
                        for b in range(d)]
                minus = [np.float64(point[b] - (step if b == a else 0.0))
                         for b in range(d)]
                div += (float(np.asarray(potential(plus, t)[a]))
                        - float(np.asarray(potential(minus, t)[a]))) / (2 * step)
            mag = float(np.linalg.norm(
                [float(np.asarray(c)) for c in potential(list(point), t)]))
            tol = GAUGE_RTOL * (1.0 + mag)
            if abs(div) > tol:
                failures.append((point.copy(), t, div))
            max_div = max(max_div, abs(div))
    passed = not failures
    if passed:
        potential.gauge_certificate = COULOMB_VERIFIED
    return GaugeReport(samples, max_div, GAUGE_RTOL, passed, failures)
