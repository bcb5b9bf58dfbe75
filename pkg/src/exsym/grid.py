"""Configuration-space grids, wavefunctions, and the exchange permutation.

The joint state of N identical particles in d dimensions lives on the tensor
product of N copies of one shared d-dimensional box. Arrays are stored
row-major with particle 0's axes slowest, so axis ``p*d + a`` of the amplitude
array is dimension ``a`` of particle ``p``. Because every particle sees the
identical per-dimension axes, swapping two particles is an exact permutation
of grid indices (an axis-block transposition), never an interpolation.

Boundary conventions:

* ``dirichlet`` -- M points including both walls, spacing (max-min)/(M-1);
  amplitudes on the outermost slabs are pinned to zero by the state builders
  and by the implicit propagator. The spectral propagator preserves those
  zeros only to boundary-mass precision (re-zeroing each step would spend the
  boundary-mass budget in norm), which is why it demands negligible boundary
  mass up front.
* ``periodic`` -- M points with the right endpoint excluded, spacing
  (max-min)/M.

Inner products use the uniform-grid Riemann (midpoint) rule, which keeps them
bilinear and exactly invariant under the exchange permutation.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    CheckpointError,
    GridMismatch,
    IndexOutOfRange,
    InvalidAxis,
    MemoryBudgetExceeded,
)

DIRICHLET = "dirichlet"
PERIODIC = "periodic"

#: Default memory budget: 2**27 complex128 values.
DEFAULT_MEMORY_BUDGET = (2**27) * 16

#: Environment variable overriding the default memory budget (bytes).
MEMORY_BUDGET_ENV = "EXSYM_MEMORY_BUDGET"

NORMALIZATION_TOL = 1e-10

_CHECKPOINT_MAGIC = b"SYMW1"


@dataclass(frozen=True)
class AxisSpec:
    """One shared per-particle axis: uniformly spaced points on [min, max]."""

    min: float
    max: float
    points: int

    def validate(self) -> None:
        if not (self.max > self.min):
            raise InvalidAxis(f"axis needs max > min, got [{self.min}, {self.max}]")
        if self.points < 4:
            raise InvalidAxis(f"axis needs at least 4 points, got {self.points}")


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar, particle mass, and charge. Natural units by default."""

    hbar: float = 1.0
    mass: float = 1.0
    charge: float = 1.0

    def validate(self) -> None:
        if self.hbar <= 0 or self.mass <= 0:
            raise ValueError("hbar and mass must be positive")


@dataclass(frozen=True)
class GridSpec:
    """Static description of a configuration-space grid.

    Parameters
    ----------
    num_particles : int
        N >= 1 identical particles.
    dims_per_particle : int
        d in {1, 2, 3}.
    axes : tuple of AxisSpec
        One entry per dimension, shared by every particle. Sharing is what
        makes the exchange map a bijection of grid indices.
    boundary : str
        ``dirichlet`` (default) or ``periodic``.
    """

    num_particles: int
    dims_per_particle: int
    axes: tuple[AxisSpec, ...]
    boundary: str = DIRICHLET

    @classmethod
    def cube(cls, num_particles, dims_per_particle, lo, hi, points,
             boundary=DIRICHLET) -> "GridSpec":
        """Same [lo, hi] x points axis for every dimension."""
        axis = AxisSpec(float(lo), float(hi), int(points))
        return cls(num_particles, dims_per_particle,
                   (axis,) * dims_per_particle, boundary)

    def validate(self) -> None:
        if self.num_particles < 1:
            raise InvalidAxis(f"num_particles must be >= 1, got {self.num_particles}")
        if self.dims_per_particle not in (1, 2, 3):
            raise InvalidAxis(
                f"dims_per_particle must be 1, 2 or 3, got {self.dims_per_particle}")
        if len(self.axes) != self.dims_per_particle:
            raise InvalidAxis(
                f"expected {self.dims_per_particle} axis specs, got {len(self.axes)}")
        if self.boundary not in (DIRICHLET, PERIODIC):
            raise InvalidAxis(f"unknown boundary {self.boundary!r}")
        for axis in self.axes:
            axis.validate()

    @property
    def total_points(self) -> int:
        per_particle = math.prod(axis.points for axis in self.axes)
        return per_particle**self.num_particles

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.points for axis in self.axes) * self.num_particles


def _resolve_budget(budget: int | None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get(MEMORY_BUDGET_ENV)
    if env is not None:
        return int(env)
    return DEFAULT_MEMORY_BUDGET


class Grid:
    """Realized grid: coordinates, spacings, and spectral wavenumbers.

    Construct through :func:`build_grid`, which enforces the memory budget.
    """

    def __init__(self, spec: GridSpec):
        spec.validate()
        self.spec = spec
        self.coordinates: list[np.ndarray] = []
        self.spacings: list[float] = []
        self.wavenumbers: list[np.ndarray] = []
        for axis in spec.axes:
            if spec.boundary == DIRICHLET:
                dx = (axis.max - axis.min) / (axis.points - 1)
                x = np.linspace(axis.min, axis.max, axis.points)
            else:
                dx = (axis.max - axis.min) / axis.points
                x = axis.min + dx * np.arange(axis.points)
            self.coordinates.append(x)
            self.spacings.append(dx)
            self.wavenumbers.append(2.0 * np.pi * np.fft.fftfreq(axis.points, d=dx))
        self.shape = spec.shape
        self.size = spec.total_points
        self.volume_element = math.prod(self.spacings) ** spec.num_particles
        self._boundary_mask: np.ndarray | None = None

    @property
    def num_particles(self) -> int:
        return self.spec.num_particles

    @property
    def dims_per_particle(self) -> int:
        return self.spec.dims_per_particle

    @property
    def boundary(self) -> str:
        return self.spec.boundary

    def axis_index(self, particle: int, dim: int) -> int:
        return particle * self.spec.dims_per_particle + dim

    def coordinate_field(self, particle: int, dim: int) -> np.ndarray:
        """Coordinate of (particle, dim) shaped to broadcast over the grid."""
        ax = self.axis_index(particle, dim)
        shape = [1] * len(self.shape)
        shape[ax] = self.shape[ax]
        return self.coordinates[dim].reshape(shape)

    def config_coords(self) -> list[list[np.ndarray]]:
        """Nested [particle][dim] broadcastable coordinate arrays."""
        return [[self.coordinate_field(p, a) for a in range(self.dims_per_particle)]
                for p in range(self.num_particles)]

    def boundary_mask(self) -> np.ndarray:
        """Boolean field marking the outermost slab along every axis."""
        if self._boundary_mask is None:
            mask = np.zeros(self.shape, dtype=bool)
            for ax in range(len(self.shape)):
                sl = [slice(None)] * len(self.shape)
                sl[ax] = 0
                mask[tuple(sl)] = True
                sl[ax] = -1
                mask[tuple(sl)] = True
            mask.setflags(write=False)
            self._boundary_mask = mask
        return self._boundary_mask

    def compatible(self, other: "Grid") -> bool:
        return self.spec == other.spec

    def __repr__(self) -> str:
        s = self.spec
        return (f"Grid(N={s.num_particles}, d={s.dims_per_particle}, "
                f"shape={self.shape}, boundary={s.boundary})")


def build_grid(spec: GridSpec, budget: int | None = None) -> Grid:
    """Build a grid handle, enforcing the memory budget.

    Parameters
    ----------
    spec : GridSpec
    budget : int, optional
        Byte budget for one complex128 field on this grid. Defaults to the
        ``EXSYM_MEMORY_BUDGET`` environment variable, then to 2 GiB
        (2**27 points).

    Raises
    ------
    MemoryBudgetExceeded
        If ``total_points * 16`` exceeds the budget.
    InvalidAxis
        If the spec is malformed.
    """
    spec.validate()
    limit = _resolve_budget(budget)
    need = spec.total_points * 16
    if need > limit:
        raise MemoryBudgetExceeded(
            f"grid needs {need} bytes ({spec.total_points} complex values), "
            f"budget is {limit}")
    return Grid(spec)


class WaveFunction:
    """Complex amplitude field over a configuration grid.

    Values are immutable once constructed (the backing array is marked
    read-only); every operation returns a new instance.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray, *, copy: bool = True,
                 check: bool = True):
        arr = np.array(values, dtype=np.complex128, copy=copy, order="C")
        if arr.shape != grid.shape:
            raise GridMismatch(
                f"amplitude shape {arr.shape} does not match grid shape {grid.shape}")
        if check and not np.isfinite(arr).all():
            raise ValueError("wavefunction amplitudes must be finite")
        arr.setflags(write=False)
        self.grid = grid
        self.values = arr

    @property
    def volume_element(self) -> float:
        return self.grid.volume_element

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.values, self.values).real
                             * self.grid.volume_element))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm() - 1.0) <= NORMALIZATION_TOL

    def normalized(self) -> "WaveFunction":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero field")
        return WaveFunction(self.grid, self.values / n, copy=False, check=False)

    def boundary_mass(self) -> float:
        mask = self.grid.boundary_mask()
        vals = self.values[mask]
        return float(np.vdot(vals, vals).real * self.grid.volume_element)

    def with_values(self, values: np.ndarray, *, copy: bool = False,
                    check: bool = False) -> "WaveFunction":
        return WaveFunction(self.grid, values, copy=copy, check=check)

    def __repr__(self) -> str:
        return f"WaveFunction(grid={self.grid!r}, norm={self.norm():.6g})"


def _exchange_axis_order(grid: Grid, i: int, j: int) -> list[int]:
    n, d = grid.num_particles, grid.dims_per_particle
    if i == j:
        raise IndexOutOfRange(f"exchange needs two distinct particles, got ({i}, {j})")
    for idx in (i, j):
        if not (0 <= idx < n):
            raise IndexOutOfRange(f"particle index {idx} outside [0, {n})")
    order = list(range(n * d))
    for a in range(d):
        order[i * d + a], order[j * d + a] = order[j * d + a], order[i * d + a]
    return order


@dataclass
class ExchangeMap:
    """Index permutation swapping the coordinate slots of particles i and j.

    Applying it twice is the identity; applying it to an amplitude array moves
    values without arithmetic, so norms are preserved bit for bit.
    """

    grid: Grid
    i: int
    j: int

    def __post_init__(self):
        self.axis_order = _exchange_axis_order(self.grid, self.i, self.j)

    def apply_to_array(self, values: np.ndarray) -> np.ndarray:
        return np.ascontiguousarray(values.transpose(self.axis_order))

    def apply(self, psi: WaveFunction) -> WaveFunction:
        return psi.with_values(self.apply_to_array(psi.values))

    def permutation_indices(self) -> np.ndarray:
        """Flat-index bijection sigma with (P psi).flat = psi.flat[sigma]."""
        return np.ascontiguousarray(
            np.arange(self.grid.size).reshape(self.grid.shape)
            .transpose(self.axis_order).ravel())


def exchange(psi: WaveFunction, i: int, j: int) -> WaveFunction:
    """Swap particles i and j: amplitude at (..r_i..r_j..) moves to (..r_j..r_i..).

    Pure permutation of stored values; exact involution.
    """
    return ExchangeMap(psi.grid, i, j).apply(psi)


def inner_product(phi: WaveFunction, psi: WaveFunction) -> complex:
    """<phi|psi> = sum conj(phi) * psi * volume_element.

    Conjugate-linear in ``phi``, linear in ``psi``; summation uses numpy's
    fixed-order pairwise reduction, so results are deterministic across runs.
    """
    if not phi.grid.compatible(psi.grid):
        raise GridMismatch("inner product requires both states on the same grid")
    return complex(np.vdot(phi.values, psi.values) * phi.grid.volume_element)


def norm(psi: WaveFunction) -> float:
    """L2 norm of the amplitude field (>= 0)."""
    return psi.norm()


def save_checkpoint(psi: WaveFunction, path) -> None:
    """Write the little-endian binary checkpoint format.

    Layout: magic ``SYMW1``; N and d as u32; per dimension (min f64, max f64,
    points u32); boundary flag u8 (0 dirichlet, 1 periodic); then the
    amplitudes row-major as (f64 re, f64 im) pairs.
    """
    spec = psi.grid.spec
    with open(path, "wb") as fh:
        fh.write(_CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", spec.num_particles, spec.dims_per_particle))
        for axis in spec.axes:
            fh.write(struct.pack("<ddI", axis.min, axis.max, axis.points))
        fh.write(struct.pack("<B", 0 if spec.boundary == DIRICHLET else 1))
        fh.write(np.ascontiguousarray(psi.values, dtype="<c16").tobytes())


def load_checkpoint(path, budget: int | None = None) -> WaveFunction:
    """Read a checkpoint written by :func:`save_checkpoint`."""
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != _CHECKPOINT_MAGIC:
            raise CheckpointError(f"bad magic {magic!r}")
        try:
            n, d = struct.unpack("<II", fh.read(8))
            axes = []
            for _ in range(d):
                lo, hi, m = struct.unpack("<ddI", fh.read(20))
                axes.append(AxisSpec(lo, hi, m))
            (flag,) = struct.unpack("<B", fh.read(1))
        except struct.error as exc:
            raise CheckpointError("truncated header") from exc
        spec = GridSpec(n, d, tuple(axes), DIRICHLET if flag == 0 else PERIODIC)
        grid = build_grid(spec, budget)
        raw = fh.read(grid.size * 16)
        if len(raw) != grid.size * 16:
            raise CheckpointError(
                f"expected {grid.size} complex values, file is truncated")
        values = np.frombuffer(raw, dtype="<c16").reshape(grid.shape)
        return WaveFunction(grid, values.astype(np.complex128))
