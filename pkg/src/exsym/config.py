"""Run-configuration parsing, validation, and scenario assembly.

Configs are JSON. Validation errors carry the dotted path of the offending
field so the CLI can point at it. See README for the full schema; the short
form is:

    {
      "grid": {"num_particles", "dims_per_particle", "axis"|"axes", "boundary"},
      "constants": {"hbar", "mass", "charge"},            # optional
      "potential": {"type": harmonic|pairwise|asymmetric|free|sum, ...},
      "vector_potential": {"type": none|uniform|shear, ...},   # optional
      "initial_state": {"type": product|slater|symmetrized_product|gaussian|random, ...},
      "scheme": {"kind": split_operator|implicit_fd, "dt", ...},
      "t_final": number,
      "diagnostics": {"record_every", "pair"},            # optional
      "tolerances": {"s_drift", "sign_tol", "mask_eps", "collapse_norm"},
      "output": {"snapshot_every"},                       # optional
      "experiment": {"type": evolve|mixed_null, ...}      # optional
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import potentials as pots
from . import symmetry as sym
from .errors import ConfigInvalid
from .grid import (
    AxisSpec,
    DIRICHLET,
    Grid,
    GridSpec,
    PERIODIC,
    PhysicalConstants,
    WaveFunction,
    build_grid,
)
from .propagator import Hamiltonian, IMPLICIT_FD, SPLIT_OPERATOR, Scheme

EXPERIMENT_EVOLVE = "evolve"
EXPERIMENT_MIXED_NULL = "mixed_null"


def _as_dict(value, path):
    if not isinstance(value, dict):
        raise ConfigInvalid(path, f"expected an object, got {type(value).__name__}")
    return value


def _as_list(value, path):
    if not isinstance(value, list):
        raise ConfigInvalid(path, f"expected a list, got {type(value).__name__}")
    return value


def _number(obj, key, path, default=None):
    if key not in obj:
        if default is None:
            raise ConfigInvalid(f"{path}.{key}", "missing required number")
        return float(default)
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigInvalid(f"{path}.{key}", f"expected a number, got {v!r}")
    return float(v)


def _integer(obj, key, path, default=None):
    if key not in obj:
        if default is None:
            raise ConfigInvalid(f"{path}.{key}", "missing required integer")
        return int(default)
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigInvalid(f"{path}.{key}", f"expected an integer, got {v!r}")
    return v


def _string(obj, key, path, choices=None, default=None):
    if key not in obj:
        if default is None:
            raise ConfigInvalid(f"{path}.{key}", "missing required string")
        return default
    v = obj[key]
    if not isinstance(v, str):
        raise ConfigInvalid(f"{path}.{key}", f"expected a string, got {v!r}")
    if choices is not None and v not in choices:
        raise ConfigInvalid(f"{path}.{key}",
                            f"expected one of {sorted(choices)}, got {v!r}")
    return v


def load_config(path) -> dict:
    """Read a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(str(path), f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(str(path), f"invalid JSON: {exc}") from exc


def _parse_grid(cfg) -> GridSpec:
    if "grid" not in cfg:
        raise ConfigInvalid("grid", "missing required block")
    g = _as_dict(cfg["grid"], "grid")
    n = _integer(g, "num_particles", "grid")
    d = _integer(g, "dims_per_particle", "grid")
    boundary = _string(g, "boundary", "grid", choices={DIRICHLET, PERIODIC},
                       default=DIRICHLET)
    if "axes" in g:
        axes = []
        for idx, entry in enumerate(_as_list(g["axes"], "grid.axes")):
            e = _as_dict(entry, f"grid.axes[{idx}]")
            axes.append(AxisSpec(_number(e, "min", f"grid.axes[{idx}]"),
                                 _number(e, "max", f"grid.axes[{idx}]"),
                                 _integer(e, "points", f"grid.axes[{idx}]")))
        axes = tuple(axes)
    elif "axis" in g:
        a = _as_dict(g["axis"], "grid.axis")
        axis = AxisSpec(_number(a, "min", "grid.axis"),
                        _number(a, "max", "grid.axis"),
                        _integer(a, "points", "grid.axis"))
        axes = (axis,) * d
    else:
        raise ConfigInvalid("grid.axis", "missing axis specification")
    spec = GridSpec(n, d, axes, boundary)
    try:
        spec.validate()
    except Exception as exc:
        raise ConfigInvalid("grid", str(exc)) from exc
    return spec


def _parse_constants(cfg) -> PhysicalConstants:
    if "constants" not in cfg:
        return PhysicalConstants()
    c = _as_dict(cfg["constants"], "constants")
    consts = PhysicalConstants(_number(c, "hbar", "constants", 1.0),
                               _number(c, "mass", "constants", 1.0),
                               _number(c, "charge", "constants", 1.0))
    try:
        consts.validate()
    except ValueError as exc:
        raise ConfigInvalid("constants", str(exc)) from exc
    return consts


def build_potential(node, constants, path="potential") -> pots.ScalarPotential:
    node = _as_dict(node, path)
    kind = _string(node, "type", path,
                   choices={"harmonic", "pairwise", "asymmetric", "free", "sum"})
    try:
        if kind == "harmonic":
            return pots.harmonic_trap(_number(node, "omega", path), constants)
        if kind == "asymmetric":
            return pots.asymmetric_trap(_number(node, "omega1", path),
                                        _number(node, "omega2", path), constants)
        if kind == "free":
            return pots.zero_potential()
        if kind == "pairwise":
            kernel_name = _string(node, "kernel", path,
                                  choices={"gaussian", "soft_coulomb"})
            strength = _number(node, "strength", path, 1.0)
            softening = _number(node, "softening", path, 1.0)
            if kernel_name == "gaussian":
                kernel = pots.gaussian_kernel(softening)
            else:
                kernel = pots.soft_coulomb_kernel(softening)
            return pots.pairwise(kernel, strength)
        terms = [build_potential(term, constants, f"{path}.terms[{i}]")
                 for i, term in enumerate(
                     _as_list(node.get("terms"), f"{path}.terms"))]
        if not terms:
            raise ConfigInvalid(f"{path}.terms", "sum needs at least one term")
        return pots.sum_potentials(terms)
    except ConfigInvalid:
        raise
    except Exception as exc:
        raise ConfigInvalid(path, str(exc)) from exc


def build_vector_potential(node, dims, path="vector_potential"):
    if node is None:
        return None
    node = _as_dict(node, path)
    kind = _string(node, "type", path, choices={"none", "uniform", "shear"})
    if kind == "none":
        return None
    try:
        if kind == "uniform":
            amp = node.get("amplitude", 0.0)
            if isinstance(amp, (int, float)):
                amp = [float(amp)] * dims
            amp = [float(v) for v in _as_list(amp, f"{path}.amplitude")]
            if len(amp) != dims:
                raise ConfigInvalid(f"{path}.amplitude",
                                    f"expected {dims} components, got {len(amp)}")
            omega = _number(node, "omega", path, 0.0)
            if omega:
                return pots.cosine_vector_potential(amp, omega, dims)
            return pots.uniform_vector_potential(amp, dims)
        return pots.shear_vector_potential(_number(node, "strength", path),
                                           dims, _number(node, "omega", path, 0.0))
    except ConfigInvalid:
        raise
    except Exception as exc:
        raise ConfigInvalid(path, str(exc)) from exc


def _build_orbital(node, path):
    node = _as_dict(node, path)
    kind = _string(node, "type", path, choices={"ho_n", "gaussian"})
    if kind == "ho_n":
        n = node.get("n", None)
        if n is None:
            raise ConfigInvalid(f"{path}.n", "missing quantum number")
        return sym.ho_orbital(n)
    return sym.gaussian_orbital(node.get("center", 0.0),
                                _number(node, "width", path, 1.0),
                                node.get("momentum", 0.0))


def build_initial_state(node, grid: Grid, seed_override=None,
                        path="initial_state") -> WaveFunction:
    node = _as_dict(node, path)
    kind = _string(node, "type", path,
                   choices={"product", "slater", "symmetrized_product",
                            "gaussian", "random"})
    try:
        if kind == "random":
            seed = seed_override if seed_override is not None \
                else _integer(node, "seed", path, 0)
            return sym.random_state(grid, seed)
        if kind == "gaussian":
            return sym.gaussian_packet(grid, node.get("center", 0.0),
                                       _number(node, "width", path, 1.0),
                                       node.get("momentum", 0.0))
        orbitals = [_build_orbital(o, f"{path}.orbitals[{i}]")
                    for i, o in enumerate(
                        _as_list(node.get("orbitals"), f"{path}.orbitals"))]
        if len(orbitals) != grid.num_particles:
            raise ConfigInvalid(f"{path}.orbitals",
                                f"need {grid.num_particles} orbitals, "
                                f"got {len(orbitals)}")
        builder = {"product": sym.product_state,
                   "slater": sym.slater_state,
                   "symmetrized_product": sym.symmetrized_product_state}[kind]
        return builder(grid, orbitals)
    except ConfigInvalid:
        raise
    except Exception as exc:
        raise ConfigInvalid(path, str(exc)) from exc


def _parse_scheme(cfg) -> Scheme:
    if "scheme" not in cfg:
        raise ConfigInvalid("scheme", "missing required block")
    s = _as_dict(cfg["scheme"], "scheme")
    scheme = Scheme(
        kind=_string(s, "kind", "scheme", choices={SPLIT_OPERATOR, IMPLICIT_FD}),
        dt=_number(s, "dt", "scheme"),
        solver_tol=_number(s, "solver_tol", "scheme", 1e-10),
        max_iters=_integer(s, "max_iters", "scheme", 400))
    try:
        scheme.validate()
    except ValueError as exc:
        raise ConfigInvalid("scheme", str(exc)) from exc
    return scheme


@dataclass
class RunConfig:
    """Validated configuration, ready to build."""

    raw: dict
    experiment: str
    grid_spec: GridSpec
    constants: PhysicalConstants
    scheme: Scheme | None
    t_final: float
    record_every: int
    snapshot_every: int
    pair: tuple[int, int]
    mask_eps: float
    sign_tol: float
    s_drift_tol: float
    collapse_norm_tol: float
    mixed_iterations: int
    mixed_seed: int


def parse_config(cfg: dict) -> RunConfig:
    """Validate a parsed JSON document into a RunConfig."""
    cfg = _as_dict(cfg, "<root>")
    exp_node = _as_dict(cfg.get("experiment", {"type": EXPERIMENT_EVOLVE}),
                        "experiment")
    experiment = _string(exp_node, "type", "experiment",
                         choices={EXPERIMENT_EVOLVE, EXPERIMENT_MIXED_NULL},
                         default=EXPERIMENT_EVOLVE)
    grid_spec = _parse_grid(cfg)
    constants = _parse_constants(cfg)

    diag = _as_dict(cfg.get("diagnostics", {}), "diagnostics")
    record_every = _integer(diag, "record_every", "diagnostics", 1)
    if record_every < 1:
        raise ConfigInvalid("diagnostics.record_every", "must be >= 1")
    pair_raw = diag.get("pair", [0, 1])
    pair_list = _as_list(pair_raw, "diagnostics.pair")
    if len(pair_list) != 2 or not all(isinstance(v, int) for v in pair_list):
        raise ConfigInvalid("diagnostics.pair", "expected two particle indices")
    pair = (pair_list[0], pair_list[1])

    tol = _as_dict(cfg.get("tolerances", {}), "tolerances")
    mask_eps = _number(tol, "mask_eps", "tolerances", 1e-6)
    sign_tol = _number(tol, "sign_tol", "tolerances", 1e-6)
    s_drift_tol = _number(tol, "s_drift", "tolerances", 1e-6)
    collapse_norm = _number(tol, "collapse_norm", "tolerances", 1e-8)

    out = _as_dict(cfg.get("output", {}), "output")
    snapshot_every = _integer(out, "snapshot_every", "output", 0)

    scheme = None
    t_final = 0.0
    mixed_iters = _integer(exp_node, "iterations", "experiment", 200)
    mixed_seed = _integer(exp_node, "seed", "experiment", 0)

    if experiment == EXPERIMENT_EVOLVE:
        scheme = _parse_scheme(cfg)
        if "t_final" not in cfg:
            raise ConfigInvalid("t_final", "missing required number")
        t_final = _number(cfg, "t_final", "<root>")
        if t_final < 0:
            raise ConfigInvalid("t_final", "must be nonnegative")
        if "potential" not in cfg:
            raise ConfigInvalid("potential", "missing required block")
        if "initial_state" not in cfg:
            raise ConfigInvalid("initial_state", "missing required block")
        # Surface-level validation of the tagged unions; heavy builds later.
        build_potential(cfg["potential"], constants)
        build_vector_potential(cfg.get("vector_potential"), grid_spec.dims_per_particle)
        vec_node = cfg.get("vector_potential")
        if vec_node is not None:
            kind = _as_dict(vec_node, "vector_potential").get("type")
            if kind == "shear" and scheme.kind == SPLIT_OPERATOR:
                raise ConfigInvalid(
                    "scheme.kind",
                    "non-uniform vector potential cannot be stepped "
                    "spectrally; use implicit_fd")
    else:
        if grid_spec.num_particles != 3:
            raise ConfigInvalid("grid.num_particles",
                                "mixed_null experiment needs exactly 3 particles")
        if mixed_iters < 0:
            raise ConfigInvalid("experiment.iterations", "must be >= 0")

    return RunConfig(
        raw=cfg, experiment=experiment, grid_spec=grid_spec,
        constants=constants, scheme=scheme, t_final=t_final,
        record_every=record_every, snapshot_every=snapshot_every, pair=pair,
        mask_eps=mask_eps, sign_tol=sign_tol, s_drift_tol=s_drift_tol,
        collapse_norm_tol=collapse_norm, mixed_iterations=mixed_iters,
        mixed_seed=mixed_seed)


@dataclass
class Scenario:
    """Fully built scenario: grid, Hamiltonian, initial state."""

    config: RunConfig
    grid: Grid
    hamiltonian: Hamiltonian | None
    psi0: WaveFunction | None
    seed: int | None


def build_scenario(rc: RunConfig, budget: int | None = None,
                   seed_override: int | None = None) -> Scenario:
    """Materialize the grid, potentials, and initial state."""
    grid = build_grid(rc.grid_spec, budget)
    if rc.experiment == EXPERIMENT_MIXED_NULL:
        seed = seed_override if seed_override is not None else rc.mixed_seed
        psi0 = rc.raw.get("initial_state")
        if psi0 is not None:
            state = build_initial_state(psi0, grid, seed_override)
        else:
            state = sym.random_state(grid, seed)
        return Scenario(rc, grid, None, state, seed)

    scalar = build_potential(rc.raw["potential"], rc.constants)
    vector = build_vector_potential(rc.raw.get("vector_potential"),
                                    rc.grid_spec.dims_per_particle)
    if vector is not None and vector.gauge_certificate != pots.COULOMB_VERIFIED:
        lo = min(a.min for a in rc.grid_spec.axes)
        hi = max(a.max for a in rc.grid_spec.axes)
        report = pots.verify_coulomb_gauge(vector, extent=(lo, hi))
        if not report.passed:
            raise ConfigInvalid(
                "vector_potential",
                f"Coulomb-gauge check failed: max |div A| = "
                f"{report.max_divergence:.3e}")
    ham = Hamiltonian(rc.constants, scalar, vector)
    psi0 = build_initial_state(rc.raw["initial_state"], grid, seed_override)
    return Scenario(rc, grid, ham, psi0, seed_override)
