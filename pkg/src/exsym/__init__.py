"""Configuration-space Schrodinger dynamics for identical particles.

Library layout:

* :mod:`exsym.grid` -- grids, wavefunctions, inner products, the exchange
  permutation, checkpoint I/O;
* :mod:`exsym.potentials` -- scalar/vector potentials with symmetry and gauge
  certificates;
* :mod:`exsym.propagator` -- split-operator and implicit-midpoint steppers;
* :mod:`exsym.diagnostics` -- exchange overlap S(t), phase fields, sector
  weights, continuity residuals, sign persistence;
* :mod:`exsym.symmetry` -- (anti)symmetrized states and the mixed-symmetry
  collapse check;
* :mod:`exsym.oracle` -- dense-matrix reference propagation;
* :mod:`exsym.cli` -- config-driven experiment runner with CSV + figure
  reports.
"""

from .grid import (
    AxisSpec,
    DIRICHLET,
    ExchangeMap,
    Grid,
    GridSpec,
    PERIODIC,
    PhysicalConstants,
    WaveFunction,
    build_grid,
    exchange,
    inner_product,
    load_checkpoint,
    norm,
    save_checkpoint,
)
from .potentials import (
    ScalarPotential,
    VectorPotential,
    asymmetric_trap,
    cosine_vector_potential,
    gaussian_kernel,
    harmonic_trap,
    pairwise,
    shear_vector_potential,
    soft_coulomb_kernel,
    sum_potentials,
    uniform_vector_potential,
    verify_coulomb_gauge,
    verify_exchange_symmetry,
    zero_potential,
)
from .propagator import (
    Hamiltonian,
    IMPLICIT_FD,
    SPLIT_OPERATOR,
    Scheme,
    Trajectory,
    evolve,
    step_implicit_fd,
    step_split_operator,
)
from .diagnostics import (
    DiagnosticsRecord,
    PhaseField,
    compute_record,
    continuity_residual,
    exchange_sign,
    overlap_s,
    phase_field,
    phase_gradient_integral,
    sector_weights,
    sign_persistence,
)
from .symmetry import (
    antisymmetrize,
    gaussian_orbital,
    gaussian_packet,
    ho_orbital,
    mixed_symmetry_null_check,
    product_state,
    random_state,
    slater_state,
    symmetrize,
    symmetrized_product_state,
    transposition_project,
)
from .oracle import (
    DenseHamiltonian,
    EigenPropagator,
    alternating_projection_decay_rate,
    dense_hamiltonian,
    exact_evolve,
    exact_evolve_sampled,
)

__version__ = "0.1.0"
