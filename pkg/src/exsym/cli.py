"""Command-line experiment runner.

Subcommands:

* ``run --config <path> --out <dir> [--deterministic] [--seed <int>]``
* ``verify --config <path>`` -- static validation plus potential-symmetry and
  gauge sampling, no evolution
* ``gallery list`` / ``gallery run <name> --out <dir>``

Exit codes: 0 success, 1 validation failure, 2 runtime failure, 3 failed
acceptance check inside a gallery run. The memory budget can be overridden
through the ``EXSYM_MEMORY_BUDGET`` environment variable (bytes).
"""

from __future__ import annotations

import argparse
import sys

from . import gallery
from .config import (
    EXPERIMENT_EVOLVE,
    build_potential,
    build_vector_potential,
    load_config,
    parse_config,
)
from .errors import ConfigInvalid, ExsymError, UnknownScenario
from .grid import build_grid
from .potentials import ASYMMETRIC, verify_coulomb_gauge, verify_exchange_symmetry
from .runner import execute_run

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_CLAIMS = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exsym",
        description="Identical-particle Schrodinger dynamics with "
                    "exchange-symmetry diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a config file")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--out", required=True)
    run_p.add_argument("--deterministic", action="store_true",
                       help="record deterministic-reduction mode in the summary")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the random-state seed")

    ver_p = sub.add_parser("verify", help="validate a config without evolving")
    ver_p.add_argument("--config", required=True)

    gal_p = sub.add_parser("gallery", help="bundled claim-check scenarios")
    gal_sub = gal_p.add_subparsers(dest="gallery_command", required=True)
    gal_sub.add_parser("list", help="list bundled scenarios")
    gal_run = gal_sub.add_parser("run", help="run one bundled scenario")
    gal_run.add_argument("name")
    gal_run.add_argument("--out", required=True)
    gal_run.add_argument("--deterministic", action="store_true")
    gal_run.add_argument("--seed", type=int, default=None)
    return parser


def _cmd_run(args) -> int:
    result = execute_run(args.config, args.out,
                         deterministic=args.deterministic, seed=args.seed)
    summary = result.summary
    if result.trajectory is not None:
        print(f"run complete: {summary['records']} records to "
              f"t = {summary['t_final']:g}")
        print(f"  max |S - S0|        : {summary['max_s_drift']:.3e}")
        print(f"  max |norm - 1|      : {summary['max_norm_drift']:.3e}")
        print(f"  continuity residual : {summary['max_continuity_residual']:.3e}")
        pers = summary["sign_persistence"]
        state = "persistent" if pers["passed"] else \
            f"violated at t = {pers['first_violation_time']}"
        print(f"  exchange sign       : {pers['initial_sign']:+d} ({state})")
    else:
        col = summary["collapse"]
        print(f"mixed-symmetry collapse: norm {col['final_norm']:.3e} after "
              f"{col['iterations']} rounds -> {col['verdict']}")
    print(f"outputs in {result.out_dir}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    rc = parse_config(load_config(args.config))
    print(f"config OK: experiment = {rc.experiment}, grid = "
          f"{rc.grid_spec.total_points} points")
    if rc.experiment != EXPERIMENT_EVOLVE:
        return EXIT_OK
    grid = build_grid(rc.grid_spec)
    scalar = build_potential(rc.raw["potential"], rc.constants)
    report = verify_exchange_symmetry(scalar, grid)
    cert = scalar.certificate
    line = (f"scalar potential {scalar.label}: certificate {cert}, "
            f"max violation {report.max_violation:.3e}")
    if cert == ASYMMETRIC:
        line += "  [flagged as negative control]"
    print(line)
    vector = build_vector_potential(rc.raw.get("vector_potential"),
                                    rc.grid_spec.dims_per_particle)
    if vector is not None:
        lo = min(a.min for a in rc.grid_spec.axes)
        hi = max(a.max for a in rc.grid_spec.axes)
        gauge = verify_coulomb_gauge(vector, extent=(lo, hi))
        print(f"vector potential {vector.label}: gauge "
              f"{vector.gauge_certificate}, max |div A| = "
              f"{gauge.max_divergence:.3e}")
        if not gauge.passed:
            print("gauge verification FAILED")
            return EXIT_CONFIG
    print("verification passed")
    return EXIT_OK


def _cmd_gallery(args) -> int:
    if args.gallery_command == "list":
        for name, claim in gallery.list_scenarios():
            print(f"{name:20s} {claim}")
        return EXIT_OK
    result, claims = gallery.run_scenario(args.name, args.out,
                                          deterministic=args.deterministic,
                                          seed=args.seed)
    print(f"scenario {args.name}: {gallery.SCENARIOS[args.name].claim}")
    for c in claims:
        print(f"  CLAIM {c.name:24s} {'PASS' if c.passed else 'FAIL'}  "
              f"{c.details}")
    print(f"outputs in {result.out_dir}")
    return EXIT_OK if all(c.passed for c in claims) else EXIT_CLAIMS


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_gallery(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnknownScenario as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExsymError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
