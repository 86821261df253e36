"""Command-line interface.

Subcommands:
    steady-state   print the steady-state density matrix for a config
    coherences     print closed-form coherences and their oracle deltas
    propagate      single-point propagation outputs
    sweep          detuning sweep to CSV (optionally with a PNG figure)
    figure         run a built-in preset sweep (CSV + PNG)
    validate       cross-module consistency report

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, DeltamixError
from .lindblad import (
    build_hamiltonian,
    build_liouvillian,
    effective_linewidths,
    extract_weak_field_orders,
    steady_state,
)
from .mixing import coherence_set
from .propagation import closed_form_outputs, interference_decomposition
from .sweep import (
    PRESET_NAMES,
    SimulationConfig,
    figure_preset,
    load_config,
    run_sweep,
    emit_csv,
    validate,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _add_config_arg(parser, required=True):
    parser.add_argument("--config", required=required, help="path to a config file")


def _add_sweep_overrides(parser):
    parser.add_argument("--points", type=int, help="detuning grid points")
    parser.add_argument(
        "--delta-range", nargs=2, type=float, metavar=("MIN", "MAX"),
        help="detuning sweep bounds",
    )
    parser.add_argument(
        "--phi", help="comma-separated relative-phase offsets (radians)"
    )


def _apply_overrides(config: SimulationConfig, args) -> SimulationConfig:
    sweep = config.sweep
    if getattr(args, "points", None) is not None:
        sweep = replace(sweep, points=args.points)
    if getattr(args, "delta_range", None) is not None:
        sweep = replace(sweep, delta_d_min=args.delta_range[0],
                        delta_d_max=args.delta_range[1])
    if getattr(args, "phi", None) is not None:
        phis = tuple(float(p) for p in args.phi.split(",") if p.strip())
        if not phis:
            raise ConfigError("--phi needs at least one value")
        sweep = replace(sweep, phi_values=phis)
    return replace(config, sweep=sweep)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deltamix",
        description="Driven three-level Delta-system wave-mixing simulator "
        "(all quantities in units of gamma12)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady-state", help="steady state at one detuning")
    _add_config_arg(p)
    p.add_argument("--delta", type=float, default=0.0, help="detuning Delta_d")

    p = sub.add_parser("coherences", help="closed-form coherences vs Lindblad oracle")
    _add_config_arg(p)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=1e-3, help="oracle drive scale")

    p = sub.add_parser("propagate", help="single-point propagation outputs")
    _add_config_arg(p)
    p.add_argument("--delta", type=float, default=0.0)

    p = sub.add_parser("sweep", help="detuning sweep to CSV")
    _add_config_arg(p)
    p.add_argument("--out", required=True, help="CSV output path")
    _add_sweep_overrides(p)
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG next to the CSV")

    p = sub.add_parser("figure", help="reproduce a figure preset")
    p.add_argument("--preset", required=True, choices=PRESET_NAMES)
    p.add_argument("--out", required=True, help="CSV output path")
    _add_sweep_overrides(p)
    p.add_argument("--no-plot", action="store_true",
                   help="skip the PNG next to the CSV")

    p = sub.add_parser("validate", help="cross-module consistency checks")
    _add_config_arg(p, required=False)
    p.add_argument("--full", action="store_true", help="full-depth checks")
    p.add_argument("--seed", type=int, default=12345,
                   help="seed for the randomized invariant suites")
    return parser


def _print_matrix(m: np.ndarray) -> None:
    for row in m:
        print("  " + "  ".join(f"{v.real:+.6e}{v.imag:+.6e}j" for v in row))


def _cmd_steady_state(args) -> int:
    config = load_config(args.config)
    drive = config.drive_configuration(args.delta)
    L = build_liouvillian(build_hamiltonian(drive), config.rates)
    rho = steady_state(L)
    print(f"steady state at delta_d = {args.delta} (basis |1>, |2>, |3>):")
    _print_matrix(rho.matrix)
    print(f"populations: {rho.population(1):.6f}, {rho.population(2):.6f}, "
          f"{rho.population(3):.6f}")
    return EXIT_OK


def _cmd_coherences(args) -> int:
    config = load_config(args.config)
    drive = config.drive_configuration(args.delta)
    lw = effective_linewidths(config.rates)
    closed = coherence_set(drive, lw)
    oracle = extract_weak_field_orders(drive, config.rates, [args.eps])
    print(f"order-resolved coherences at delta_d = {args.delta} "
          f"(oracle drive scale eps = {args.eps:g}):")
    for name in ("rho21_1", "rho31_1", "rho21_2", "rho31_2"):
        a = getattr(closed, name)
        b = getattr(oracle, name)
        print(f"  {name}: closed {a:+.8f}  oracle {b:+.8f}  |delta| {abs(a - b):.3e}")
    return EXIT_OK


def _cmd_propagate(args) -> int:
    config = load_config(args.config)
    drive = config.drive_configuration(args.delta)
    lw = effective_linewidths(config.rates)
    rec = interference_decomposition(drive, lw, config.z)
    cf_s, cf_d = closed_form_outputs(drive, lw, config.z)
    print(f"propagation to Z = {config.z} at delta_d = {args.delta}:")
    for label, ch, cf in (("s", rec.channel_s, cf_s), ("d", rec.channel_d, cf_d)):
        print(f"  channel {label}: total ratio {cf:+.8f}  "
              f"I_tot {ch.intensity_total:.6f}  I_inc {ch.intensity_incident:.6f}  "
              f"I_gen {ch.intensity_generated:.6f}  "
              f"interference {ch.interference_term:+.6f}")
    return EXIT_OK


def _write_outputs(config, rows, out, plot: bool, title: str = "",
                   inset: bool = False) -> None:
    emit_csv(rows, out)
    print(f"wrote {len(rows)} rows to {out}")
    if plot:
        png = Path(out).with_suffix(".png")
        from .plotting import render_sweep_figure

        render_sweep_figure(
            rows, png, channel=config.sweep.channel, title=title,
            show_generated_inset=inset,
        )
        print(f"wrote figure to {png}")


def _cmd_sweep(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    rows = run_sweep(config)
    _write_outputs(config, rows, args.out, plot=args.plot)
    return EXIT_OK


def _cmd_figure(args) -> int:
    config = _apply_overrides(figure_preset(args.preset), args)
    rows = run_sweep(config)
    _write_outputs(
        config, rows, args.out, plot=not args.no_plot, title=args.preset,
        inset=args.preset.startswith("fig3"),
    )
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = load_config(args.config) if args.config else figure_preset("fig2a")
    level = "full" if args.full else "quick"
    report = validate(config, level=level, seed=args.seed)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "steady-state": _cmd_steady_state,
        "coherences": _cmd_coherences,
        "propagate": _cmd_propagate,
        "sweep": _cmd_sweep,
        "figure": _cmd_figure,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DeltamixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
