"""Command-line frontend.

Subcommands:
  point     single capacity evaluation from a scenario JSON file
  sweep     arbitrary parameter sweep from a sweep-spec JSON file
  fig4      azimuth-spread sweep (elevation-spread series)
  fig5      SNR sweep (scenario x aperture series)
  fig6      antenna-spacing sweep (scenario series)
  spectrum  dump per-cell wavenumber variances to CSV

Progress goes to stderr; data goes to files or stdout. Exit codes:
0 success, 2 configuration error, 3 numeric error, 4 I/O error.
HOLOMIMO_THREADS caps the Monte Carlo worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import (ConfigurationError, NumericError,
                     EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK)
from .geometry import enumerate_lattice
from .spectrum import compute_spectrum
from .scenarios import parse_scenario
from .sweep import (emit_csv, emit_svg, fig4_spec, fig5_spec, fig6_spec,
                    parse_sweep_spec, run_point, run_sweep)


def _threads() -> int:
    raw = os.environ.get("HOLOMIMO_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        print(f"[holomimo] ignoring invalid HOLOMIMO_THREADS={raw!r}",
              file=sys.stderr)
        return 1


def _read_config(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text)


class _IOFailure(Exception):
    pass


def _cmd_point(args) -> int:
    config = _read_config(args.config)
    result = run_point(config, snr_db=args.snr_db, trials=args.trials,
                       master_seed=args.seed, threads=_threads())
    for key in ("capacity_bits", "std_error", "trials", "n_r", "n_s",
                "upper_bound_bits", "low_snr_bits"):
        value = result[key]
        print(f"{key}={value!r}" if isinstance(value, float)
              else f"{key}={value}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        text = Path(args.spec).read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot read {args.spec}: {exc}") from exc
    spec = parse_sweep_spec(text)
    result = run_sweep(spec, threads=_threads())
    _write_outputs(result, args.out_csv, args.out_svg, title="sweep")
    return EXIT_OK


def _cmd_fig(args, builder, name: str) -> int:
    spec = builder(trials=args.trials, master_seed=args.seed, scale=args.scale)
    result = run_sweep(spec, threads=_threads())
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise _IOFailure(f"cannot create {out_dir}: {exc}") from exc
    _write_outputs(result, out_dir / f"{name}.csv", out_dir / f"{name}.svg",
                   title=name)
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    config = _read_config(args.config)
    lines = ["side,idx_x,idx_y,variance"]
    for side, array, dist in (("tx", config.tx_array, config.preset.tx_distribution()),
                              ("rx", config.rx_array, config.preset.rx_distribution())):
        lattice = enumerate_lattice(array)
        spec = compute_spectrum(dist, lattice)
        print(f"[spectrum] {side}: {lattice.cardinality} cells, "
              f"pre-normalization total {spec.pre_normalization_total:.6f}",
              file=sys.stderr)
        for cell, var in zip(lattice.cells, spec.variances):
            lines.append(f"{side},{cell.idx_x},{cell.idx_y},{float(var)!r}")
    try:
        Path(args.out_csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot write {args.out_csv}: {exc}") from exc
    return EXIT_OK


def _write_outputs(result, out_csv, out_svg, title: str) -> None:
    try:
        emit_csv(result, out_csv)
        print(f"[holomimo] wrote {out_csv}", file=sys.stderr)
        if out_svg:
            emit_svg(result, out_svg, title=title)
            print(f"[holomimo] wrote {out_svg}", file=sys.stderr)
    except OSError as exc:
        raise _IOFailure(f"cannot write output: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holomimo",
        description="Wavenumber-domain holographic MIMO capacity simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="single capacity evaluation")
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--snr-db", type=float, default=30.0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep", help="parameter sweep from a spec file")
    p.add_argument("--spec", required=True, help="sweep spec JSON file")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg", default=None)

    for name, helptext in (("fig4", "azimuth-spread sweep"),
                           ("fig5", "SNR sweep"),
                           ("fig6", "antenna-spacing sweep")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--trials", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--scale", type=float, default=1.0,
                       help="aperture scale factor (e.g. 0.25 for fast runs)")

    p = sub.add_parser("spectrum", help="dump per-cell variances")
    p.add_argument("--config", required=True)
    p.add_argument("--out-csv", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "point":
            return _cmd_point(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "fig4":
            return _cmd_fig(args, fig4_spec, "fig4")
        if args.command == "fig5":
            return _cmd_fig(args, fig5_spec, "fig5")
        if args.command == "fig6":
            return _cmd_fig(args, fig6_spec, "fig6")
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        parser.error(f"unknown command {args.command}")
    except ConfigurationError as exc:
        print(f"[holomimo] configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"[holomimo] numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _IOFailure as exc:
        print(f"[holomimo] I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
