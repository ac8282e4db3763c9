"""Command-line driver: ``parity-proxy {sweep,sensitivity,validate,montecarlo}``.

Exit status: 0 success, 2 configuration error, 3 failed validation check,
4 Fock cutoff too small for the requested state.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Optional

from parity_proxy import __version__
from parity_proxy.config import (
    COMMANDS,
    OUTPUT_FORMATS,
    ExperimentConfig,
    load_config,
    merge_overrides,
    validate_config,
)
from parity_proxy.errors import ConfigError, CutoffTooSmallError
from parity_proxy.experiment import ExperimentRunner
from parity_proxy.experiment.utils import ResultTable, to_csv, to_json
from parity_proxy.homodyne import PRESCRIPTIONS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_CUTOFF = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parity-proxy",
        description=(
            "Parity detection by homodyne proxy for a squeezed-vacuum Mach-Zehnder "
            "interferometer. Angles are in radians; the gain r is dimensionless."
        ),
    )
    parser.add_argument(
        "command",
        nargs="?",
        choices=COMMANDS,
        help="what to run (default: the config file's command, else sweep)",
    )
    parser.add_argument("--config", type=Path, help="JSON config file; flags override it")
    parser.add_argument("--r", type=float, help="squeezing gain r >= 0")
    parser.add_argument("--phi-start", type=float, help="first probe phase [rad]")
    parser.add_argument("--phi-stop", type=float, help="end of the half-open phase grid [rad]")
    parser.add_argument("--steps", type=int, help="number of grid points")
    parser.add_argument("--beta", type=float, help="local oscillator amplitude |beta|")
    parser.add_argument("--prescription", choices=PRESCRIPTIONS, help="recovery scheme")
    parser.add_argument("--shots", type=int, help="shots per setting (montecarlo)")
    parser.add_argument("--seed", type=int, help="master random seed (montecarlo)")
    parser.add_argument("--cutoff", type=int, help="Fock cutoff per mode, 8..120")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="output format")
    parser.add_argument("--workers", type=int, default=None, help="thread pool size")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg = merge_overrides(
        cfg,
        {
            "command": args.command,
            "r": args.r,
            "phi_start": args.phi_start,
            "phi_stop": args.phi_stop,
            "steps": args.steps,
            "beta_mag": args.beta,
            "prescription": args.prescription,
            "shots": args.shots,
            "seed": args.seed,
            "cutoff": args.cutoff,
            "output": args.out,
            "output_format": args.format,
        },
    )
    return validate_config(cfg)


def write_table(table: ResultTable, cfg: ExperimentConfig) -> None:
    payload = (
        to_json(table, cfg) + b"\n"
        if cfg.output_format == "json"
        else to_csv(table, cfg).encode()
    )
    if cfg.output is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
        return
    Path(cfg.output).write_bytes(payload)
    logger.info("wrote %s", cfg.output)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG

    try:
        table = ExperimentRunner(cfg, args.workers).run()
    except CutoffTooSmallError as exc:
        logger.error("%s", exc)
        return EXIT_CUTOFF

    write_table(table, cfg)
    failed = table.failed
    if failed:
        logger.error("validation failed: %s", ", ".join(failed))
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
