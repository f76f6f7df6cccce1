"""Command-line entry point: ``hqkd run | rng-sweep | eve-study``.

Exit status: 0 keys agreed (or command completed), 2 eavesdropping detected
and the session aborted, 1 any error or a session whose keys disagree.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from ..errors import ConfigError, InvalidArgument
from .config import SEED_MAX, SessionConfig, load_config
from .experiments import eve_study, rng_sweep, run_session

EXIT_OK, EXIT_ERROR, EXIT_ABORT = 0, 1, 2


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON session config")
    p.add_argument("--seed", type=_seed, help="master seed (u64)")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")


def _session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--protocol", type=int, choices=(1, 3))
    p.add_argument("--width", type=int, help="bits per measured/random value (W)")
    p.add_argument("--eve", choices=("off", "intercept-resend"), help="quantum-channel attack")
    p.add_argument("--eve-basis", choices=("random", "computational", "hadamard"))
    p.add_argument("--classical", choices=("passive", "tamper"), help="classical-channel Eve")
    p.add_argument("--flip-prob", type=float, help="per-bit flip probability in tamper mode")
    p.add_argument("--semantics", choices=("outcome", "probability"))
    p.add_argument("--bell", choices=("phi-plus", "phi-minus", "psi-plus", "psi-minus"))
    p.add_argument("--basis", choices=("computational", "hadamard"))
    p.add_argument("--rounds", type=int, help="Protocol 1 rounds")
    p.add_argument("--timing", action="store_true", help="record wall-clock duration in reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one protocol session and write its report")
    _common(run)
    _session_flags(run)

    sw = sub.add_parser("rng-sweep", help="random number versus shot count n, as CSV")
    _common(sw)
    sw.add_argument("--n-min", type=int)
    sw.add_argument("--n-max", type=int)
    sw.add_argument("--width", type=int, help="bits in hex_bits column (1..256)")

    st = sub.add_parser("eve-study", help="repeat sessions and tabulate eavesdropping statistics")
    _common(st)
    _session_flags(st)
    st.add_argument("--trials", type=int)
    st.add_argument("--jobs", type=int, help="worker threads (output is independent of this)")
    return parser


def apply_overrides(cfg: SessionConfig, args: argparse.Namespace) -> SessionConfig:
    top = {}
    for attr, key in (
        ("seed", "seed"), ("out", "out"), ("protocol", "protocol"), ("semantics", "semantics"),
        ("bell", "bell_kind"), ("basis", "basis"), ("rounds", "rounds"), ("trials", "trials"),
        ("jobs", "jobs"), ("n_min", "n_min"), ("n_max", "n_max"),
    ):
        v = getattr(args, attr, None)
        if v is not None:
            top[key] = v
    width = getattr(args, "width", None)
    if width is not None:
        top["rng_width" if args.command == "rng-sweep" else "width"] = width
    if getattr(args, "timing", False):
        top["timing"] = True
    if args.seed is not None and cfg.seeds is not None:
        # an explicit master seed wins over per-party seeds from the file
        top["seeds"] = None
    eve = {}
    for attr, key in (("eve", "quantum_mode"), ("eve_basis", "basis_strategy"),
                      ("classical", "classical_mode"), ("flip_prob", "flip_probability")):
        v = getattr(args, attr, None)
        if v is not None:
            eve[key] = v
    if eve:
        top["eve"] = dataclasses.replace(cfg.eve, **eve)
    return dataclasses.replace(cfg, **top)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = apply_overrides(load_config(args.config), args)
        if args.command == "run":
            report = run_session(cfg)
            _emit(report.dumps(), cfg.out)
            if cfg.out:
                print(report.summary())
            if report.aborted:
                return EXIT_ABORT
            return EXIT_OK if report.agreed else EXIT_ERROR
        if args.command == "rng-sweep":
            _emit(rng_sweep(cfg.prep, cfg.n_min, cfg.n_max, cfg.rng_width, cfg.seed), cfg.out)
            return EXIT_OK
        _, summary, text = eve_study(cfg)
        _emit(text, cfg.out)
        if cfg.out:
            print(summary.comment().lstrip("# "))
        return EXIT_OK
    except ConfigError as err:
        print(f"hqkd: config error: {err}", file=sys.stderr)
    except (InvalidArgument, ValueError) as err:
        print(f"hqkd: invalid argument: {err}", file=sys.stderr)
    except OSError as err:
        print(f"hqkd: {err}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
