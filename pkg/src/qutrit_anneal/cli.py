"""Command-line interface.

Exit codes: 0 run completed and the decoded partition matches the oracle,
1 run completed but mismatched, 2 input or validation error, 3 instance
exceeds a size guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .emit import FORMATS, emit, render_table
from .errors import SizeGuardError, SpecError
from .harness import generate_instance, load_spec, run, with_overrides
from .presets import PRESET_NAMES, get_preset

EXIT_MATCH = 0
EXIT_MISMATCH = 1
EXIT_INPUT_ERROR = 2
EXIT_SIZE_GUARD = 3


def _parse_bool(value: str) -> bool:
    low = value.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {value!r}")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--emit",
        default=None,
        metavar="FMT[,FMT...]",
        help=f"comma-separated artifact formats to write ({', '.join(FORMATS)}); "
        "overrides the spec's 'emit' list (default: table)",
    )
    parser.add_argument(
        "--out",
        default=None,
        metavar="DIR",
        help="directory for emitted files; overrides the spec's 'out' (default: .)",
    )
    parser.add_argument(
        "--pinned",
        type=_parse_bool,
        default=None,
        metavar="BOOL",
        help="override whether point 0 is held fixed (one-hot methods only)",
    )
    parser.add_argument(
        "--mode",
        choices=("exact", "split"),
        default=None,
        help="per-step evolution algorithm (default: the spec's, normally exact)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qutrit-anneal",
        description="Adiabatic annealing on qutrit registers for 2-D clustering, "
        "certified against a brute-force oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a JSON problem spec")
    run_p.add_argument("spec_path", help="path to a spec file (see README for schema)")
    _add_run_options(run_p)

    preset_p = sub.add_parser("preset", help="run a bundled demo instance")
    preset_p.add_argument("name", choices=PRESET_NAMES)
    _add_run_options(preset_p)

    gen_p = sub.add_parser(
        "generate", help="generate a random instance (integer coordinates in [-10, 10])"
    )
    gen_p.add_argument("--n", type=int, required=True, help="number of points")
    gen_p.add_argument("--seed", type=int, required=True, help="generator seed")
    gen_p.add_argument(
        "--out",
        default=None,
        metavar="DIR",
        help="also write the spec skeleton to DIR (default: stdout only)",
    )
    return parser


def _execute(spec, emit_arg: str | None, out_arg: str | None) -> int:
    if emit_arg is None:
        formats = list(spec.emit)
    else:
        formats = [f.strip() for f in emit_arg.split(",") if f.strip()]
    for fmt in formats:
        if fmt not in FORMATS:
            raise SpecError(f"unknown emit format {fmt!r}, expected one of {FORMATS}")
    out_dir = spec.out_dir if out_arg is None else out_arg
    result = run(spec)
    sys.stdout.write(render_table(result))
    written = emit(result, formats, out_dir)
    for path in written:
        print(f"wrote {path}")
    return EXIT_MATCH if result.match else EXIT_MISMATCH


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            points = generate_instance(args.n, args.seed)
            skeleton = {
                "name": f"random-n{args.n}-seed{args.seed}",
                "points": [[int(x), int(y)] for x, y in points.points],
                "method": "one-hot-K3-pinned",
                "seed": args.seed,
            }
            text = json.dumps(skeleton, indent=2) + "\n"
            sys.stdout.write(text)
            if args.out is not None:
                out_dir = Path(args.out)
                out_dir.mkdir(parents=True, exist_ok=True)
                path = out_dir / (skeleton["name"] + ".json")
                path.write_text(text)
                print(f"wrote {path}", file=sys.stderr)
            return EXIT_MATCH
        if args.command == "preset":
            spec = get_preset(args.name)
        else:
            spec = load_spec(args.spec_path)
        spec = with_overrides(spec, pinned=args.pinned, mode=_mode_name(args.mode))
        return _execute(spec, args.emit, args.out)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def _mode_name(cli_mode: str | None) -> str | None:
    if cli_mode is None:
        return None
    return "exact-step" if cli_mode == "exact" else "split-step"


if __name__ == "__main__":
    sys.exit(main())
