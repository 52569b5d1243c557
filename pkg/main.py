# main.py
import argparse
import logging
import os
import sys

from dotenv import load_dotenv

from utils.exceptions import BudgetExceededError, SasakiError, UsageError

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so bad flags map to the usage exit code."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(description="3-Sasakian homogeneous spaces and their invariant connections")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print a machine-readable report")
    common.add_argument("--verbose", action="store_true", help="DEBUG logging on stderr")
    common.add_argument("--config", help="Path to a config.yaml")
    common.add_argument("--timing", action="store_true", help="Include wall-clock time in the report")
    common.add_argument("--allow-n0", action="store_true", help="Accept sp:0 (the 3-sphere)")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    build = sub.add_parser("build", parents=[common], help="Build a pair and verify its structure")
    build.add_argument("space", help="sp:<n>, so:<k>, su:<m>, g2, f4, e6, e7 or e8")

    dims = sub.add_parser("dims", parents=[common], help="Dimensions of the invariant tensor spaces")
    dims.add_argument("space")
    dims.add_argument("which", nargs="?", default="all", choices=["bilinear", "lambda2", "lambda3", "all"])
    dims.add_argument("--force", action="store_true", help="Ignore the unknown-count budget")
    dims.add_argument("--emit-basis", metavar="PATH", help="Write basis tensors to PATH.npz")
    dims.add_argument("--seed", type=int, help="Seed of the random generator combinations")

    classify = sub.add_parser("classify", parents=[common], help="Classify nabla^g + T(a, B, c)/2")
    classify.add_argument("space")
    classify.add_argument("--a", type=float, default=0.0)
    classify.add_argument("--B", help="Nine comma-separated entries, row-major")
    classify.add_argument("--c", help="Three comma-separated entries (su only)")
    classify.add_argument("--tol", type=float, help="Override the check tolerance")

    sweep = sub.add_parser("sweep", parents=[common], help="Closed forms against brute force on random specs")
    sweep.add_argument("space")
    sweep.add_argument("--count", type=int)
    sweep.add_argument("--seed", type=int)
    return parser


def _configure_logging(verbose: bool):
    from utils.config_loader import settings

    level = "DEBUG" if verbose else settings()["logging"]["level"]
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def run(argv=None) -> int:
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.config:
        os.environ["SASAKI_CONFIG"] = args.config
    _configure_logging(args.verbose)

    from cli.commands import cmd_build, cmd_classify, cmd_dims, cmd_sweep, format_report
    from memory.session_memory import clear_session, show_session_summary

    # the ledger covers one command
    clear_session()

    try:
        if args.command == "build":
            report = cmd_build(args.space, allow_n0=args.allow_n0, timing=args.timing)
        elif args.command == "dims":
            report = cmd_dims(args.space, args.which, force=args.force, emit_basis=args.emit_basis,
                              seed=args.seed, allow_n0=args.allow_n0, timing=args.timing)
        elif args.command == "classify":
            report = cmd_classify(args.space, a=args.a, B=args.B, c=args.c, tol=args.tol,
                                  allow_n0=args.allow_n0, timing=args.timing)
        else:
            report = cmd_sweep(args.space, count=args.count, seed=args.seed, allow_n0=args.allow_n0,
                               show_progress=not args.json, timing=args.timing)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as e:
        print(f"⛔ {e}", file=sys.stderr)
        return EXIT_BUDGET
    except SasakiError as e:
        logging.getLogger(__name__).error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED

    print(report.to_json() if args.json else format_report(report))
    if args.verbose and not args.json:
        show_session_summary()
    return report.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
