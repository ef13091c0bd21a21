"""
MTLC - Multi-Task Learning Curves
Command-line entry point for running, validating and listing scenario configs
"""

import argparse
import sys
from typing import List, Optional

from config.enums import OutputKind, SYSTEM_CONSTANTS
from config.logging_config import get_logger
from config.settings import settings
from harness.runner import EXIT_INVALID_CONFIG, EXIT_OK, ScenarioRunner

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtlc",
        description=f"{SYSTEM_CONSTANTS['APP_NAME']} v{SYSTEM_CONSTANTS['VERSION']}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run every scenario of a config")
    run.add_argument("config", help="Bundled config name, JSON file or run manifest")
    run.add_argument("--out", default=None,
                     help=f"Output directory (default: MTLC_OUTPUT_DIR or '{settings.output_dir}')")
    run.add_argument("--seed", type=int, default=None, help="Override every scenario seed")
    run.add_argument("--replicas", type=int, default=None, help="Override every replica count")
    run.add_argument("--only", action="append", choices=[kind.value for kind in OutputKind],
                     help="Restrict outputs (repeatable)")

    validate = sub.add_parser("validate", help="Check a config without computing anything")
    validate.add_argument("config", help="Bundled config name, JSON file or run manifest")

    sub.add_parser("list-scenarios", help="List bundled configs and their scenarios")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    runner = ScenarioRunner(settings)

    if args.command == "validate":
        report = runner.validate(args.config)
        if report["valid"]:
            print(f"{args.config}: valid")
            return EXIT_OK
        for violation in report["violations"]:
            print(violation)
        return EXIT_INVALID_CONFIG

    if args.command == "list-scenarios":
        for name, scenarios in runner.list_scenarios().items():
            print(f"{name}: {', '.join(scenarios) if scenarios else '(none)'}")
        return EXIT_OK

    if args.replicas is not None and args.replicas < 2:
        print("--replicas must be at least 2")
        return EXIT_INVALID_CONFIG
    only = [OutputKind(kind) for kind in args.only] if args.only else None
    result = runner.run(args.config, args.out, args.seed, args.replicas, only)
    for violation in result["violations"]:
        print(violation)
    for path in result["files"]:
        print(path)
    return result["status"]


if __name__ == "__main__":
    sys.exit(main())
