# commands/__main__.py
# python -m commands <verb> --ring <spec> [--n 3] [...]

from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional, Type

from pydantic import ValidationError

from commands.base import BaseCommand, config_error_exit
from commands.homotopy import HomotopyCommand
from commands.pi0 import Pi0Command
from commands.pi1 import Pi1Command
from commands.validate_action import ValidateActionCommand
from commands.verify import VerifyCommand
from common.config import ACTIONS, RunConfig

VERBS: Dict[str, Type[BaseCommand]] = {
    "pi0": Pi0Command,
    "pi1": Pi1Command,
    "verify": VerifyCommand,
    "homotopy": HomotopyCommand,
    "validate-action": ValidateActionCommand,
}

_HELP = {
    "pi0": "path components of Um_n(R)",
    "pi1": "fundamental group EP_n/(EP_n)_2, optionally cross-checked by homotopy search",
    "verify": "exactness of the K-theory stability sequence",
    "homotopy": "decide stable homotopy between two path files",
    "validate-action": "check the global action axioms",
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="globact", description="Global actions over finite commutative rings")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for verb in VERBS:
        p = sub.add_parser(verb, help=_HELP[verb])
        p.add_argument("--ring", required=True, help="Zmod:<m> | GF:<p> | GFpoly:<p>:<c0,...,1>")
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--cap-closure", type=int, default=None)
        p.add_argument("--cap-steps", type=int, default=None)
        p.add_argument("--cap-window", type=int, default=None)
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
        p.add_argument("--log-level", default=None)
        p.add_argument("--timing", action="store_true", help="include wall_time in the report")
        if verb in ("pi1", "verify"):
            p.add_argument("--cross-check", action="store_true")
        if verb == "homotopy":
            p.add_argument("--path-a", default=None)
            p.add_argument("--path-b", default=None)
        if verb == "validate-action":
            p.add_argument("--action", choices=list(ACTIONS), default="um")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if v is not None}
    return RunConfig(**fields)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = make_config(args)
    except ValidationError as exc:
        return config_error_exit(exc, args.command, args.format)
    return VERBS[config.command]().execute(config)


if __name__ == "__main__":
    sys.exit(main())
