"""Command-line package for gausstail."""
import argparse

from core.config import load_config
from .commands import UsageError, build_parser, cmd_coeffs, cmd_expand, cmd_simulate
from .examples import cmd_examples

COMMANDS = {
    "coeffs": cmd_coeffs,
    "expand": cmd_expand,
    "simulate": cmd_simulate,
    "examples": cmd_examples,
}


def run(args: argparse.Namespace) -> int:
    """Load the configuration and dispatch to the selected command."""
    config = load_config(args.config)
    return COMMANDS[args.command](args, config)


__all__ = ["UsageError", "build_parser", "run", "COMMANDS",
           "cmd_coeffs", "cmd_expand", "cmd_simulate", "cmd_examples"]
