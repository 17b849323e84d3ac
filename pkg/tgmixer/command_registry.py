"""Command discovery: ``run_*`` methods and the arguments named in their docstrings.

The first docstring line reads ``<required> [optional] Short description``.
"""

from __future__ import annotations

import inspect
import re
from dataclasses import dataclass

__all__ = ["CommandArg", "CommandInfo", "get_all_commands", "parse_docstring"]

_ARG = re.compile(r"\s*([<\[])([^>\]]+)[>\]]")


@dataclass
class CommandArg:
    """An argument named in a command's docstring."""

    value: str
    required: bool


@dataclass
class CommandInfo:
    """A command with its parsed documentation."""

    name: str
    args: list[CommandArg]
    short_description: str
    full_description: str


def parse_docstring(docstring: str) -> tuple[list[CommandArg], str, str]:
    """Split a command docstring into (args, short description, full text).

    Arguments are only read from the start of the first line; a bracket after
    ordinary words is part of the description.
    """
    full = (docstring or "").strip()
    if not full:
        return [], "No description available.", ""
    first = full.splitlines()[0].strip()
    args: list[CommandArg] = []
    pos = 0
    while match := _ARG.match(first, pos):
        args.append(CommandArg(match.group(2), match.group(1) == "<"))
        pos = match.end()
    short = first[pos:].strip() or first
    return args, short, full


def get_all_commands(obj: object) -> dict[str, CommandInfo]:
    """Every ``run_<name>`` method of `obj`, keyed by name."""
    commands = {}
    for attr in sorted(dir(obj)):
        if not attr.startswith("run_"):
            continue
        method = getattr(obj, attr)
        if not callable(method):
            continue
        args, short, full = parse_docstring(inspect.getdoc(method) or "")
        commands[attr[4:]] = CommandInfo(attr[4:], args, short, full)
    return commands
