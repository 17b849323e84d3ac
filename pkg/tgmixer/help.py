"""Help texts built from the runner's command docstrings."""

from __future__ import annotations

from .ansi import ReportStyles, styled
from .command_registry import get_all_commands
from .run_config import FLAG_KEYS

__all__ = ["get_command_help", "get_help"]


def get_help(runner: object) -> str:
    """Usage, flags and the list of commands."""
    commands = get_all_commands(runner)
    lines = [
        styled("Syntax: tgmixer <command> [args] [--config FILE] [--debug [LOGFILE]] [flags]", ReportStyles.HEADER),
        "",
        "Flags override the run file: " + ", ".join(FLAG_KEYS),
        "",
        styled("Available commands:", ReportStyles.HEADER),
    ]
    for name, cmd in commands.items():
        usage = " ".join(f"<{a.value}>" if a.required else f"[{a.value}]" for a in cmd.args)
        lines.append(f" {(name + ' ' + usage).strip():28s} {cmd.short_description}")
    return "\n".join(lines) + "\n"


def get_command_help(runner: object, command: str) -> str:
    """Full docstring of one command."""
    command = command.replace("-", "_")
    commands = get_all_commands(runner)
    if command not in commands:
        return f"Unknown command: {command}\nRun 'tgmixer help' for available commands.\n"
    return f"{styled(command, ReportStyles.HEADER)}\n\n{commands[command].full_description}\n"
