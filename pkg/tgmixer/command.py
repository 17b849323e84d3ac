"""tgmixer - GraphMixer temporal link prediction (command line entry point)."""

import asyncio
import inspect
import sys
from typing import Literal, overload

from .help import get_help
from .logging_setup import get_logger, init_logger
from .models import ArtifactError, CheckpointError, ConfigError, DatasetError, ExitCode, ReportedError, ShapeError, TgmError
from .run_config import FLAG_KEYS
from .runner import Runner

__all__: list[str] = ["main", "run_command", "use_param"]


@overload
def use_param(txt: str, optional_value: Literal[False] = ...) -> str: ...


@overload
def use_param(txt: str, optional_value: Literal[True]) -> str | bool: ...


def use_param(txt: str, optional_value: bool = False) -> str | bool:
    """Check if parameter `txt` is in sys.argv.

    If found, removes it from sys.argv & returns the argument value.
    If optional_value is True, the parameter value is optional.

    Args:
        txt: Parameter name to look for
        optional_value: If True, value after parameter is optional

    Returns:
        - "" if parameter not present
        - True if parameter present but no value (only when optional_value=True)
        - The value string if parameter present with value
    """
    if txt not in sys.argv:
        return ""
    i = sys.argv.index(txt)
    if optional_value and (i + 1 >= len(sys.argv) or sys.argv[i + 1].startswith("-")):
        del sys.argv[i]
        return True
    if i + 1 >= len(sys.argv):
        del sys.argv[i]
        return ""
    v = sys.argv[i + 1]
    del sys.argv[i : i + 2]
    return v


async def run_command(runner: Runner, args: list[str]) -> ExitCode:
    """Run one command and map its outcome to an exit code.

    Errors are logged (standard error) here, once.
    """
    log = get_logger("startup")
    if not args:
        sys.stderr.write(get_help(runner))
        return ExitCode.USAGE_ERROR
    name, params = args[0].replace("-", "_"), args[1:]
    handler = getattr(runner, f"run_{name}", None)
    if handler is None:
        log.error("No such command: %s (see 'tgmixer help')", args[0])
        return ExitCode.USAGE_ERROR
    try:
        inspect.signature(handler).bind(*params)
    except TypeError:
        log.error("Wrong arguments for %s: %s", name, " ".join(params) or "(none)")
        return ExitCode.USAGE_ERROR

    try:
        result = handler(*params)
        if inspect.isawaitable(result):
            result = await result
    except ConfigError as e:
        for error in e.errors:
            log.error(error)
        return ExitCode.CONFIG_ERROR
    except (DatasetError, CheckpointError) as e:
        log.error("%s", e)
        return ExitCode.INPUT_ERROR
    except ShapeError as e:
        log.error("%s", e)
        return ExitCode.CONFIG_ERROR
    except ArtifactError as e:
        log.error("%s", e)
        return ExitCode.ARTIFACT_ERROR
    except ReportedError:
        return ExitCode.COMMAND_ERROR
    except TgmError as e:
        log.error("%s failed: %s", name, e)
        return ExitCode.COMMAND_ERROR
    except Exception:  # pylint: disable=W0718
        log.critical("Unhandled exception:", exc_info=True)
        return ExitCode.COMMAND_ERROR
    if result:
        sys.stdout.write(str(result))
    return ExitCode.SUCCESS


def main() -> None:
    """Run the command."""
    debug_flag = use_param("--debug", optional_value=True)
    if debug_flag:
        filename = debug_flag if isinstance(debug_flag, str) else None
        init_logger(filename=filename, force_debug=True)
    else:
        init_logger()

    config_path = use_param("--config") or None
    overrides = {key: use_param(flag) or None for flag, key in FLAG_KEYS.items()}
    runner = Runner(config_path, overrides)
    try:
        code = asyncio.run(run_command(runner, sys.argv[1:]))
    except KeyboardInterrupt:
        code = ExitCode.COMMAND_ERROR
    sys.exit(int(code))


if __name__ == "__main__":
    main()
