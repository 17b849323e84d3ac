import sys

import pytest

from tgmixer.command import main, run_command, use_param
from tgmixer.models import (
    ArtifactError,
    CheckpointError,
    ConfigError,
    DatasetError,
    DivergenceError,
    ExitCode,
    ReportedError,
    ShapeError,
)
from tgmixer.runner import Runner
from tgmixer.version import VERSION


class FakeRunner:
    """Commands raising each error class."""

    def run_ok(self, name="world"):
        """[name] Greet."""
        return f"hello {name}\n"

    async def run_async_ok(self):
        """Greet later."""
        return "later\n"

    def run_quiet(self):
        """Print nothing."""
        return ""

    def run_config(self):
        """Bad config."""
        raise ConfigError(["[run] first", "[run] second"])

    def run_dataset(self):
        """Bad dataset."""
        raise DatasetError("missing fields", line=3)

    def run_checkpoint(self):
        """Bad checkpoint."""
        raise CheckpointError("truncated")

    def run_shape(self):
        """Shape mismatch."""
        raise ShapeError("k: checkpoint '4', config '20'")

    def run_artifact(self):
        """Bad output."""
        raise ArtifactError("non-finite loss")

    def run_reported(self):
        """Already logged."""
        raise ReportedError

    def run_diverged(self):
        """Training diverged."""
        raise DivergenceError("loss is nan")

    def run_crash(self):
        """Bug."""
        raise RuntimeError("boom")


@pytest.fixture
def runner():
    return FakeRunner()


@pytest.mark.asyncio
async def test_success_prints_result(runner, capsys):
    assert await run_command(runner, ["ok"]) == ExitCode.SUCCESS
    assert await run_command(runner, ["ok", "there"]) == ExitCode.SUCCESS
    assert capsys.readouterr().out == "hello world\nhello there\n"


@pytest.mark.asyncio
async def test_async_handler_and_dashes(runner, capsys):
    assert await run_command(runner, ["async-ok"]) == ExitCode.SUCCESS
    assert await run_command(runner, ["quiet"]) == ExitCode.SUCCESS
    assert capsys.readouterr().out == "later\n"


@pytest.mark.asyncio
async def test_usage_errors(runner, capsys):
    assert await run_command(runner, []) == ExitCode.USAGE_ERROR
    assert "Available commands:" in capsys.readouterr().err
    assert await run_command(runner, ["nope"]) == ExitCode.USAGE_ERROR
    assert await run_command(runner, ["ok", "a", "b"]) == ExitCode.USAGE_ERROR
    assert await run_command(runner, ["quiet", "x"]) == ExitCode.USAGE_ERROR


@pytest.mark.asyncio
@pytest.mark.parametrize(
    ("command", "code"),
    [
        ("config", ExitCode.CONFIG_ERROR),
        ("dataset", ExitCode.INPUT_ERROR),
        ("checkpoint", ExitCode.INPUT_ERROR),
        ("shape", ExitCode.CONFIG_ERROR),
        ("artifact", ExitCode.ARTIFACT_ERROR),
        ("reported", ExitCode.COMMAND_ERROR),
        ("diverged", ExitCode.COMMAND_ERROR),
    ],
)
async def test_error_mapping(runner, capsys, command, code):
    assert await run_command(runner, [command]) == code
    assert capsys.readouterr().out == ""


@pytest.mark.asyncio
async def test_config_errors_logged_one_per_line(runner, mocker):
    log = mocker.Mock()
    mocker.patch("tgmixer.command.get_logger", return_value=log)
    assert await run_command(runner, ["config"]) == ExitCode.CONFIG_ERROR
    assert [c.args[0] for c in log.error.call_args_list] == ["[run] first", "[run] second"]


@pytest.mark.asyncio
async def test_unhandled_exception(runner, mocker):
    log = mocker.Mock()
    mocker.patch("tgmixer.command.get_logger", return_value=log)
    assert await run_command(runner, ["crash"]) == ExitCode.COMMAND_ERROR
    log.critical.assert_called_once()
    assert log.critical.call_args.kwargs == {"exc_info": True}


def test_use_param(monkeypatch):
    monkeypatch.setattr(sys, "argv", ["tgmixer", "train", "--seed", "3", "--debug", "--out", "x", "--config"])
    assert use_param("--seed") == "3"
    assert use_param("--debug", optional_value=True) is True
    assert use_param("--missing") == ""
    assert use_param("--config") == ""
    assert use_param("--out") == "x"
    assert sys.argv == ["tgmixer", "train"]


def test_use_param_optional_with_value(monkeypatch):
    monkeypatch.setattr(sys, "argv", ["tgmixer", "--debug", "/tmp/log.txt", "version"])
    assert use_param("--debug", optional_value=True) == "/tmp/log.txt"
    assert sys.argv == ["tgmixer", "version"]


def test_main_version(monkeypatch, mocker, capsys):
    """Flags are stripped before the command runs and become overrides."""
    init = mocker.patch("tgmixer.command.init_logger")
    runner_class = mocker.patch("tgmixer.command.Runner", wraps=Runner)
    monkeypatch.setattr(sys, "argv", ["tgmixer", "version", "--seed", "3", "--time-mode", "absolute_raw", "--debug"])
    with pytest.raises(SystemExit) as info:
        main()
    assert info.value.code == 0
    assert capsys.readouterr().out == f"{VERSION}\n"
    init.assert_called_once_with(filename=None, force_debug=True)
    config_path, overrides = runner_class.call_args.args
    assert config_path is None
    assert overrides["seed"] == "3"
    assert overrides["time_mode"] == "absolute_raw"
    assert overrides["epochs"] is None


def test_main_bad_config(monkeypatch, mocker, tmp_path):
    mocker.patch("tgmixer.command.init_logger")
    monkeypatch.setattr(sys, "argv", ["tgmixer", "train", "--config", str(tmp_path / "missing.conf")])
    with pytest.raises(SystemExit) as info:
        main()
    assert info.value.code == ExitCode.CONFIG_ERROR
