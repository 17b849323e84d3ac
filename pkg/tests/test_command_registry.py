"""Tests for command registry and help."""

from tgmixer.command_registry import CommandArg, CommandInfo, get_all_commands, parse_docstring
from tgmixer.help import get_command_help, get_help
from tgmixer.runner import Runner


class TestParseDocstring:
    """Tests for parse_docstring function."""

    def test_required_arg(self):
        """Test parsing a required argument."""
        args, short, full = parse_docstring("<axis> Train every setting")
        assert args == [CommandArg("axis", True)]
        assert short == "Train every setting"
        assert full == "<axis> Train every setting"

    def test_optional_arg(self):
        """Test parsing an optional argument."""
        args, short, _ = parse_docstring("[checkpoint] Evaluate a checkpoint")
        assert args == [CommandArg("checkpoint", False)]
        assert short == "Evaluate a checkpoint"

    def test_mixed_args(self):
        """Test parsing mixed required and optional arguments."""
        args, short, _ = parse_docstring("<path> [out] Convert a file")
        assert [(a.value, a.required) for a in args] == [("path", True), ("out", False)]
        assert short == "Convert a file"

    def test_no_args(self):
        """Test parsing docstring with no arguments."""
        args, short, full = parse_docstring("Show the version")
        assert args == []
        assert short == "Show the version"
        assert full == "Show the version"

    def test_brackets_after_words(self):
        """Brackets later in the line belong to the description."""
        args, short, _ = parse_docstring("Write trajectory.csv (t, r, theta) [optional]")
        assert args == []
        assert short == "Write trajectory.csv (t, r, theta) [optional]"

    def test_empty_docstring(self):
        """Test parsing empty docstring."""
        args, short, full = parse_docstring("")
        assert args == []
        assert short == "No description available."
        assert full == ""

    def test_multiline_docstring(self):
        """Test parsing multiline docstring."""
        doc = """<arg> Short description.

        Detailed explanation here.
        More details."""
        args, short, full = parse_docstring(doc)
        assert len(args) == 1
        assert short == "Short description."
        assert "Detailed explanation" in full

    def test_arg_only_no_description(self):
        """Test docstring with only an argument, no description."""
        args, short, _ = parse_docstring("<name>")
        assert args[0].value == "name"
        assert short == "<name>"


class TestGetAllCommands:
    """Tests for get_all_commands function."""

    def test_extract(self):
        """Only run_ methods, keyed without the prefix."""

        class Fake:
            run_attribute = "not callable"

            def run_test(self):
                """Do a test."""

            def run_other(self, arg):
                """<arg> Other command."""

            def run_nodoc(self):
                pass

            def not_a_command(self):
                """This is not a command."""

        cmds = get_all_commands(Fake())
        assert set(cmds) == {"nodoc", "other", "test"}
        assert cmds["other"] == CommandInfo("other", [CommandArg("arg", True)], "Other command.", "<arg> Other command.")
        assert cmds["nodoc"].short_description == "No description available."

    def test_runner_commands(self):
        """The runner exposes every command without loading a configuration."""
        runner = Runner()
        cmds = get_all_commands(runner)
        assert set(cmds) == {
            "ablate",
            "evaluate",
            "generate",
            "gradcheck",
            "help",
            "ingest",
            "landscape",
            "synth_seq",
            "synth_time",
            "train",
            "trajectory",
            "version",
        }
        assert cmds["ablate"].args == [CommandArg("axis", False)]
        assert "config" not in runner.__dict__


class TestHelp:
    """Tests for the help texts."""

    def test_overview(self):
        """Lists syntax, flags and commands."""
        text = get_help(Runner())
        assert "Syntax: tgmixer <command>" in text
        assert "--time-mode" in text
        assert "Available commands:" in text
        assert " evaluate [checkpoint]" in text

    def test_command(self):
        """Full docstring of one command, dashes accepted."""
        text = get_command_help(Runner(), "synth-time")
        assert text.startswith("synth_time\n\n")
        assert "synth_time_trajectory.csv" in text

    def test_unknown(self):
        """Unknown commands point at the overview."""
        assert get_command_help(Runner(), "nope") == "Unknown command: nope\nRun 'tgmixer help' for available commands.\n"
