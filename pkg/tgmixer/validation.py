"""Run configuration checks against a declared schema."""

import difflib
import logging
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from typing import Any

from .config import BOOL_STRINGS

__all__ = [
    "ConfigField",
    "ConfigItems",
    "ConfigValidator",
    "format_config_error",
]


@dataclass
class ConfigField:
    """One run configuration key.

    Attributes:
        name: The configuration key name
        field_type: Expected type (str, int, float, bool or list)
        default: Value used when no layer sets the key
        description: Shown by ``tgmixer help``
        choices: Allowed values for enum-like keys
        min_value: Inclusive lower bound for numeric keys
        exclusive_min: If True, `min_value` itself is rejected
        validator: Extra check returning error messages
    """

    name: str
    field_type: type = str
    default: Any = None
    description: str = ""
    choices: list | None = None
    min_value: float | None = None
    exclusive_min: bool = False
    validator: Callable[[Any], list[str]] | None = None

    @property
    def type_name(self) -> str:
        """Name of the expected type."""
        return self.field_type.__name__

    @property
    def bound(self) -> str:
        """Lower bound as text, e.g. '>= 1'."""
        return f"{'>' if self.exclusive_min else '>='} {self.min_value:g}"


class ConfigItems(list):
    """Ordered ConfigFields with lookup by name."""

    def __init__(self, *fields: ConfigField) -> None:
        super().__init__(fields)
        self._by_name = {field.name: field for field in fields}

    def get(self, name: str) -> ConfigField | None:
        """The field called `name`, None if unknown."""
        return self._by_name.get(name)

    @property
    def names(self) -> list[str]:
        """Field names in declaration order."""
        return [f.name for f in self]


def _find_similar_key(unknown_key: str, known_keys: list[str]) -> str | None:
    """Closest known key, if any is close enough."""
    matches = difflib.get_close_matches(unknown_key, known_keys, n=1)
    return matches[0] if matches else None


def format_config_error(section: str, field: str, message: str, suggestion: str = "") -> str:
    """One error line: ``[section] Config error for 'field': message -> suggestion``."""
    msg = f"[{section}] Config error for '{field}': {message}"
    if suggestion:
        msg += f" -> {suggestion}"
    return msg


# A type check returns None when the value fits, else (message, hint).
TypeProblem = tuple[str, str] | None


def _got(value: Any) -> str:  # noqa: ANN401
    return type(value).__name__


def _bool_problem(field: ConfigField, value: Any) -> TypeProblem:  # noqa: ANN401
    if isinstance(value, bool) or (isinstance(value, str) and value.lower() in BOOL_STRINGS):
        return None
    return f"Expected bool, got {_got(value)}", f"Use {field.name} = true/false"


def _number_problem(field: ConfigField, value: Any) -> TypeProblem:  # noqa: ANN401
    # bool is an int subclass but never a number here
    if isinstance(value, bool):
        return f"Expected {field.type_name}, got bool", ""
    if isinstance(value, int | float):
        if field.field_type is int and isinstance(value, float) and not value.is_integer():
            return f"Expected int, got {value!r}", ""
        return None
    try:
        field.field_type(value)
    except (ValueError, TypeError):
        return f"Expected {field.type_name}, got {_got(value)}", f"Use {field.name} = {field.default if field.default is not None else 0}"
    return None


def _str_problem(field: ConfigField, value: Any) -> TypeProblem:  # noqa: ANN401
    return None if isinstance(value, str) else (f"Expected str, got {_got(value)}", "")


def _list_problem(field: ConfigField, value: Any) -> TypeProblem:  # noqa: ANN401
    return None if isinstance(value, list) else (f"Expected list, got {_got(value)}", f"Use {field.name} = 1, 2, 3")


_TYPE_CHECKS: dict[type, Callable[[ConfigField, Any], TypeProblem]] = {
    bool: _bool_problem,
    int: _number_problem,
    float: _number_problem,
    str: _str_problem,
    list: _list_problem,
}


class ConfigValidator:
    """Checks merged run values against a schema.

    Args:
        config: Merged values
        section: Label used in messages
        logger: Receives unknown-key warnings
    """

    def __init__(self, config: dict, section: str, logger: logging.Logger) -> None:
        self.config = config
        self.section = section
        self.log = logger

    def validate(self, schema: ConfigItems) -> list[str]:
        """Every problem found, one formatted message each; empty when valid."""
        errors: list[str] = []
        for field in schema:
            value = self.config.get(field.name)
            if value is not None:
                errors.extend(format_config_error(self.section, field.name, *problem) for problem in self._problems(field, value))
        return errors

    def _problems(self, field: ConfigField, value: Any) -> Iterator[tuple[str, str]]:  # noqa: ANN401
        """Checks in order; the first failing one ends the field, except for custom validators."""
        check = _TYPE_CHECKS.get(field.field_type)
        problem = check(field, value) if check else None
        if problem:
            yield problem
            return
        if field.choices is not None and value not in field.choices:
            yield f"Invalid value {value!r}", "Valid options: " + ", ".join(repr(c) for c in field.choices)
            return
        if field.min_value is not None and not isinstance(value, bool):
            number = float(value)
            if not math.isfinite(number):
                yield f"Expected a finite number, got {value!r}", ""
                return
            if number < field.min_value or (field.exclusive_min and number == field.min_value):
                yield f"Value {value!r} out of range", f"Must be {field.bound}"
                return
        if field.validator:
            for message in field.validator(value):
                yield message, ""

    def warn_unknown_keys(self, schema: ConfigItems) -> list[str]:
        """Log and return one warning per key the schema does not declare."""
        known = sorted(schema.names)
        warnings = []
        for key in self.config:
            if schema.get(key) is not None:
                continue
            similar = _find_similar_key(key, known)
            msg = f"[{self.section}] Unknown option '{key}' " + (f"(did you mean '{similar}'?)" if similar else "- will be ignored")
            self.log.warning(msg)
            warnings.append(msg)
        return warnings
