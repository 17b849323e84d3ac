"""Configuration wrapper providing typed access with schema defaults."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Any, cast

from .models import ConfigError

if TYPE_CHECKING:
    import logging

    from .validation import ConfigItems

__all__ = ["BOOL_FALSE_STRINGS", "BOOL_STRINGS", "BOOL_TRUE_STRINGS", "Configuration", "coerce_to_bool", "load_run_file"]

ConfigValueType = float | bool | str | list | dict

BOOL_TRUE_STRINGS = frozenset({"true", "yes", "on", "1", "enabled"})
BOOL_FALSE_STRINGS = frozenset({"false", "no", "off", "0", "disabled"})
BOOL_STRINGS = BOOL_TRUE_STRINGS | BOOL_FALSE_STRINGS


def coerce_to_bool(value: ConfigValueType | None, default: bool = False) -> bool:
    """Coerce a value to boolean, handling loose typing.

    Behavior:
        - None → default
        - Empty string → False
        - Explicit falsy strings ("false", "no", "off", "0", "disabled") → False
        - Any other non-empty string → True
        - Non-string values → bool(value)
    """
    if value is None:
        return default
    if isinstance(value, str):
        if not value.strip():
            return False
        return value.lower().strip() not in BOOL_FALSE_STRINGS
    return bool(value)


def _strip_comment(line: str) -> str:
    quote = ""
    for i, char in enumerate(line):
        if quote:
            if char == quote:
                quote = ""
        elif char in "\"'":
            quote = char
        elif char == "#":
            return line[:i]
    return line


def _unquote(text: str) -> str | None:
    """Inner text of a quoted value, None when `text` is bare."""
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":  # noqa: PLR2004
        return text[1:-1]
    return None


def _scalar(text: str, field_type: type | None) -> ConfigValueType:
    """Coerce one bare value; text that does not fit `field_type` is left for the validator."""
    quoted = _unquote(text)
    if quoted is not None:
        return quoted
    if field_type is str:
        return text
    lowered = text.lower()
    if field_type is bool:
        return coerce_to_bool(text) if lowered in BOOL_STRINGS else text
    if field_type is None and lowered in {"true", "false"}:
        return lowered == "true"
    for number in (int, float):
        if field_type in {None, number}:
            try:
                return number(text)
            except ValueError:
                continue
    return text


def _value(text: str, field_type: type | None) -> ConfigValueType:
    if field_type is list or (text.startswith("[") and text.endswith("]")):
        inner = text[1:-1] if text.startswith("[") and text.endswith("]") else text
        return [_scalar(item, None) for item in inner.replace(",", " ").split()]
    return _scalar(text, field_type)


def load_run_file(path: str | Path, schema: ConfigItems | None = None) -> dict[str, Any]:
    """Read a flat ``key = value`` run file.

    One pair per line, split on the first ``=``. ``#`` starts a comment outside quotes.
    Values may be bare or quoted; bare values are coerced to the schema type of their key.
    Lists are written ``[1, 2]`` or ``1, 2``.

    Args:
        path: File to read
        schema: Field types used for coercion

    Raises:
        ConfigError: unreadable file, or lines that are not ``key = value`` pairs
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError as e:
        raise ConfigError([f"Config file not found: {path}"]) from e
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError([f"Cannot read {path}: {e}"]) from e

    values: dict[str, Any] = {}
    errors: list[str] = []
    for number, raw in enumerate(lines, start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        key, sep, text = line.partition("=")
        key, text = key.strip(), text.strip()
        if not sep or not key:
            errors.append(f"{path}:{number}: expected 'key = value', got {raw.strip()!r}")
            continue
        if key in values:
            errors.append(f"{path}:{number}: duplicate key '{key}'")
            continue
        if text and text[0] in "\"'" and _unquote(text) is None:
            errors.append(f"{path}:{number}: unterminated quote in value of '{key}'")
            continue
        field = schema.get(key) if schema is not None else None
        values[key] = _value(text, field.field_type if field else None)
    if errors:
        raise ConfigError(errors)
    return values


class Configuration(dict):
    """Flat key/value configuration with schema defaults and typed getters.

    Layers are merged left to right with `layered`, so later sources win.
    """

    def __init__(
        self,
        *args: Any,  # noqa: ANN401
        logger: logging.Logger,
        schema: ConfigItems | None = None,
        **kwargs: Any,  # noqa: ANN401
    ):
        super().__init__(*args, **kwargs)
        self.log = logger
        self._schema_defaults: dict[str, ConfigValueType] = {}
        if schema:
            self.set_schema(schema)

    @classmethod
    def layered(cls, *sources: dict[str, Any], logger: logging.Logger, schema: ConfigItems | None = None) -> Configuration:
        """Merge sources in order; None values in a source never override.

        Args:
            *sources: Dicts from lowest to highest precedence
            logger: Logger for coercion warnings
            schema: Optional schema providing defaults
        """
        merged: dict[str, Any] = {}
        for source in sources:
            merged.update({k: v for k, v in source.items() if v is not None})
        return cls(merged, logger=logger, schema=schema)

    def set_schema(self, schema: ConfigItems) -> None:
        """Set or update the schema for default value lookups."""
        self._schema_defaults = {field.name: field.default for field in schema if field.default is not None}

    def get(self, name: str, default: ConfigValueType | None = None) -> ConfigValueType | None:  # type: ignore[override]
        """Get a value, falling back on the schema default then on `default`."""
        if name in self:
            return cast("ConfigValueType", self[name])
        if name in self._schema_defaults:
            return self._schema_defaults[name]
        return default

    def has_explicit(self, name: str) -> bool:
        """Check if value was explicitly set (not from schema default)."""
        return name in self

    def get_bool(self, name: str, default: bool = False) -> bool:
        """Get a boolean value, handling loose typing (see `coerce_to_bool`)."""
        return coerce_to_bool(self.get(name), default)

    def get_int(self, name: str, default: int = 0) -> int:
        """Get an integer value, `default` if missing or invalid."""
        value = self.get(name)
        if value is None:
            return default
        try:
            return int(value)  # type: ignore[arg-type]
        except (ValueError, TypeError):
            self.log.warning("Invalid integer value for %s: %s", name, value)
            return default

    def get_float(self, name: str, default: float = 0.0) -> float:
        """Get a float value, `default` if missing or invalid."""
        value = self.get(name)
        if value is None:
            return default
        try:
            return float(value)  # type: ignore[arg-type]
        except (ValueError, TypeError):
            self.log.warning("Invalid float value for %s: %s", name, value)
            return default

    def get_str(self, name: str, default: str = "") -> str:
        """Get a string value."""
        value = self.get(name)
        if value is None:
            return default
        return str(value)

    def get_int_list(self, name: str, default: list[int] | None = None) -> list[int]:
        """Get a list of integers; a single scalar becomes a one-item list."""
        value = self.get(name)
        if value is None:
            return list(default or [])
        if isinstance(value, list):
            return [int(v) for v in value]
        if isinstance(value, str):
            return [int(v) for v in value.replace(",", " ").split()]
        return [int(value)]  # type: ignore[arg-type]
