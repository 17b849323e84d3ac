"""Trainable tensors and ordered parameter collections."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from ..models import ShapeError

__all__ = ["ParamGroup", "ParamTensor", "assign_flat", "flatten_params"]


@dataclass(eq=False)
class ParamTensor:
    """A rows x cols float64 value with its gradient buffer."""

    name: str
    value: np.ndarray
    grad: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.value = np.array(self.value, dtype=np.float64, ndmin=2)
        if self.value.ndim != 2:  # noqa: PLR2004
            msg = f"{self.name}: parameters are matrices, got shape {self.value.shape}"
            raise ShapeError(msg)
        self.grad = np.zeros_like(self.value)

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols)."""
        return self.value.shape  # type: ignore[return-value]

    @property
    def size(self) -> int:
        """Number of entries."""
        return int(self.value.size)

    def zero_grad(self) -> None:
        """Reset the gradient buffer in place."""
        self.grad.fill(0.0)


class ParamGroup:
    """Named parameters in registration order.

    Names are dotted; the first segment is the group reported by gradient checks.
    """

    def __init__(self) -> None:
        self._params: dict[str, ParamTensor] = {}

    def add(self, name: str, value: np.ndarray) -> ParamTensor:
        """Register a new parameter."""
        if name in self._params:
            msg = f"duplicate parameter name {name}"
            raise ShapeError(msg)
        param = ParamTensor(name, value)
        self._params[name] = param
        return param

    def __iter__(self) -> Iterator[ParamTensor]:
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def __getitem__(self, name: str) -> ParamTensor:
        return self._params[name]

    def __contains__(self, name: object) -> bool:
        return name in self._params

    @property
    def names(self) -> list[str]:
        """Parameter names in registration order."""
        return list(self._params)

    @property
    def size(self) -> int:
        """Total number of scalars."""
        return sum(p.size for p in self)

    def zero_grad(self) -> None:
        """Reset every gradient buffer."""
        for p in self:
            p.zero_grad()

    def snapshot(self) -> dict[str, np.ndarray]:
        """Copy of every value."""
        return {p.name: p.value.copy() for p in self}

    def restore(self, values: dict[str, np.ndarray]) -> None:
        """Copy values back in place.

        Raises:
            ShapeError: missing name or shape mismatch
        """
        for p in self:
            if p.name not in values:
                msg = f"missing tensor {p.name}"
                raise ShapeError(msg)
            source = np.asarray(values[p.name], dtype=np.float64)
            if source.shape != p.shape:
                msg = f"{p.name}: expected shape {p.shape}, got {source.shape}"
                raise ShapeError(msg)
            p.value[...] = source


def flatten_params(params: ParamGroup) -> np.ndarray:
    """Concatenate every value into one vector, registration order."""
    if not len(params):
        return np.empty(0)
    return np.concatenate([p.value.ravel() for p in params])


def assign_flat(params: ParamGroup, vector: np.ndarray) -> None:
    """Inverse of `flatten_params`.

    Raises:
        ShapeError: vector length differs from the parameter count
    """
    if vector.shape != (params.size,):
        msg = f"expected a vector of {params.size} entries, got shape {vector.shape}"
        raise ShapeError(msg)
    offset = 0
    for p in params:
        p.value[...] = vector[offset : offset + p.size].reshape(p.shape)
        offset += p.size
