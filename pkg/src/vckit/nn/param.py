"""Parameter containers and the module base class.

Models are built from explicit forward/backward passes over numpy arrays.
Each Param pairs a value array with a same-shaped gradient accumulator;
modules discover their params and children by attribute insertion order,
which keeps parameter manifests deterministic.
"""

from __future__ import annotations

import numpy as np

from ..errors import FormatError


class Param:
    """A named tensor with an accumulated gradient of the same shape."""

    __slots__ = ("name", "data", "grad")

    def __init__(self, name: str, data: np.ndarray):
        self.name = name
        self.data = np.asarray(data)
        self.grad = np.zeros_like(self.data)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def astype(self, dtype) -> None:
        self.data = self.data.astype(dtype)
        self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        return f"Param({self.name}, shape={self.data.shape}, dtype={self.data.dtype})"


class Module:
    """Base for layers and models with explicit backward passes.

    Parameters and submodules are found by walking instance attributes in
    insertion order (lists are walked element-wise), so the flattened
    parameter list is stable across runs and suitable for serialization.
    """

    def params(self) -> list[Param]:
        out: list[Param] = []
        for value in vars(self).values():
            out.extend(_collect(value))
        return out

    def zero_grad(self) -> None:
        for p in self.params():
            p.zero_grad()

    def astype(self, dtype) -> "Module":
        for p in self.params():
            p.astype(dtype)
        return self

    def n_params(self) -> int:
        return sum(p.data.size for p in self.params())

    def param_dict(self) -> dict[str, Param]:
        table: dict[str, Param] = {}
        for p in self.params():
            if p.name in table:
                raise FormatError(f"duplicate parameter name {p.name!r}")
            table[p.name] = p
        return table


def _collect(value) -> list[Param]:
    if isinstance(value, Param):
        return [value]
    if isinstance(value, Module):
        return value.params()
    if isinstance(value, (list, tuple)):
        out: list[Param] = []
        for item in value:
            out.extend(_collect(item))
        return out
    return []
