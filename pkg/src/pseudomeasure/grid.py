"""Periodic grid discretization of L2 on a box, with cell subsets and state vectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = [
    "Grid",
    "BaseSet",
    "StateVector",
    "make_grid",
    "indicator",
    "inner",
    "lebesgue",
    "project",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on the box ``[0, extent)^dim``."""

    dim: int
    cells_per_axis: int
    extent: float
    spacing: float = field(init=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if int(self.cells_per_axis) != self.cells_per_axis or self.cells_per_axis < 1:
            raise ValueError(f"cells_per_axis must be a positive integer, got {self.cells_per_axis}")
        if not self.extent > 0:
            raise ValueError(f"extent must be positive, got {self.extent}")
        object.__setattr__(self, "cells_per_axis", int(self.cells_per_axis))
        object.__setattr__(self, "extent", float(self.extent))
        object.__setattr__(self, "spacing", self.extent / self.cells_per_axis)

    @property
    def size(self) -> int:
        return self.cells_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def coordinates(self) -> np.ndarray:
        """Left-corner coordinates of every cell, shape ``(size, dim)``, C order."""
        axis = np.arange(self.cells_per_axis) * self.spacing
        mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def cell_of(self, points: np.ndarray) -> np.ndarray:
        """Flat cell index of each point after wrapping onto the torus."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = np.floor(np.mod(points, self.extent) / self.spacing).astype(np.int64)
        np.clip(idx, 0, self.cells_per_axis - 1, out=idx)
        flat = np.zeros(idx.shape[0], dtype=np.int64)
        for k in range(self.dim):
            flat = flat * self.cells_per_axis + idx[:, k]
        return flat

    def to_dict(self) -> dict:
        return {"dim": self.dim, "cells_per_axis": self.cells_per_axis, "extent": self.extent}


def make_grid(dim: int, cells_per_axis: int, extent: float) -> Grid:
    return Grid(dim, cells_per_axis, extent)


class BaseSet:
    """A subset of grid cells, the discrete stand-in for a bounded Borel set."""

    __slots__ = ("grid", "mask", "_key")

    def __init__(self, grid: Grid, mask):
        mask = np.asarray(mask, dtype=bool).ravel()
        if mask.shape != (grid.size,):
            raise ValueError(f"mask has {mask.size} entries, grid has {grid.size} cells")
        mask = mask.copy()
        mask.flags.writeable = False
        self.grid = grid
        self.mask = mask
        self._key = np.packbits(mask).tobytes()

    @classmethod
    def from_cells(cls, grid: Grid, cells: Iterable[int]) -> "BaseSet":
        mask = np.zeros(grid.size, dtype=bool)
        cells = np.fromiter(cells, dtype=np.int64)
        if cells.size and (cells.min() < 0 or cells.max() >= grid.size):
            raise ValueError("cell index out of range")
        mask[cells] = True
        return cls(grid, mask)

    @classmethod
    def full(cls, grid: Grid) -> "BaseSet":
        return cls(grid, np.ones(grid.size, dtype=bool))

    @classmethod
    def empty(cls, grid: Grid) -> "BaseSet":
        return cls(grid, np.zeros(grid.size, dtype=bool))

    @classmethod
    def interval(cls, grid: Grid, lo: float, hi: float) -> "BaseSet":
        """Cells whose left corner lies in ``[lo, hi)`` along every axis."""
        x = grid.coordinates()
        eps = 1e-12 * grid.extent
        mask = np.all((x >= lo - eps) & (x < hi - eps), axis=1)
        return cls(grid, mask)

    @property
    def cells(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def is_empty(self) -> bool:
        return not self.mask.any()

    def is_full(self) -> bool:
        return bool(self.mask.all())

    def _check(self, other: "BaseSet"):
        if other.grid != self.grid:
            raise ValueError("base sets live on different grids")

    def __and__(self, other: "BaseSet") -> "BaseSet":
        self._check(other)
        return BaseSet(self.grid, self.mask & other.mask)

    def __or__(self, other: "BaseSet") -> "BaseSet":
        self._check(other)
        return BaseSet(self.grid, self.mask | other.mask)

    def __sub__(self, other: "BaseSet") -> "BaseSet":
        self._check(other)
        return BaseSet(self.grid, self.mask & ~other.mask)

    def __invert__(self) -> "BaseSet":
        return BaseSet(self.grid, ~self.mask)

    complement = __invert__

    def __eq__(self, other) -> bool:
        if not isinstance(other, BaseSet):
            return NotImplemented
        return self.grid == other.grid and self._key == other._key

    def __hash__(self) -> int:
        return hash((self.grid, self._key))

    def __repr__(self) -> str:
        cells = self.cells
        shown = ", ".join(map(str, cells[:8])) + (", ..." if cells.size > 8 else "")
        return f"BaseSet({{{shown}}} of {self.grid.size})"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes per cell: an element of the discretized L2 space."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).ravel()
        if values.shape != (self.grid.size,):
            raise ValueError(f"state has {values.size} entries, grid has {self.grid.size} cells")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> "StateVector":
        return cls(grid, np.zeros(grid.size, dtype=complex))

    def norm(self) -> float:
        return float(np.sqrt(inner(self, self).real))

    def __add__(self, other: "StateVector") -> "StateVector":
        _same_grid(self, other)
        return StateVector(self.grid, self.values + other.values)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _same_grid(self, other)
        return StateVector(self.grid, self.values - other.values)

    def __mul__(self, c) -> "StateVector":
        return StateVector(self.grid, c * self.values)

    __rmul__ = __mul__


def _same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("operands live on different grids")


def indicator(base: BaseSet) -> StateVector:
    return StateVector(base.grid, base.mask.astype(complex))


def inner(u: StateVector, v: StateVector) -> complex:
    """Weighted inner product, linear in ``u`` and conjugate-linear in ``v``."""
    _same_grid(u, v)
    return complex(u.grid.cell_volume * np.vdot(v.values, u.values))


def lebesgue(base: BaseSet) -> float:
    return base.grid.cell_volume * len(base)


def project(base: BaseSet, v: StateVector) -> StateVector:
    _same_grid(base, v)
    return StateVector(v.grid, np.where(base.mask, v.values, 0))
