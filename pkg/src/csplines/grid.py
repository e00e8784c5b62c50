"""Rectangular partitioning of the (x, y) domain.

The domain ``[ax, bx] x [ay, by]`` is cut into ``I`` equal columns along x and
``J`` equal rows along y.  Cells carry 1-based coordinates ``(i, j)`` and are
numbered ``k = (i - 1) * J + j`` so that the y index varies fastest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError, OutOfDomainError

__all__ = [
    "GridSpec",
    "PartitionId",
    "partition_index",
    "partition_coords",
    "locate",
    "locate_many",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform ``I x J`` partition of a closed rectangle.

    Parameters
    ----------
    ax, bx : float
        Lower and upper bound of the x range.
    ay, by : float
        Lower and upper bound of the y range.
    I, J : int
        Number of cells along x and along y.
    """

    ax: float
    bx: float
    ay: float
    by: float
    I: int  # noqa: E741
    J: int

    def __post_init__(self):
        for name in ("ax", "bx", "ay", "by"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"grid bound {name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("I", "J"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(f"partition count {name} must be an integer, got {value!r}")
            if value < 1:
                raise DomainError(f"partition count {name} must be >= 1, got {value}")
            object.__setattr__(self, name, int(value))
        if not self.ax < self.bx:
            raise DomainError(f"need ax < bx, got ax={self.ax}, bx={self.bx}")
        if not self.ay < self.by:
            raise DomainError(f"need ay < by, got ay={self.ay}, by={self.by}")

    @property
    def dx(self) -> float:
        return (self.bx - self.ax) / self.I

    @property
    def dy(self) -> float:
        return (self.by - self.ay) / self.J

    @property
    def K(self) -> int:
        return self.I * self.J

    @classmethod
    def unit(cls, I: int, J: int) -> "GridSpec":  # noqa: E741
        """Grid with unit cells anchored at the origin."""
        return cls(0.0, float(I), 0.0, float(J), I, J)

    def contains(self, x, y):
        """Boolean mask of points inside the closed domain."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (x >= self.ax) & (x <= self.bx) & (y >= self.ay) & (y <= self.by)

    def cells(self):
        """Iterate over ``(i, j, k)`` in increasing ``k``."""
        for i in range(1, self.I + 1):
            for j in range(1, self.J + 1):
                yield PartitionId(i, j, (i - 1) * self.J + j)


class PartitionId(NamedTuple):
    i: int
    j: int
    k: int


def partition_index(i: int, j: int, grid: GridSpec) -> int:
    """Linear number ``k`` of cell ``(i, j)``."""
    if not (1 <= i <= grid.I and 1 <= j <= grid.J):
        raise DomainError(f"cell ({i}, {j}) outside 1..{grid.I} x 1..{grid.J}")
    return (i - 1) * grid.J + j


def partition_coords(k: int, grid: GridSpec) -> tuple[int, int]:
    """Inverse of :func:`partition_index`."""
    if not 1 <= k <= grid.K:
        raise DomainError(f"partition number {k} outside 1..{grid.K}")
    i, j = divmod(k - 1, grid.J)
    return i + 1, j + 1


def _cell_index(offset, width, n):
    idx = np.ceil(offset / width).astype(np.int64)
    return np.clip(idx, 1, n)


def locate_many(x, y, grid: GridSpec, clamp: bool = False):
    """Assign points to cells.

    Parameters
    ----------
    x, y : array_like
        Point coordinates, same shape.
    grid : GridSpec
    clamp : bool, default False
        If False, any point outside the closed domain raises
        :class:`OutOfDomainError`.  If True such points are assigned to the
        nearest cell (extrapolation).

    Returns
    -------
    i, j, k : ndarray of int
        Cell coordinates and linear numbers, 1-based.

    Notes
    -----
    A point on an interior boundary goes to the lower-index cell since
    ``ceil`` of an exact integer is that integer; points on the lower domain
    edge are lifted from index 0 to 1.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError(f"x and y shapes differ: {x.shape} vs {y.shape}")
    bad = ~(np.isfinite(x) & np.isfinite(y))
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise OutOfDomainError(f"row {row}: non-finite coordinate ({x[row]}, {y[row]})", row=row)
    if not clamp:
        outside = ~grid.contains(x, y)
        if outside.any():
            row = int(np.flatnonzero(outside)[0])
            raise OutOfDomainError(
                f"row {row}: point ({x[row]!r}, {y[row]!r}) outside domain "
                f"[{grid.ax}, {grid.bx}] x [{grid.ay}, {grid.by}]",
                row=row,
            )
    i = _cell_index(x - grid.ax, grid.dx, grid.I)
    j = _cell_index(y - grid.ay, grid.dy, grid.J)
    return i, j, (i - 1) * grid.J + j


def locate(x: float, y: float, grid: GridSpec, clamp: bool = False) -> PartitionId:
    """Cell containing a single point; see :func:`locate_many`."""
    i, j, k = locate_many([x], [y], grid, clamp=clamp)
    return PartitionId(int(i[0]), int(j[0]), int(k[0]))
