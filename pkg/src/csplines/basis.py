"""Direct construction of the C-spline base.

Each polynomial term ``x**p * y**q`` of total degree ``<= d`` is replaced by a
set of columns built from shifted linear blocks

    u_i(x) = (x - ax) - i * dx          for i < I
    u_I(x) = (x - ax) - (I - 1) * dx

and their y counterparts ``v_j``.  Block ``u_i`` is switched on only in cells
whose x index is ``<= i``, so ``u_i**p`` is a one-sided truncated power with a
knot at ``ax + i * dx``; ``u_I`` is switched on everywhere.  Powers ``p <= r``
use the global block alone, higher powers use all ``I`` blocks, which keeps
every column ``C^r`` across cell boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import DomainError
from .grid import GridSpec, locate_many, partition_coords

__all__ = [
    "GLOBAL",
    "SplineConfig",
    "ColumnDescriptor",
    "BasisLayout",
    "u_value",
    "v_value",
    "u_active",
    "v_active",
    "column_layout",
    "basis_dimension",
    "evaluate",
    "eval_row",
    "eval_row_deriv",
    "design_matrix",
]

GLOBAL = None
"""Piece tag of a block that is active on every cell."""


@dataclass(frozen=True)
class SplineConfig:
    """Polynomial degree ``d`` and continuity order ``r``."""

    d: int
    r: int

    def __post_init__(self):
        for name in ("d", "r"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise DomainError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, int(value))
        if self.r > self.d:
            raise DomainError(
                f"continuity order must not exceed degree (r={self.r}, d={self.d})"
            )


class ColumnDescriptor(NamedTuple):
    """One column of the base: ``U**p * V**q`` on the tagged pieces."""

    p: int
    q: int
    x_piece: Optional[int]
    y_piece: Optional[int]

    def label(self) -> str:
        xs = "G" if self.x_piece is GLOBAL else str(self.x_piece)
        ys = "G" if self.y_piece is GLOBAL else str(self.y_piece)
        return f"p={self.p} q={self.q} x_piece={xs} y_piece={ys}"


def _terms(d):
    # total degree ascending, then p ascending
    for total in range(d + 1):
        for p in range(total + 1):
            yield p, total - p


@dataclass(frozen=True)
class BasisLayout:
    grid: GridSpec
    config: SplineConfig
    columns: tuple

    @property
    def m(self) -> int:
        return len(self.columns)

    def __len__(self):
        return len(self.columns)

    @cached_property
    def _arrays(self):
        cols = self.columns
        p = np.array([c.p for c in cols], dtype=np.int64)
        q = np.array([c.q for c in cols], dtype=np.int64)
        xi = np.array([self.grid.I if c.x_piece is GLOBAL else c.x_piece for c in cols], dtype=np.int64)
        yj = np.array([self.grid.J if c.y_piece is GLOBAL else c.y_piece for c in cols], dtype=np.int64)
        return p, q, xi, yj


def column_layout(grid: GridSpec, config: SplineConfig) -> BasisLayout:
    """Ordered column descriptors of the C-spline base.

    Within a term, the x piece varies slowest and the y piece fastest.
    """
    r = config.r
    columns = []
    for p, q in _terms(config.d):
        xs = [GLOBAL] if p <= r else list(range(1, grid.I + 1))
        ys = [GLOBAL] if q <= r else list(range(1, grid.J + 1))
        columns.extend(ColumnDescriptor(p, q, xi, yj) for xi in xs for yj in ys)
    return BasisLayout(grid, config, tuple(columns))


def basis_dimension(grid: GridSpec, config: SplineConfig) -> int:
    """Closed-form column count of :func:`column_layout`."""
    r = config.r
    return sum(
        (1 if p <= r else grid.I) * (1 if q <= r else grid.J) for p, q in _terms(config.d)
    )


def _block(offset, index, n, width):
    shift = np.where(index < n, index, n - 1)
    return offset - shift * width


def u_value(i: int, x: float, grid: GridSpec) -> float:
    """Building block ``u_i`` at ``x``."""
    if not 1 <= i <= grid.I:
        raise DomainError(f"block index i={i} outside 1..{grid.I}")
    return float(_block(x - grid.ax, i, grid.I, grid.dx))


def v_value(j: int, y: float, grid: GridSpec) -> float:
    """Building block ``v_j`` at ``y``."""
    if not 1 <= j <= grid.J:
        raise DomainError(f"block index j={j} outside 1..{grid.J}")
    return float(_block(y - grid.ay, j, grid.J, grid.dy))


def u_active(k: int, i: int, grid: GridSpec) -> bool:
    """Whether block ``u_i`` is switched on in partition ``k``."""
    if not 1 <= i <= grid.I:
        raise DomainError(f"block index i={i} outside 1..{grid.I}")
    partition_coords(k, grid)
    return k <= i * grid.J


def v_active(k: int, j: int, grid: GridSpec) -> bool:
    """Whether block ``v_j`` is switched on in partition ``k``."""
    if not 1 <= j <= grid.J:
        raise DomainError(f"block index j={j} outside 1..{grid.J}")
    return partition_coords(k, grid)[1] <= j


def _power_deriv(base, power, order):
    """``d^order/dt^order t**power`` evaluated at ``base``, column-wise."""
    coeff = np.ones_like(power, dtype=float)
    for step in range(order):
        coeff = coeff * np.maximum(power - step, 0)
    return coeff * np.power(base, np.maximum(power - order, 0))


def evaluate(layout: BasisLayout, x, y, i=None, j=None, s: int = 0, t: int = 0,
             clamp: bool = False) -> np.ndarray:
    """Evaluate ``d^s/dx^s d^t/dy^t`` of every column at many points.

    Parameters
    ----------
    layout : BasisLayout
    x, y : array_like, shape (n,)
    i, j : array_like of int, optional
        Cell coordinates to evaluate in.  When omitted they come from
        :func:`~csplines.grid.locate_many`; passing them forces a row, which
        is how one-sided limits on a cell boundary are taken.
    s, t : int
        Derivative orders in x and y.
    clamp : bool
        Forwarded to ``locate_many`` when locating.

    Returns
    -------
    ndarray, shape (n, m)
    """
    grid = layout.grid
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if i is None or j is None:
        i, j, _ = locate_many(x, y, grid, clamp=clamp)
    i = np.atleast_1d(np.asarray(i, dtype=np.int64))
    j = np.atleast_1d(np.asarray(j, dtype=np.int64))
    if s < 0 or t < 0:
        raise DomainError(f"derivative orders must be non-negative, got s={s}, t={t}")

    p, q, xi, yj = layout._arrays
    u = _block((x - grid.ax)[:, None], xi[None, :], grid.I, grid.dx)
    v = _block((y - grid.ay)[:, None], yj[None, :], grid.J, grid.dy)
    active = (i[:, None] <= xi[None, :]) & (j[:, None] <= yj[None, :])
    values = _power_deriv(u, p[None, :], s) * _power_deriv(v, q[None, :], t)
    return np.where(active, values, 0.0)


def eval_row(x: float, y: float, k: int, layout: BasisLayout) -> np.ndarray:
    """Row of the base for partition ``k`` evaluated at ``(x, y)``."""
    return eval_row_deriv(x, y, k, 0, 0, layout)


def eval_row_deriv(x: float, y: float, k: int, s: int, t: int, layout: BasisLayout) -> np.ndarray:
    """Analytic ``d^s/dx^s d^t/dy^t`` of row ``k`` at ``(x, y)``."""
    i, j = partition_coords(k, layout.grid)
    return evaluate(layout, [x], [y], [i], [j], s=s, t=t)[0]


def design_matrix(data, grid: GridSpec, layout: BasisLayout):
    """Assemble the ``N x m`` design matrix for a dataset.

    Parameters
    ----------
    data : Dataset or array_like of shape (N, 2) or (N, 3)
    grid : GridSpec
        Must equal ``layout.grid``.
    layout : BasisLayout

    Returns
    -------
    matrix : ndarray, shape (N, m)
    rows : ndarray of int, shape (N,)
        Partition number ``k`` assigned to each point.

    Raises
    ------
    OutOfDomainError
        Naming the first point outside the closed domain.
    """
    if grid != layout.grid:
        raise DomainError("grid does not match the layout's grid")
    x, y = _coords(data)
    if x.size == 0:
        return np.zeros((0, layout.m)), np.zeros(0, dtype=np.int64)
    i, j, k = locate_many(x, y, grid)
    return evaluate(layout, x, y, i, j), k


def _coords(data):
    if hasattr(data, "x") and hasattr(data, "y"):
        return np.asarray(data.x, dtype=float), np.asarray(data.y, dtype=float)
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        return np.empty(0), np.empty(0)
    return arr[:, 0], arr[:, 1]
