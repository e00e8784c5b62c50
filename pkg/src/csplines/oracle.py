"""Independent check of the direct construction via smoothness constraints.

Every cell gets its own full polynomial of degree ``d`` in local
coordinates.  Continuity across interior edges is written as a linear system
``H c = 0`` on the stacked coefficients, and the constrained space is the
null space ``H0``.  Evaluating the per-cell base times ``H0`` gives a
null-base whose column space must coincide with that of the directly
constructed base from :mod:`csplines.basis`.

Nothing in this module is used on the fitting path.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import factorial
from typing import NamedTuple, Optional

import numpy as np

from . import linalg
from .basis import BasisLayout, SplineConfig, basis_dimension, column_layout, evaluate
from .grid import GridSpec, locate_many, partition_coords

__all__ = [
    "PiecewiseBaseLayout",
    "ConstraintRow",
    "SmoothnessSystem",
    "SpanReport",
    "BoundaryCheck",
    "ContinuityReport",
    "ConfigReport",
    "piecewise_layout",
    "piecewise_evaluate",
    "piecewise_base_row",
    "smoothness_matrix",
    "solve_null_space",
    "null_base_eval",
    "span_equivalent",
    "continuity_audit",
    "null_base_continuity_audit",
    "verify_configuration",
    "sweep_configurations",
]

DEFAULT_SEED = 20240229


def _local_terms(d):
    # same order as the worked two-cell example: 1, x, y, x^2, xy, y^2, ...
    return [(total - q, q) for total in range(d + 1) for q in range(total + 1)]


@dataclass(frozen=True)
class PiecewiseBaseLayout:
    """Columns ``(k, p, q)``: monomial ``xl**p * yl**q`` living on cell ``k``.

    ``xl`` and ``yl`` are measured from the lower-left corner of the cell.
    """

    grid: GridSpec
    d: int
    columns: tuple

    @property
    def terms_per_cell(self) -> int:
        return (self.d + 1) * (self.d + 2) // 2

    def column_index(self, k: int, p: int, q: int) -> int:
        return (k - 1) * self.terms_per_cell + _local_terms(self.d).index((p, q))


def piecewise_layout(grid: GridSpec, d: int) -> PiecewiseBaseLayout:
    terms = _local_terms(d)
    columns = tuple((k, p, q) for k in range(1, grid.K + 1) for p, q in terms)
    return PiecewiseBaseLayout(grid, d, columns)


def _falling(n, order):
    out = 1
    for step in range(order):
        out *= n - step
    return out


def piecewise_evaluate(layout: PiecewiseBaseLayout, x, y, i=None, j=None, s: int = 0, t: int = 0):
    """Evaluate ``d^s/dx^s d^t/dy^t`` of the per-cell base at many points.

    Returns an array of shape ``(n, K * (d+1)(d+2)/2)``; only the block of
    columns belonging to each point's cell is non-zero.
    """
    grid = layout.grid
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if i is None or j is None:
        i, j, _ = locate_many(x, y, grid)
    i = np.atleast_1d(np.asarray(i, dtype=np.int64))
    j = np.atleast_1d(np.asarray(j, dtype=np.int64))
    xl = x - (grid.ax + (i - 1) * grid.dx)
    yl = y - (grid.ay + (j - 1) * grid.dy)
    terms = _local_terms(layout.d)
    nloc = len(terms)
    out = np.zeros((x.size, grid.K * nloc))
    rows = np.arange(x.size)
    k0 = ((i - 1) * grid.J + (j - 1)) * nloc
    for idx, (p, q) in enumerate(terms):
        if p < s or q < t:
            continue
        val = _falling(p, s) * xl ** (p - s) * (_falling(q, t) * yl ** (q - t))
        out[rows, k0 + idx] = val
    return out


def piecewise_base_row(x: float, y: float, k: int, layout: PiecewiseBaseLayout) -> np.ndarray:
    """Row of the per-cell base for cell ``k`` at ``(x, y)``."""
    i, j = partition_coords(k, layout.grid)
    return piecewise_evaluate(layout, [x], [y], [i], [j])[0]


class ConstraintRow(NamedTuple):
    """Provenance of one row of ``H``.

    ``axis`` is ``"x"`` for the edge between cells ``(i, j)`` and
    ``(i+1, j)`` and ``"y"`` for the edge between ``(i, j)`` and
    ``(i, j+1)``.  ``order`` is the normal derivative order being matched and
    ``power`` the power of the tangential coordinate whose coefficient is
    matched.
    """

    axis: str
    i: int
    j: int
    order: int
    power: int


@dataclass(frozen=True, eq=False)
class SmoothnessSystem:
    grid: GridSpec
    config: SplineConfig
    piecewise: PiecewiseBaseLayout
    H: np.ndarray
    rows: tuple
    H0: Optional[np.ndarray] = None
    tol: float = linalg.DEFAULT_TOL

    @property
    def n_coefficients(self) -> int:
        return self.H.shape[1]

    def rank(self) -> int:
        return linalg.numerical_rank(self.H, self.tol) if self.H.shape[0] else 0


def _edge_row(pw, k_lo, k_hi, s, t, width, normal_is_x):
    """Coefficient-matched constraint across one edge.

    Matches the coefficient of ``tangential**t`` in the order-``s`` normal
    derivative of the low-side piece at local normal coordinate ``width``
    against that of the high-side piece at ``0``.
    """
    row = np.zeros(len(pw.columns))
    for p, q in _local_terms(pw.d):
        normal, tangential = (p, q) if normal_is_x else (q, p)
        if tangential != t or normal < s:
            continue
        row[pw.column_index(k_lo, p, q)] += _falling(normal, s) * width ** (normal - s)
        if normal == s:
            row[pw.column_index(k_hi, p, q)] -= factorial(s)
    return row


def smoothness_matrix(grid: GridSpec, config: SplineConfig) -> SmoothnessSystem:
    """Build ``H`` for ``C^r`` continuity across every interior edge.

    Value and normal derivatives up to order ``r`` are matched along each
    edge; each such identity in the tangential coordinate splits into one
    row per tangential power.  Corner conditions are not added separately.
    """
    pw = piecewise_layout(grid, config.d)
    rows, descriptors = [], []
    for i in range(1, grid.I):
        for j in range(1, grid.J + 1):
            lo, hi = (i - 1) * grid.J + j, i * grid.J + j
            for s in range(config.r + 1):
                for t in range(config.d - s + 1):
                    rows.append(_edge_row(pw, lo, hi, s, t, grid.dx, True))
                    descriptors.append(ConstraintRow("x", i, j, s, t))
    for i in range(1, grid.I + 1):
        for j in range(1, grid.J):
            lo, hi = (i - 1) * grid.J + j, (i - 1) * grid.J + j + 1
            for t in range(config.r + 1):
                for s in range(config.d - t + 1):
                    rows.append(_edge_row(pw, lo, hi, t, s, grid.dy, False))
                    descriptors.append(ConstraintRow("y", i, j, t, s))
    H = np.array(rows) if rows else np.zeros((0, len(pw.columns)))
    return SmoothnessSystem(grid, config, pw, H, tuple(descriptors))


def solve_null_space(system: SmoothnessSystem, tol: float = linalg.DEFAULT_TOL) -> SmoothnessSystem:
    """Return a copy of ``system`` with ``H0`` filled in."""
    return replace(system, H0=linalg.null_space(system.H, tol), tol=tol)


def null_base_eval(system: SmoothnessSystem, points) -> np.ndarray:
    """Null-base ``B @ H0`` evaluated at sample points, one row per point."""
    if system.H0 is None:
        system = solve_null_space(system)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    B = piecewise_evaluate(system.piecewise, pts[:, 0], pts[:, 1])
    return B @ system.H0


class SpanReport(NamedTuple):
    equivalent: bool
    rank_a: int
    rank_b: int
    rank_joint: int

    def __bool__(self):
        return self.equivalent


def span_equivalent(A, B, tol: float = 1e-8) -> SpanReport:
    """Three-rank test for equal column spaces of two evaluated bases.

    Raises
    ------
    ValueError
        If the matrices have different row counts or fewer than twice as
        many rows as the wider of the two has columns.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"row counts differ: {A.shape[0]} vs {B.shape[0]}")
    widest = max(A.shape[1], B.shape[1])
    if A.shape[0] < 2 * widest:
        raise ValueError(
            f"need at least {2 * widest} sample points for a reliable span test, got {A.shape[0]}"
        )
    ra = linalg.numerical_rank(A, tol)
    rb = linalg.numerical_rank(B, tol)
    rj = linalg.numerical_rank(np.hstack([A, B]), tol)
    return SpanReport(ra == rb == rj, ra, rb, rj)


class BoundaryCheck(NamedTuple):
    axis: str
    i: int
    j: int
    s: int
    t: int
    max_discrepancy: float


@dataclass
class ContinuityReport:
    tol: float
    checks: list = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return not self.checks

    @property
    def max_discrepancy(self) -> float:
        return max((c.max_discrepancy for c in self.checks), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_discrepancy <= self.tol

    def worst(self) -> Optional[BoundaryCheck]:
        return max(self.checks, key=lambda c: c.max_discrepancy, default=None)


def _derivative_orders(r):
    return [(s, total - s) for total in range(r + 1) for s in range(total + 1)]


def _audit(grid, r, evaluator, tol, samples_per_boundary, seed):
    if samples_per_boundary < 1:
        raise ValueError("samples_per_boundary must be >= 1")
    rng = np.random.default_rng(seed)
    report = ContinuityReport(tol)
    orders = _derivative_orders(r)
    n = samples_per_boundary
    ones = np.ones(n, dtype=np.int64)
    for i in range(1, grid.I):
        for j in range(1, grid.J + 1):
            x = np.full(n, grid.ax + i * grid.dx)
            y = grid.ay + (j - 1 + rng.random(n)) * grid.dy
            for s, t in orders:
                lo = evaluator(x, y, i * ones, j * ones, s, t)
                hi = evaluator(x, y, (i + 1) * ones, j * ones, s, t)
                report.checks.append(BoundaryCheck("x", i, j, s, t, float(np.max(np.abs(lo - hi)))))
    for i in range(1, grid.I + 1):
        for j in range(1, grid.J):
            x = grid.ax + (i - 1 + rng.random(n)) * grid.dx
            y = np.full(n, grid.ay + j * grid.dy)
            for s, t in orders:
                lo = evaluator(x, y, i * ones, j * ones, s, t)
                hi = evaluator(x, y, i * ones, (j + 1) * ones, s, t)
                report.checks.append(BoundaryCheck("y", i, j, s, t, float(np.max(np.abs(lo - hi)))))
    return report


def continuity_audit(layout: BasisLayout, tol: float = 1e-10, samples_per_boundary: int = 50,
                     seed: int = DEFAULT_SEED) -> ContinuityReport:
    """Compare one-sided limits of every column across every interior edge.

    All partial derivatives of total order ``<= r`` are checked, with the
    cell index forced to either side of the edge.
    """

    def evaluator(x, y, i, j, s, t):
        return evaluate(layout, x, y, i, j, s=s, t=t)

    return _audit(layout.grid, layout.config.r, evaluator, tol, samples_per_boundary, seed)


def null_base_continuity_audit(system: SmoothnessSystem, coefficients=None, tol: float = 1e-10,
                               samples_per_boundary: int = 50,
                               seed: int = DEFAULT_SEED) -> ContinuityReport:
    """Continuity audit of per-cell polynomials with coefficients in ``H0``.

    ``coefficients`` defaults to ``H0`` itself, i.e. every null-base column.
    """
    if system.H0 is None:
        system = solve_null_space(system)
    C = system.H0 if coefficients is None else np.asarray(coefficients, dtype=float)

    def evaluator(x, y, i, j, s, t):
        return piecewise_evaluate(system.piecewise, x, y, i, j, s=s, t=t) @ C

    return _audit(system.grid, system.config.r, evaluator, tol, samples_per_boundary, seed)


@dataclass
class ConfigReport:
    grid: GridSpec
    config: SplineConfig
    m: int
    n_coefficients: int
    rank_h: int
    nullity: int
    span: SpanReport
    continuity: ContinuityReport
    null_base_continuity: ContinuityReport
    faulted: bool = False

    @property
    def nullity_ok(self) -> bool:
        return self.nullity == self.n_coefficients - self.rank_h == self.m

    @property
    def passed(self) -> bool:
        return (self.nullity_ok and self.span.equivalent and self.continuity.passed
                and self.null_base_continuity.passed)

    @property
    def name(self) -> str:
        return f"I={self.grid.I} J={self.grid.J} d={self.config.d} r={self.config.r}"

    def line(self) -> str:
        if self.continuity.vacuous:
            cont = "continuity=no-interior-boundaries"
        else:
            cont = (f"continuity_max={self.continuity.max_discrepancy:.3e} "
                    f"null_base_continuity_max={self.null_base_continuity.max_discrepancy:.3e}")
        return (
            f"config {self.name} m={self.m} nullity={self.nullity} rank_H={self.rank_h} "
            f"rank_B0={self.span.rank_a} rank_BC={self.span.rank_b} rank_joint={self.span.rank_joint} "
            f"{cont} status={'PASS' if self.passed else 'FAIL'}"
        )


def verify_configuration(grid: GridSpec, config: SplineConfig, n_samples: int = 200,
                         tol: float = 1e-8, continuity_tol: float = 1e-10,
                         samples_per_boundary: int = 50, seed: int = DEFAULT_SEED,
                         null_space_tol: float = linalg.DEFAULT_TOL,
                         fault: bool = False) -> ConfigReport:
    """Run the nullity, span and continuity checks for one configuration.

    With ``fault=True`` the last column of the directly constructed base is
    overwritten with random noise before the span test, which must then fail.
    """
    rng = np.random.default_rng(seed)
    system = solve_null_space(smoothness_matrix(grid, config), null_space_tol)
    layout = column_layout(grid, config)
    x = grid.ax + rng.random(n_samples) * (grid.bx - grid.ax)
    y = grid.ay + rng.random(n_samples) * (grid.by - grid.ay)
    null_base = null_base_eval(system, np.column_stack([x, y]))
    direct = evaluate(layout, x, y)
    if fault:
        direct[:, -1] = rng.standard_normal(n_samples)
    span = span_equivalent(null_base, direct, tol)
    return ConfigReport(
        grid=grid,
        config=config,
        m=basis_dimension(grid, config),
        n_coefficients=system.n_coefficients,
        rank_h=system.rank(),
        nullity=system.H0.shape[1],
        span=span,
        continuity=continuity_audit(layout, continuity_tol, samples_per_boundary, seed),
        null_base_continuity=null_base_continuity_audit(
            system, tol=continuity_tol, samples_per_boundary=samples_per_boundary, seed=seed),
        faulted=fault,
    )


def sweep_configurations(max_I: int = 3, max_J: int = 3, max_degree: int = 3, min_degree: int = 1):  # noqa: N803
    """Unit-cell grids and ``(d, r)`` pairs in a deterministic order."""
    for I in range(1, max_I + 1):  # noqa: E741
        for J in range(1, max_J + 1):
            for d in range(min_degree, max_degree + 1):
                for r in range(d + 1):
                    yield GridSpec.unit(I, J), SplineConfig(d, r)
