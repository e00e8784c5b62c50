"""Exit criteria.  Each test records a PASS/FAIL line shown in the pytest summary."""
import io

import numpy as np

from csplines.basis import SplineConfig, basis_dimension, column_layout, design_matrix, evaluate
from csplines.cli import main
from csplines.dataset import Dataset
from csplines.grid import GridSpec
from csplines.linalg import least_squares, numerical_rank
from csplines.model import fit
from csplines.oracle import (
    continuity_audit,
    null_base_eval,
    smoothness_matrix,
    solve_null_space,
    span_equivalent,
    sweep_configurations,
)
from helpers import EXAMPLE_MATRIX, EXAMPLE_POINTS, to_paper_columns

SEED = 20240229
SWEEP = list(sweep_configurations(3, 3, 3))


def test_01_worked_design_matrix(record_criterion):
    grid = GridSpec(0.0, 2.0, 0.0, 1.0, 2, 1)
    layout = column_layout(grid, SplineConfig(1, 0))
    A, _ = design_matrix(Dataset.from_points(EXAMPLE_POINTS), grid, layout)
    err = float(np.max(np.abs(to_paper_columns(A) - EXAMPLE_MATRIX)))
    ok = A.shape == (5, 4) and err <= 1e-12
    record_criterion(1, "worked 5x4 design matrix reproduced", ok, f"max |diff| = {err:.1e} (tol 1e-12)")
    assert ok


def test_02_collapse_to_linear_regression(record_criterion):
    grid = GridSpec.unit(2, 1)
    layout = column_layout(grid, SplineConfig(1, 1))
    rng = np.random.default_rng(SEED)
    x, y = rng.uniform(0, 2, 40), rng.uniform(0, 1, 40)
    B = evaluate(layout, x, y)
    report = span_equivalent(B, np.column_stack([np.ones(40), x, y]), tol=1e-8)
    ok = layout.m == 3 and report.equivalent and report.rank_joint == 3
    record_criterion(2, "collapse to span{1, x, y}", ok,
                     f"m = {layout.m}, ranks = {report.rank_a}/{report.rank_b}/{report.rank_joint}")
    assert ok


def test_03_oracle_span_equivalence(record_criterion):
    failures = []
    for grid, config in SWEEP:
        system = solve_null_space(smoothness_matrix(grid, config))
        rng = np.random.default_rng(SEED)
        pts = np.column_stack([rng.uniform(grid.ax, grid.bx, 200), rng.uniform(grid.ay, grid.by, 200)])
        direct = evaluate(column_layout(grid, config), pts[:, 0], pts[:, 1])
        if not span_equivalent(null_base_eval(system, pts), direct, tol=1e-8):
            failures.append((grid.I, grid.J, config.d, config.r))
    ok = not failures
    record_criterion(3, "null-base and direct base span-equivalent", ok,
                     f"{len(SWEEP) - len(failures)}/{len(SWEEP)} configurations")
    assert ok, failures


def test_04_nullity_identity(record_criterion):
    failures = []
    for grid, config in SWEEP:
        system = solve_null_space(smoothness_matrix(grid, config))
        nloc = (config.d + 1) * (config.d + 2) // 2
        nullity = system.H0.shape[1]
        rank_h = numerical_rank(system.H) if system.H.shape[0] else 0
        if not nullity == grid.K * nloc - rank_h == basis_dimension(grid, config):
            failures.append((grid.I, grid.J, config.d, config.r, nullity))
    ok = not failures
    record_criterion(4, "nullity = K(d+1)(d+2)/2 - rank(H) = m", ok,
                     f"{len(SWEEP) - len(failures)}/{len(SWEEP)} configurations")
    assert ok, failures


def test_05_continuity_audit(record_criterion):
    worst = 0.0
    failures = []
    for grid, config in SWEEP:
        report = continuity_audit(column_layout(grid, config), tol=1e-10, samples_per_boundary=50, seed=SEED)
        worst = max(worst, report.max_discrepancy)
        if not report.passed:
            failures.append((grid.I, grid.J, config.d, config.r))
    ok = not failures
    record_criterion(5, "one-sided derivative limits agree", ok, f"max discrepancy = {worst:.1e} (tol 1e-10)")
    assert ok, failures


def test_06_fit_round_trip(record_criterion):
    grid, config = GridSpec.unit(3, 2), SplineConfig(2, 1)
    layout = column_layout(grid, config)
    rng = np.random.default_rng(SEED)
    xs, ys = [], []
    for cell in grid.cells():
        xs.append(cell.i - 1 + rng.uniform(0.01, 0.99, 25))
        ys.append(cell.j - 1 + rng.uniform(0.01, 0.99, 25))
    x, y = np.concatenate(xs), np.concatenate(ys)
    b_true = rng.standard_normal(layout.m)
    A = evaluate(layout, x, y)
    z = A @ b_true
    model = fit(Dataset(x, y, z), grid, config)
    coef_err = float(np.max(np.abs(model.b - b_true)))
    z_noisy = z + 0.1 * rng.standard_normal(z.size)
    production = least_squares(A, z_noisy).b
    normal = np.linalg.inv(A.T @ A) @ A.T @ z_noisy
    solver_gap = float(np.max(np.abs(production - normal)))
    ok = coef_err <= 1e-8 and model.residual_norm <= 1e-10 and solver_gap <= 1e-8
    record_criterion(6, "fit round-trip and normal-equation agreement", ok,
                     f"coef err = {coef_err:.1e}, residual = {model.residual_norm:.1e}, "
                     f"solver gap = {solver_gap:.1e}")
    assert ok


def test_07_derivatives_vs_finite_differences(record_criterion):
    h = 1e-6
    worst = 0.0
    for n, (grid, config) in enumerate(SWEEP):
        layout = column_layout(grid, config)
        rng = np.random.default_rng(SEED + n)
        i = rng.integers(1, grid.I + 1, 100)
        j = rng.integers(1, grid.J + 1, 100)
        x = grid.ax + (i - 1 + rng.uniform(0.01, 0.99, 100)) * grid.dx
        y = grid.ay + (j - 1 + rng.uniform(0.01, 0.99, 100)) * grid.dy
        for s, t, dxh, dyh in ((1, 0, h, 0.0), (0, 1, 0.0, h)):
            analytic = evaluate(layout, x, y, i, j, s=s, t=t)
            fd = (evaluate(layout, x + dxh, y + dyh, i, j) - evaluate(layout, x - dxh, y - dyh, i, j)) / (2 * h)
            # relative error, floored at unit scale where the derivative vanishes
            rel = np.abs(fd - analytic) / np.maximum(np.abs(analytic), 1.0)
            worst = max(worst, float(rel.max()))
    ok = worst <= 1e-5
    record_criterion(7, "analytic derivatives match central differences", ok,
                     f"max relative error = {worst:.1e} (tol 1e-5)")
    assert ok


def test_08_fault_injection(record_criterion, capsys):
    out = io.StringIO()
    code = main(["verify", "--self-test-fault"], out=out)
    err = capsys.readouterr().err
    named = "verification failed for I=3 J=3 d=3 r=3" in err
    ok = code != 0 and named
    record_criterion(8, "verify --self-test-fault fails and names the configuration", ok,
                     f"exit {code}; {err.strip()}")
    assert ok
