import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csplines.basis import SplineConfig, column_layout, design_matrix, evaluate
from csplines.dataset import Dataset
from csplines.exceptions import (
    DomainError,
    ExtrapolationWarning,
    OutOfDomainError,
    RankDeficiencyWarning,
    SchemaError,
)
from csplines.grid import GridSpec
from csplines.model import (
    CSplineModel,
    deserialize,
    dumps,
    fit,
    load,
    loads,
    predict,
    save,
    serialize,
)
from helpers import EXAMPLE_POINTS


def _cell_data(grid, per_cell, rng):
    xs, ys = [], []
    for cell in grid.cells():
        xs.append(grid.ax + (cell.i - 1 + rng.uniform(0.02, 0.98, per_cell)) * grid.dx)
        ys.append(grid.ay + (cell.j - 1 + rng.uniform(0.02, 0.98, per_cell)) * grid.dy)
    return np.concatenate(xs), np.concatenate(ys)


def test_round_trip_recovers_coefficients(rng):
    g, c = GridSpec.unit(3, 2), SplineConfig(2, 1)
    x, y = _cell_data(g, 20, rng)
    b_true = rng.standard_normal(column_layout(g, c).m)
    z = evaluate(column_layout(g, c), x, y) @ b_true
    model = fit(Dataset(x, y, z), g, c)
    np.testing.assert_allclose(model.b, b_true, atol=1e-8)
    assert model.residual_norm <= 1e-10
    assert model.effective_rank == model.m
    np.testing.assert_allclose(model.predict(x, y), z, atol=1e-8)


def test_zero_data_gives_zero_model(rng):
    g, c = GridSpec.unit(2, 2), SplineConfig(2, 0)
    x, y = _cell_data(g, 10, rng)
    model = fit(Dataset(x, y, np.zeros_like(x)), g, c)
    assert np.all(model.b == 0) and model.residual_norm == 0


def test_worked_example_matches_normal_equations(two_cell_grid):
    z = np.array([1.0, -0.5, 2.0, 0.25, 3.0])
    pts = np.array(EXAMPLE_POINTS)
    model = fit(Dataset(pts[:, 0], pts[:, 1], z), two_cell_grid, SplineConfig(1, 0))
    A, _ = design_matrix(Dataset(pts[:, 0], pts[:, 1]), two_cell_grid, model.layout)
    np.testing.assert_allclose(model.b, np.linalg.inv(A.T @ A) @ A.T @ z, atol=1e-8)


def test_fit_errors(two_cell_grid):
    c = SplineConfig(1, 0)
    with pytest.raises(DomainError, match="empty"):
        fit(Dataset([], [], []), two_cell_grid, c)
    with pytest.raises(DomainError, match="no z"):
        fit(Dataset([0.5], [0.5]), two_cell_grid, c)
    with pytest.raises(OutOfDomainError):
        fit(Dataset([0.5, 3.0], [0.5, 0.5], [1.0, 2.0]), two_cell_grid, c)
    with pytest.raises(ValueError):
        Dataset([0.5], [0.5], [np.nan])


def test_empty_partition_warns_and_returns_min_norm(rng):
    g, c = GridSpec.unit(3, 1), SplineConfig(2, 0)
    x = rng.uniform(0, 2, 40)  # nothing in the third cell
    y = rng.uniform(0, 1, 40)
    z = np.sin(x) + y
    with pytest.warns(RankDeficiencyWarning, match=r"empty partitions k=\[3\]"):
        model = fit(Dataset(x, y, z), g, c)
    assert model.rank_deficient
    assert model.empty_partitions == (3,)
    A, _ = design_matrix(Dataset(x, y), g, model.layout)
    np.testing.assert_allclose(model.b, np.linalg.pinv(A, rcond=1e-10) @ z, atol=1e-8)


def test_predict_constant_model():
    g, c = GridSpec(-1.0, 1.0, 0.0, 5.0, 2, 3), SplineConfig(3, 1)
    layout = column_layout(g, c)
    b = np.zeros(layout.m)
    b[0] = 4.5
    model = CSplineModel(g, c, layout, b, layout.m, 0.0, 0)
    np.testing.assert_array_equal(predict(model, [(0.0, 0.0), (0.9, 4.9), (-1, 5)]), 4.5)


def test_predict_out_of_domain(rng):
    g, c = GridSpec.unit(2, 2), SplineConfig(2, 1)
    layout = column_layout(g, c)
    model = CSplineModel(g, c, layout, rng.standard_normal(layout.m), layout.m, 0.0, 0)
    with pytest.raises(OutOfDomainError, match="row 1"):
        predict(model, [(0.5, 0.5), (2.5, 0.5)])
    with pytest.warns(ExtrapolationWarning):
        z = predict(model, [(0.5, 0.5), (2.5, 0.5)], extrapolate=True)
    # outside points use the nearest cell's polynomial
    ref = evaluate(layout, [2.5], [0.5], [2], [1]) @ model.b
    assert z[1] == pytest.approx(ref[0])
    assert predict(model, np.empty((0, 2))).shape == (0,)


def test_predict_side_independent_on_boundary(rng):
    g, c = GridSpec.unit(3, 3), SplineConfig(3, 0)
    x, y = _cell_data(g, 15, rng)
    model = fit(Dataset(x, y, np.cos(x) * y), g, c)
    yb = rng.uniform(0, 3, 30)
    jb = np.ceil(yb).astype(int)
    for i in (1, 2):
        xb = np.full(30, float(i))
        lo = evaluate(model.layout, xb, yb, np.full(30, i), jb) @ model.b
        hi = evaluate(model.layout, xb, yb, np.full(30, i + 1), jb) @ model.b
        assert np.max(np.abs(lo - hi)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_lowering_smoothness_never_increases_residual(I, J, d, seed):
    rng = np.random.default_rng(seed)
    g = GridSpec.unit(I, J)
    x, y = _cell_data(g, 12, rng)
    z = np.sin(2 * x) * np.exp(-y) + 0.1 * rng.standard_normal(x.size)
    data = Dataset(x, y, z)
    residuals = [fit(data, g, SplineConfig(d, r)).residual_norm for r in range(d + 1)]
    for r in range(1, d + 1):
        assert residuals[r - 1] <= residuals[r] + 1e-12


@pytest.mark.parametrize("I, J, d", [(2, 1, 1), (3, 3, 2), (2, 3, 3)])
def test_full_smoothness_equals_global_polynomial_regression(I, J, d, rng):
    g = GridSpec(1.0, 1.0 + I, -1.0, -1.0 + J, I, J)
    x, y = _cell_data(g, 10, rng)
    z = np.exp(x / 3) - y ** 2 + 0.05 * rng.standard_normal(x.size)
    model = fit(Dataset(x, y, z), g, SplineConfig(d, d))
    mono = np.column_stack([x ** p * y ** q for p in range(d + 1) for q in range(d + 1 - p)])
    coef, *_ = np.linalg.lstsq(mono, z, rcond=None)
    np.testing.assert_allclose(model.predict(x, y), mono @ coef, atol=1e-9)


def test_serialize_round_trip_bit_identical(rng, tmp_path):
    g, c = GridSpec(0.1, 2.3, -0.7, 1.9, 3, 2), SplineConfig(3, 1)
    x, y = _cell_data(g, 10, rng)
    model = fit(Dataset(x, y, np.sin(x * y)), g, c)
    doc = serialize(model)
    assert doc["schema_version"] == 1
    assert set(doc) >= {"a_x", "b_x", "a_y", "b_y", "I", "J", "d", "r", "coefficients",
                        "effective_rank", "residual_norm", "n_points"}
    again = loads(dumps(model))
    np.testing.assert_array_equal(again.b, model.b)
    xs, ys = rng.uniform(0.1, 2.3, 50), rng.uniform(-0.7, 1.9, 50)
    np.testing.assert_array_equal(again.predict(xs, ys), model.predict(xs, ys))
    path = tmp_path / "model.json"
    save(model, path)
    np.testing.assert_array_equal(load(path).b, model.b)


def _doc():
    layout = column_layout(GridSpec.unit(2, 1), SplineConfig(1, 0))
    model = CSplineModel(layout.grid, layout.config, layout, np.arange(4.0), 4, 0.0, 5)
    return serialize(model)


def test_deserialize_wrong_coefficient_count():
    doc = _doc()
    doc["coefficients"] = doc["coefficients"][:-1]
    with pytest.raises(SchemaError, match="expected m=4"):
        deserialize(doc)


def test_deserialize_invalid_config():
    doc = _doc()
    doc["r"] = 2
    with pytest.raises(SchemaError, match="continuity order"):
        deserialize(doc)


def test_deserialize_schema_version_and_hash():
    doc = _doc()
    doc["schema_version"] = 2
    with pytest.raises(SchemaError, match="schema_version"):
        deserialize(doc)
    doc = _doc()
    doc["layout_sha256"] = "0" * 64
    with pytest.raises(SchemaError, match="layout"):
        deserialize(doc)
    doc = _doc()
    del doc["I"]
    with pytest.raises(SchemaError, match="missing"):
        deserialize(doc)
    with pytest.raises(SchemaError):
        loads("{not json")
    json.dumps(_doc())


def test_model_rejects_wrong_length():
    layout = column_layout(GridSpec.unit(2, 1), SplineConfig(1, 0))
    with pytest.raises(DomainError):
        CSplineModel(layout.grid, layout.config, layout, np.zeros(3), 3, 0.0, 0)


def test_fit_is_silent_on_full_rank(rng):
    g, c = GridSpec.unit(2, 2), SplineConfig(2, 1)
    x, y = _cell_data(g, 10, rng)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fit(Dataset(x, y, x + y), g, c)
