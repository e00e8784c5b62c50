"""Least-squares fitting, prediction and model documents."""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .basis import BasisLayout, SplineConfig, column_layout, design_matrix, evaluate
from .dataset import Dataset
from .exceptions import (
    DomainError,
    ExtrapolationWarning,
    RankDeficiencyWarning,
    SchemaError,
)
from .grid import GridSpec

__all__ = [
    "SCHEMA_VERSION",
    "CSplineModel",
    "fit",
    "predict",
    "serialize",
    "deserialize",
    "dumps",
    "loads",
    "save",
    "load",
    "layout_hash",
]

SCHEMA_VERSION = 1


def layout_hash(layout: BasisLayout) -> str:
    text = "\n".join(c.label() for c in layout.columns)
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class CSplineModel:
    """Fitted C-spline: grid, configuration and coefficient vector ``b``.

    ``empty_partitions`` lists cells (by ``k``) that received no data; it is
    only populated by :func:`fit`.
    """

    grid: GridSpec
    config: SplineConfig
    layout: BasisLayout
    b: np.ndarray
    effective_rank: int
    residual_norm: float
    n_points: int
    empty_partitions: tuple = ()

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).ravel()
        object.__setattr__(self, "b", b)
        if self.layout.grid != self.grid or self.layout.config != self.config:
            raise DomainError("layout does not belong to the model's grid/config")
        if b.size != self.layout.m:
            raise DomainError(f"expected {self.layout.m} coefficients, got {b.size}")

    @property
    def m(self) -> int:
        return self.layout.m

    @property
    def rank_deficient(self) -> bool:
        return self.effective_rank < self.m

    def predict(self, x, y, extrapolate: bool = False) -> np.ndarray:
        return predict(self, np.column_stack([np.ravel(x), np.ravel(y)]), extrapolate)


def fit(data: Dataset, grid: GridSpec, config: SplineConfig,
        tol: float = linalg.DEFAULT_TOL) -> CSplineModel:
    """Least-squares C-spline fit.

    Rank-deficient systems (typically cells without data) yield the
    minimum-norm solution and a :class:`RankDeficiencyWarning`.

    Raises
    ------
    DomainError
        If the dataset is empty or lacks ``z`` values.
    OutOfDomainError
        If any point lies outside the grid.
    """
    if not isinstance(data, Dataset):
        data = Dataset.from_points(data)
    if len(data) == 0:
        raise DomainError("cannot fit an empty dataset")
    if data.z is None:
        raise DomainError("dataset has no z values")
    layout = column_layout(grid, config)
    A, rows = design_matrix(data, grid, layout)
    b, rank, residual = linalg.least_squares(A, data.z, tol)
    counts = np.bincount(rows, minlength=grid.K + 1)[1:]
    empty = tuple(int(k) for k in np.flatnonzero(counts == 0) + 1)
    if rank < layout.m:
        msg = f"design matrix rank {rank} < {layout.m} basis columns; returning minimum-norm solution"
        if empty:
            msg += f"; empty partitions k={list(empty)}"
        warnings.warn(msg, RankDeficiencyWarning, stacklevel=2)
    return CSplineModel(grid, config, layout, b, rank, residual, len(data), empty)


def predict(model: CSplineModel, points, extrapolate: bool = False) -> np.ndarray:
    """Evaluate the fitted spline at ``(x, y)`` points.

    With ``extrapolate=True`` points outside the domain are evaluated with
    the polynomial of the nearest cell and an :class:`ExtrapolationWarning`
    is issued; otherwise they raise :class:`OutOfDomainError`.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return np.zeros(0)
    pts = pts.reshape(-1, pts.shape[-1])
    x, y = pts[:, 0], pts[:, 1]
    if extrapolate:
        outside = int(np.count_nonzero(~model.grid.contains(x, y)))
        if outside:
            warnings.warn(f"{outside} point(s) outside the domain were extrapolated",
                          ExtrapolationWarning, stacklevel=2)
    return evaluate(model.layout, x, y, clamp=extrapolate) @ model.b


def serialize(model: CSplineModel) -> dict:
    g, c = model.grid, model.config
    return {
        "schema_version": SCHEMA_VERSION,
        "a_x": g.ax,
        "b_x": g.bx,
        "a_y": g.ay,
        "b_y": g.by,
        "I": g.I,
        "J": g.J,
        "d": c.d,
        "r": c.r,
        "layout_sha256": layout_hash(model.layout),
        "coefficients": [float(v) for v in model.b],
        "effective_rank": int(model.effective_rank),
        "residual_norm": float(model.residual_norm),
        "n_points": int(model.n_points),
    }


_REQUIRED = ("a_x", "b_x", "a_y", "b_y", "I", "J", "d", "r", "coefficients",
             "effective_rank", "residual_norm", "n_points")


def deserialize(document: dict) -> CSplineModel:
    """Rebuild a model, re-checking every invariant."""
    if not isinstance(document, dict):
        raise SchemaError("model document must be a JSON object")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")
    missing = [key for key in _REQUIRED if key not in document]
    if missing:
        raise SchemaError(f"model document missing fields: {', '.join(missing)}")
    try:
        grid = GridSpec(document["a_x"], document["b_x"], document["a_y"], document["b_y"],
                        document["I"], document["J"])
        config = SplineConfig(document["d"], document["r"])
    except (DomainError, TypeError) as exc:
        raise SchemaError(f"invalid model document: {exc}") from exc
    layout = column_layout(grid, config)
    coefficients = document["coefficients"]
    if not isinstance(coefficients, list) or len(coefficients) != layout.m:
        got = len(coefficients) if isinstance(coefficients, list) else type(coefficients).__name__
        raise SchemaError(f"expected m={layout.m} coefficients, got {got}")
    expected_hash = document.get("layout_sha256")
    if expected_hash is not None and expected_hash != layout_hash(layout):
        raise SchemaError("layout_sha256 does not match the canonical column layout")
    b = np.array(coefficients, dtype=float)
    if not np.all(np.isfinite(b)):
        raise SchemaError("coefficients must be finite")
    return CSplineModel(grid, config, layout, b, int(document["effective_rank"]),
                        float(document["residual_norm"]), int(document["n_points"]))


def dumps(model: CSplineModel) -> str:
    return json.dumps(serialize(model), indent=2) + "\n"


def loads(text: str) -> CSplineModel:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model document is not valid JSON: {exc}") from exc
    return deserialize(document)


def save(model: CSplineModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def load(path) -> CSplineModel:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
