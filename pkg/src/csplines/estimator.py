"""scikit-learn wrappers around the C-spline basis and fit."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import linalg
from .basis import SplineConfig, column_layout, evaluate
from .dataset import Dataset
from .grid import GridSpec
from .model import fit as fit_model
from .model import predict as predict_model

__all__ = ["CSplineFeatures", "CSplineRegressor"]


def _grid_from(X, bounds, n_x_cells, n_y_cells):
    if bounds is None:
        lo, hi = X.min(axis=0), X.max(axis=0)
        # a degenerate axis still needs a positive width
        flat = hi <= lo
        lo = np.where(flat, lo - 0.5, lo)
        hi = np.where(flat, hi + 0.5, hi)
        bounds = (lo[0], hi[0], lo[1], hi[1])
    ax, bx, ay, by = bounds
    return GridSpec(ax, bx, ay, by, n_x_cells, n_y_cells)


def _check_two_columns(X):
    if X.shape[1] != 2:
        raise ValueError(f"C-splines take exactly 2 input features, got n_features = {X.shape[1]}")


class CSplineFeatures(TransformerMixin, BaseEstimator):
    """Expand ``(x, y)`` pairs into the C-spline design matrix.

    Parameters
    ----------
    n_x_cells, n_y_cells : int, default=1
        Number of equal-width cells along each axis.
    degree : int, default=3
        Total polynomial degree per cell.
    smoothness : int, default=2
        Continuity order across cell edges, ``<= degree``.
    bounds : tuple of 4 floats, optional
        ``(ax, bx, ay, by)``.  Inferred from the training data if omitted.
    extrapolate : bool, default=False
        Evaluate out-of-domain points in the nearest cell instead of raising.

    Attributes
    ----------
    grid_ : GridSpec
    layout_ : BasisLayout
    n_features_in_ : int
    """

    def __init__(self, n_x_cells=1, n_y_cells=1, degree=3, smoothness=2, bounds=None,
                 extrapolate=False):
        self.n_x_cells = n_x_cells
        self.n_y_cells = n_y_cells
        self.degree = degree
        self.smoothness = smoothness
        self.bounds = bounds
        self.extrapolate = extrapolate

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        _check_two_columns(X)
        self.n_features_in_ = X.shape[1]
        self.grid_ = _grid_from(X, self.bounds, self.n_x_cells, self.n_y_cells)
        self.layout_ = column_layout(self.grid_, SplineConfig(self.degree, self.smoothness))
        return self

    def transform(self, X):
        check_is_fitted(self, "layout_")
        X = check_array(X, dtype=float)
        _check_two_columns(X)
        return evaluate(self.layout_, X[:, 0], X[:, 1], clamp=self.extrapolate)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "layout_")
        return np.array([c.label().replace(" ", "_") for c in self.layout_.columns], dtype=object)


class CSplineRegressor(RegressorMixin, BaseEstimator):
    """Piecewise-polynomial surface regression with built-in continuity.

    Parameters
    ----------
    n_x_cells, n_y_cells, degree, smoothness, bounds, extrapolate
        As for :class:`CSplineFeatures`; ``extrapolate`` applies to
        :meth:`predict` only, training points must lie inside ``bounds``.
    tol : float, default=1e-10
        Relative rank threshold of the least-squares solver.

    Attributes
    ----------
    model_ : CSplineModel
    coef_ : ndarray of shape (m,)
    rank_ : int
    empty_partitions_ : tuple of int
    """

    def __init__(self, n_x_cells=1, n_y_cells=1, degree=3, smoothness=2, bounds=None,
                 tol=linalg.DEFAULT_TOL, extrapolate=False):
        self.n_x_cells = n_x_cells
        self.n_y_cells = n_y_cells
        self.degree = degree
        self.smoothness = smoothness
        self.bounds = bounds
        self.tol = tol
        self.extrapolate = extrapolate

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        _check_two_columns(X)
        self.n_features_in_ = X.shape[1]
        grid = _grid_from(X, self.bounds, self.n_x_cells, self.n_y_cells)
        config = SplineConfig(self.degree, self.smoothness)
        self.model_ = fit_model(Dataset(X[:, 0], X[:, 1], y), grid, config, self.tol)
        self.grid_ = grid
        self.layout_ = self.model_.layout
        self.coef_ = self.model_.b
        self.rank_ = self.model_.effective_rank
        self.empty_partitions_ = self.model_.empty_partitions
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=float)
        _check_two_columns(X)
        return predict_model(self.model_, X, extrapolate=self.extrapolate)
