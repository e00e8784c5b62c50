"""Cartesian splines: C^r piecewise polynomials on rectangular grids."""
from .basis import (
    GLOBAL,
    BasisLayout,
    ColumnDescriptor,
    SplineConfig,
    basis_dimension,
    column_layout,
    design_matrix,
    eval_row,
    eval_row_deriv,
    evaluate,
)
from .dataset import Dataset
from .estimator import CSplineFeatures, CSplineRegressor
from .exceptions import (
    CSplineError,
    DomainError,
    ExtrapolationWarning,
    OutOfDomainError,
    RankDeficiencyWarning,
    SchemaError,
)
from .grid import GridSpec, PartitionId, locate, locate_many, partition_coords, partition_index
from .model import CSplineModel, fit, predict

__version__ = "0.1.0"

__all__ = [
    "GLOBAL",
    "BasisLayout",
    "ColumnDescriptor",
    "CSplineError",
    "CSplineFeatures",
    "CSplineModel",
    "CSplineRegressor",
    "Dataset",
    "DomainError",
    "ExtrapolationWarning",
    "GridSpec",
    "OutOfDomainError",
    "PartitionId",
    "RankDeficiencyWarning",
    "SchemaError",
    "SplineConfig",
    "basis_dimension",
    "column_layout",
    "design_matrix",
    "eval_row",
    "eval_row_deriv",
    "evaluate",
    "fit",
    "locate",
    "locate_many",
    "partition_coords",
    "partition_index",
    "predict",
]
