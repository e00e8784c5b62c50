from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Dataset"]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Observed triples ``(x_n, y_n, z_n)`` stored as parallel float arrays.

    ``z`` may be omitted for prediction inputs.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray | None = None

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float)).ravel()
        y = np.atleast_1d(np.asarray(self.y, dtype=float)).ravel()
        if x.shape != y.shape:
            raise ValueError(f"x has {x.size} entries but y has {y.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if self.z is not None:
            z = np.atleast_1d(np.asarray(self.z, dtype=float)).ravel()
            if z.shape != x.shape:
                raise ValueError(f"x has {x.size} entries but z has {z.size}")
            object.__setattr__(self, "z", z)
        for name in ("x", "y", "z"):
            arr = getattr(self, name)
            if arr is not None and not np.all(np.isfinite(arr)):
                row = int(np.flatnonzero(~np.isfinite(arr))[0])
                raise ValueError(f"row {row}: non-finite {name} value {arr[row]!r}")

    @classmethod
    def from_points(cls, points) -> "Dataset":
        """Build from a sequence of ``(x, y)`` or ``(x, y, z)`` tuples."""
        arr = np.asarray(points, dtype=float)
        if arr.size == 0:
            return cls(np.empty(0), np.empty(0), None if arr.ndim < 2 or arr.shape[-1] != 3 else np.empty(0))
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise ValueError(f"expected an (N, 2) or (N, 3) array, got shape {arr.shape}")
        return cls(arr[:, 0], arr[:, 1], arr[:, 2] if arr.shape[1] == 3 else None)

    def __len__(self):
        return self.x.size
