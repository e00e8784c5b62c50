import numpy as np

# (x, y) of the five worked-example points in units of the cell widths
EXAMPLE_POINTS = [(1.1, 0.3), (1.2, 0.7), (0.1, 0.3), (0.5, 0.1), (1.7, 0.8)]

EXAMPLE_MATRIX = np.array([
    [1, 0.3, 0, 0.1],
    [1, 0.7, 0, 0.2],
    [1, 0.3, -0.9, 0],
    [1, 0.1, -0.5, 0],
    [1, 0.8, 0, 0.7],
])


def to_paper_columns(A):
    """Map the canonical 4-column layout onto the worked example's columns.

    Canonical order is 1, y, u_1, u_2; the example's last column is the
    second-cell-only block, i.e. ``u_2 - u_1`` restricted to active rows.
    """
    out = np.array(A, dtype=float, copy=True)
    out[:, 3] = A[:, 3] - A[:, 2]
    return out
