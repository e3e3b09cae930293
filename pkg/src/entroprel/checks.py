"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import RangeError, RowSumError, ShapeError
from .model import ROW_SUM_TOLERANCE


def check_stress_matrix(X, n_components=None, row_tol=ROW_SUM_TOLERANCE):
    """Validate a ``(n_components, n_levels)`` stress matrix.

    Parameters
    ----------
    X : array-like of shape (n_components, n_levels)
        Row ``i`` is the distribution of component ``i`` over stress levels.
    n_components : int, optional
        Required number of rows.
    row_tol : float
        Rows may deviate from summing to 1 by at most this much; they are
        renormalised.

    Returns
    -------
    ndarray of float64, rows summing to 1.
    """
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_min_samples=1, ensure_min_features=1)
    if n_components is not None and X.shape[0] != n_components:
        raise ShapeError(f"expected {n_components} component rows, got {X.shape[0]}")
    if np.any((X < 0) | (X > 1)):
        raise RangeError("stress probabilities must lie in [0, 1]")
    sums = X.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > row_tol)
    if bad.size:
        i = int(bad[0])
        raise RowSumError(f"row sums to {sums[i]:.9g}, expected 1", field=f"stress_matrix[{i}]")
    return X / sums[:, None]


def check_unit_losses(unit_losses, n_components):
    ul = check_array(np.atleast_1d(np.asarray(unit_losses, dtype=float)), ensure_2d=False, dtype=np.float64)
    if ul.ndim != 1 or ul.shape[0] != n_components:
        raise ShapeError(f"expected {n_components} unit losses, got shape {ul.shape}")
    if np.any(ul < 1):
        raise RangeError("unit losses must be >= 1")
    return ul
