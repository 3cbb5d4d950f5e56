"""Input checks shared by the public functions and estimators."""

import numpy as np

from .exceptions import DimensionMismatch, EmptyBatch, NonFinite, NonSquare


def check_matrix(x, name="x"):
    """Return ``x`` as a finite 2-D float64 array (copy only when needed)."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return a


def check_square(x, name="x"):
    a = check_matrix(x, name)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"{name} is {a.shape[0]}x{a.shape[1]}, expected square")
    return a


def check_square_batch(batch, name="batch"):
    """Stack a sequence of equally sized square matrices into an (m, n, n) array."""
    items = list(batch)
    if not items:
        raise EmptyBatch(f"{name} is empty")
    mats = [check_square(m, name) for m in items]
    n = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != n:
            raise DimensionMismatch(f"{name} mixes {n}x{n} and {m.shape[0]}x{m.shape[0]} matrices")
    return np.stack(mats)
