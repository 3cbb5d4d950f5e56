"""Plain-text matrix interchange.

The first line holds ``rows cols``; each following line holds one row of
space-separated values written with 17 significant digits, enough for an
exact float64 round trip.
"""

import numpy as np

from ._validation import check_matrix
from .exceptions import CorruptHeader, DimensionMismatch


def save_matrix(path, x):
    a = check_matrix(x)
    rows, cols = a.shape
    lines = [f"{rows} {cols}"]
    lines.extend(" ".join(format(v, ".17g") for v in row) for row in a)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_matrix(path):
    """Read a matrix written by :func:`save_matrix`.

    Raises
    ------
    CorruptHeader
        If the size line is missing or malformed.
    DimensionMismatch
        If the body does not match the declared size.
    """
    with open(path) as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise CorruptHeader(f"{path}: empty matrix file")
    head = lines[0].split()
    try:
        rows, cols = (int(t) for t in head)
    except ValueError:
        raise CorruptHeader(f"{path}: expected 'rows cols', got {lines[0]!r}") from None
    if rows < 1 or cols < 1:
        raise CorruptHeader(f"{path}: nonpositive size {rows}x{cols}")
    body = lines[1:]
    if len(body) != rows:
        raise DimensionMismatch(f"{path}: header says {rows} rows, found {len(body)}")
    out = np.empty((rows, cols))
    for i, ln in enumerate(body):
        vals = ln.split()
        if len(vals) != cols:
            raise DimensionMismatch(f"{path}: row {i} has {len(vals)} values, expected {cols}")
        try:
            out[i] = [float(v) for v in vals]
        except ValueError:
            raise CorruptHeader(f"{path}: row {i} is not numeric") from None
    return check_matrix(out)
