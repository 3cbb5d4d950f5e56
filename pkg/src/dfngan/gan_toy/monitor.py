"""Collapse-onset detection on a difference-DFN trace."""

import numpy as np

from ..exceptions import TraceTooShort

CONSECUTIVE = 3


def rolling_slopes(iters, values, window):
    """Least-squares slope over each run of ``window`` consecutive rows."""
    x = np.asarray(iters, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    count = x.size - window + 1
    out = np.empty(count)
    for i in range(count):
        xs = x[i:i + window]
        ys = y[i:i + window]
        xc = xs - xs.mean()
        out[i] = np.dot(xc, ys - ys.mean()) / np.dot(xc, xc)
    return out


def detect_collapse(trace, window=50, slope_thresh=0.5):
    """First iteration where the ``diff_dfn`` trend turns into sustained growth.

    The slope of a least-squares line is taken over every ``window``-row
    run. Onset is flagged at the first run that starts ``CONSECUTIVE``
    successive runs above ``slope_thresh``; the reported iteration is the
    middle row of that run. Returns ``None`` if it never happens.
    """
    iters = trace.column("iter")
    values = trace.column("diff_dfn")
    if window < 2:
        raise ValueError("window must be >= 2")
    if len(iters) < 2 * window:
        raise TraceTooShort(f"{len(iters)} rows, need at least {2 * window}")
    slopes = rolling_slopes(iters, values, window)
    above = slopes > slope_thresh
    run = 0
    for i, flag in enumerate(above):
        run = run + 1 if flag else 0
        if run == CONSECUTIVE:
            start = i - CONSECUTIVE + 1
            return int(iters[start + window // 2])
    return None
