"""Reference kernels in plain Python, used when the compiled module is absent."""

import numpy as np


def classify_points(lons, lats, bounds):
    """Region index per point, or ``len(bounds)`` when no region contains it.

    ``bounds`` rows are ``(min_long, max_long, min_lat, max_lat)``; the
    comparisons are strict, so edge points fall outside.
    """
    rows = [tuple(r) for r in np.asarray(bounds, dtype=np.float64).tolist()]
    none = len(rows)
    out = np.empty(len(lons), dtype=np.int32)
    for i, (x, y) in enumerate(zip(np.asarray(lons).tolist(), np.asarray(lats).tolist())):
        cls = none
        for j, (x0, x1, y0, y1) in enumerate(rows):
            if x0 < x < x1 and y0 < y < y1:
                cls = j
                break
        out[i] = cls
    return out


def run_table(table, classes, start):
    """State index after each event, starting from ``start``."""
    rows = np.asarray(table).tolist()
    state = int(start)
    out = np.empty(len(classes), dtype=np.int32)
    for i, c in enumerate(np.asarray(classes).tolist()):
        state = rows[state][c]
        out[i] = state
    return out
