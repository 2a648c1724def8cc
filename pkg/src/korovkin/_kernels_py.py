"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def sliding_extrema(values, window):
    """Max and min of ``values[i:i + window + 1]`` for every full window.

    Uses a doubling table, O(N log window).
    """
    values = np.ascontiguousarray(values, dtype=float)
    n = values.size
    if window < 0 or window >= n:
        raise ValueError("window must satisfy 0 <= window < len(values)")
    span = window + 1
    hi = values.copy()
    lo = values.copy()
    cover = 1
    # hi[i] = max(values[i:i+cover]) while cover doubles up to span
    while cover * 2 <= span:
        hi = np.maximum(hi[:-cover], hi[cover:])
        lo = np.minimum(lo[:-cover], lo[cover:])
        cover *= 2
    m = n - window
    shift = span - cover
    out_max = np.maximum(hi[:m], hi[shift:shift + m])
    out_min = np.minimum(lo[:m], lo[shift:shift + m])
    return out_max, out_min


def interval_power_sup(prefix, cell_width, len_exponent, root):
    """max over 0 <= i < j <= N of ((j-i)h)**len_exponent * (S_j - S_i)**root."""
    prefix = np.asarray(prefix, dtype=float)
    n = prefix.size - 1
    best, bi, bj = -1.0, 0, 1
    for d in range(1, n + 1):
        diffs = prefix[d:] - prefix[:-d]
        arg = int(np.argmax(diffs))
        dmax = max(float(diffs[arg]), 0.0)
        val = (d * cell_width) ** len_exponent * dmax ** root
        if val > best:
            best, bi, bj = val, arg, arg + d
    return best, bi, bj


def muckenhoupt_sup(prefix_w, prefix_dual, cell_width, p):
    """max over grid intervals of avg(w) * avg(w**(-1/(p-1)))**(p-1)."""
    prefix_w = np.asarray(prefix_w, dtype=float)
    prefix_dual = np.asarray(prefix_dual, dtype=float)
    n = prefix_w.size - 1
    best, bi, bj = -1.0, 0, 1
    for d in range(1, n + 1):
        length = d * cell_width
        aw = (prefix_w[d:] - prefix_w[:-d]) / length
        ad = np.maximum((prefix_dual[d:] - prefix_dual[:-d]) / length, 0.0)
        vals = aw * ad ** (p - 1.0)
        arg = int(np.argmax(vals))
        if vals[arg] > best:
            best, bi, bj = float(vals[arg]), arg, arg + d
    return best, bi, bj
