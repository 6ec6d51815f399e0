"""Line-shape and trace analysis helpers for magnon_benchkit.

Public API:
  find_dips(x, y, prominence=None) -> indices of local minima
  find_peaks(x, y, prominence=None) -> indices of local maxima
  crossing(x, y, idx, level, direction) -> x where y crosses level
  half_widths(x, y, idx, level) -> (left, right) crossing positions
  node_period(t, energy) -> mean spacing of the nodes of an oscillating trace
  node_extinction_db(energy) -> depth of the first node below the preceding peak
"""

from __future__ import annotations

import math

import numpy as np
from scipy import signal

__all__ = [
    "find_dips",
    "find_peaks",
    "crossing",
    "half_widths",
    "node_period",
    "node_extinction_db",
]


def _np_array(x):
    return x if isinstance(x, np.ndarray) else np.asarray(x)


def _default_prominence(y: np.ndarray) -> float:
    span = float(np.ptp(y)) if y.size else 0.0
    return 0.02 * span


def find_dips(x, y, prominence: float | None = None) -> np.ndarray:
    y = _np_array(y).astype(float)
    if y.size < 3:
        return np.array([], dtype=int)
    prom = _default_prominence(y) if prominence is None else prominence
    idx, _ = signal.find_peaks(-y, prominence=prom)
    return idx


def find_peaks(x, y, prominence: float | None = None) -> np.ndarray:
    y = _np_array(y).astype(float)
    if y.size < 3:
        return np.array([], dtype=int)
    prom = _default_prominence(y) if prominence is None else prominence
    idx, _ = signal.find_peaks(y, prominence=prom)
    return idx


def crossing(x, y, idx: int, level: float, direction: int) -> float:
    """Walk from ``idx`` in ``direction`` (-1 or +1) to the first crossing of ``level``.

    Returns the linearly interpolated x position, or nan if none is found.
    """
    f = _np_array(x).astype(float)
    a = _np_array(y).astype(float)
    prev_f = f[idx]
    prev_v = a[idx]
    stop = -1 if direction < 0 else f.size
    for i in range(idx + direction, stop, direction):
        cur_f = f[i]
        cur_v = a[i]
        if (prev_v >= level and cur_v <= level) or (prev_v <= level and cur_v >= level):
            if cur_v != prev_v:
                frac = (level - prev_v) / (cur_v - prev_v)
                return float(prev_f + frac * (cur_f - prev_f))
            return float(cur_f)
        prev_f, prev_v = cur_f, cur_v
    return float("nan")


def half_widths(x, y, idx: int, level: float) -> tuple[float, float]:
    return crossing(x, y, idx, level, -1), crossing(x, y, idx, level, +1)


def _node_times(t: np.ndarray, e: np.ndarray) -> np.ndarray:
    nodes = find_dips(None, e, prominence=0.0)
    times = []
    step = float(t[1] - t[0]) if t.size > 1 else 0.0
    for k in nodes:
        lo, mid, hi = e[k - 1], e[k], e[k + 1]
        denom = lo - 2.0 * mid + hi
        shift = 0.5 * (lo - hi) / denom if denom > 0 else 0.0
        times.append(t[k] + shift * step)
    return np.asarray(times, dtype=float)


def node_period(t, energy) -> float:
    """Mean spacing of the nodes of an oscillating energy trace on a uniform grid.

    Node positions are refined by parabolic interpolation. Returns nan when the
    trace has fewer than two nodes.
    """
    t = _np_array(t).astype(float)
    e = _np_array(energy).astype(float)
    times = _node_times(t, e)
    if times.size < 2:
        return math.nan
    return float(np.mean(np.diff(times)))


def node_extinction_db(energy) -> float:
    """10 log10(peak / node) for the first node of an oscillating trace.

    The peak is the largest value before the node. Returns nan when the trace
    has no node; a node at exactly zero energy gives inf.
    """
    e = _np_array(energy).astype(float)
    nodes = find_dips(None, e, prominence=0.0)
    if nodes.size == 0:
        return float("nan")
    node = int(nodes[0])
    peak = float(np.max(e[: node + 1]))
    low = float(e[node])
    if low <= 0:
        return float("inf")
    return 10.0 * math.log10(peak / low)
