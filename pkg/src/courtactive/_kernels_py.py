"""Numpy implementations of the hot kernels (fallback when the extension is absent)."""

from __future__ import annotations

import numpy as np


def run_spans(cond: np.ndarray, t: np.ndarray, period: int) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive (start, end) indices of maximal runs of ``cond``.

    A gap in ``t`` wider than ``period`` splits a run.
    """
    c = np.asarray(cond, dtype=bool)
    n = c.size
    if n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    linked = np.zeros(n, dtype=bool)
    linked[1:] = c[1:] & c[:-1] & (np.diff(t) <= period)
    starts = np.flatnonzero(c & ~linked)
    ends_flag = c.copy()
    ends_flag[:-1] &= ~linked[1:]
    ends = np.flatnonzero(ends_flag)
    return starts.astype(np.int64), ends.astype(np.int64)


def fill_spans(n: int, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    marks = np.zeros(n + 1, dtype=np.int64)
    np.add.at(marks, starts, 1)
    np.add.at(marks, np.asarray(ends) + 1, -1)
    return (np.cumsum(marks[:-1]) > 0).astype(np.uint8)


def mark_long_runs(cond: np.ndarray, t: np.ndarray, period: int, min_duration: int) -> np.ndarray:
    starts, ends = run_spans(cond, t, period)
    t = np.asarray(t)
    long_enough = t[ends] - t[starts] + period >= min_duration
    return fill_spans(len(t), starts[long_enough], ends[long_enough])


def assign_ord(codes: np.ndarray, transition: int) -> np.ndarray:
    codes = np.asarray(codes)
    fires = np.zeros(codes.size, dtype=np.int64)
    if codes.size > 1:
        fires[1:] = (codes[:-1] == transition) & (codes[1:] != transition)
    return 1 + np.cumsum(fires)
