"""ROC-style tuning of the low-speed filter.

For every speed threshold the spell duration is swept to trace an ROC curve
(positive class = inactive second). The speed threshold with the largest area
under that curve is kept, then the duration maximizing Youden's index at that
speed. Rates and areas are computed exactly as fractions and only converted
to floats for output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import RangeError, TuningError, UndefinedRateError
from .filters import FilterParams, criterion_free_throw, criterion_not_five, filter_measurements, frame_max_speed
from .ground_truth import ActivityTimeline, ConfusionCounts, PredictionTimeline, aggregate_predictions, majority_inactive, second_of
from .ingest import GridSpec
from .model import FIBA_COURT, FRAME_PERIOD_MS, CourtGeometry, Tracking, as_tracking

Rate = Fraction | float


def confusion(pred: PredictionTimeline, truth: ActivityTimeline) -> ConfusionCounts:
    if pred.duration_s != truth.duration_s:
        raise RangeError(f"prediction covers {pred.duration_s} s but truth covers {truth.duration_s} s")
    p, t = pred.inactive, truth.inactive
    return ConfusionCounts(
        tp=int(np.count_nonzero(p & t)),
        tn=int(np.count_nonzero(~p & ~t)),
        fp=int(np.count_nonzero(p & ~t)),
        fn=int(np.count_nonzero(~p & t)),
    )


def sensitivity(c: ConfusionCounts) -> Fraction:
    if c.tp + c.fn == 0:
        raise UndefinedRateError("sensitivity undefined: no positive (inactive) seconds in truth")
    return Fraction(c.tp, c.tp + c.fn)


def specificity(c: ConfusionCounts) -> Fraction:
    if c.tn + c.fp == 0:
        raise UndefinedRateError("specificity undefined: no negative (active) seconds in truth")
    return Fraction(c.tn, c.tn + c.fp)


def youden(sens: Rate, spec: Rate) -> Rate:
    return sens + spec - 1


@dataclass(frozen=True)
class RocPoint:
    fpr: Rate
    tpr: Rate
    t_vel_ms: int | None = None

    def __post_init__(self):
        if not (0 <= self.fpr <= 1 and 0 <= self.tpr <= 1):
            raise ValueError(f"ROC rates out of [0, 1]: ({self.fpr}, {self.tpr})")

    @classmethod
    def from_counts(cls, c: ConfusionCounts, t_vel_ms: int | None = None) -> "RocPoint":
        return cls(1 - specificity(c), sensitivity(c), t_vel_ms)


def auc_exact(points: Iterable[RocPoint]) -> Fraction:
    """Trapezoidal area under the ROC curve closed by the (0,0) and (1,1) anchors."""
    pts = sorted((Fraction(p.fpr), Fraction(p.tpr)) for p in points)
    pts = [(Fraction(0), Fraction(0)), *pts, (Fraction(1), Fraction(1))]
    area = Fraction(0)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        area += (x1 - x0) * (y0 + y1) / 2
    return area


def auc(points: Iterable[RocPoint]) -> float:
    return float(auc_exact(points))


def roc_for_vmin(
    v_min_kmh: float,
    t_vel_grid: Sequence[int],
    x,
    geom: CourtGeometry,
    t_ft_ms: int,
    truth: ActivityTimeline,
) -> list[RocPoint]:
    """ROC points for one speed threshold, running the full filter pipeline per duration."""
    x = as_tracking(x)
    points = []
    for t_vel in t_vel_grid:
        _, mask = filter_measurements(x, geom, FilterParams(t_ft_ms, v_min_kmh, t_vel))
        pred = aggregate_predictions(mask, truth.duration_s)
        points.append(RocPoint.from_counts(confusion(pred, truth), t_vel))
    return points


class _Sweep:
    """Quantities shared by every grid cell, computed once from the raw stream."""

    def __init__(self, x: Tracking, geom: CourtGeometry, t_ft_ms: int, truth: ActivityTimeline):
        self.t = x.t
        self.n = len(x)
        duration = truth.duration_s
        sec = second_of(x.t)
        self.inside = (sec >= 1) & (sec <= duration)
        self.sec_idx = sec[self.inside] - 1
        self.duration = duration
        self.frames_per_sec = np.bincount(self.sec_idx, minlength=duration)[:duration]
        self.base = criterion_not_five(x, geom) | criterion_free_throw(x, geom, t_ft_ms)
        self.max_speed = frame_max_speed(x, geom)
        self.truth = truth.inactive

    def row(self, v_min: float, t_vels: Sequence[int]) -> list[ConfusionCounts]:
        starts, ends = kernels.run_spans(self.max_speed < v_min, self.t, FRAME_PERIOD_MS)
        lengths = self.t[ends] - self.t[starts] + FRAME_PERIOD_MS
        out = []
        for t_vel in t_vels:
            keep = lengths >= t_vel
            dropped = self.base | kernels.fill_spans(self.n, starts[keep], ends[keep])
            per_sec = np.bincount(self.sec_idx, weights=dropped[self.inside], minlength=self.duration)[: self.duration]
            p = majority_inactive(per_sec, self.frames_per_sec)
            t = self.truth
            out.append(
                ConfusionCounts(
                    tp=int(np.count_nonzero(p & t)),
                    tn=int(np.count_nonzero(~p & ~t)),
                    fp=int(np.count_nonzero(p & ~t)),
                    fn=int(np.count_nonzero(~p & t)),
                )
            )
        return out


@dataclass(frozen=True)
class TuningResult:
    v_min_values: tuple[float, ...]
    t_vel_values: tuple[int, ...]
    auc_by_vmin: tuple[Fraction, ...]
    v_min_star: float
    auc_star: Fraction
    youden_by_tvel: tuple[Fraction, ...]
    t_vel_star: int
    youden_star: Fraction
    grid: dict[tuple[float, int], ConfusionCounts]

    def roc_points(self, v_min: float) -> list[RocPoint]:
        return [RocPoint.from_counts(self.grid[v_min, t], t) for t in self.t_vel_values]

    def youden_rows(self) -> list[tuple[int, Fraction, Fraction, Fraction]]:
        rows = []
        for t in self.t_vel_values:
            c = self.grid[self.v_min_star, t]
            sens, spec = sensitivity(c), specificity(c)
            rows.append((t, sens, spec, youden(sens, spec)))
        return rows


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def tune(
    x,
    geom: CourtGeometry = FIBA_COURT,
    t_ft_ms: int = 10_000,
    truth: ActivityTimeline | None = None,
    grids: GridSpec = GridSpec(),
    workers: int | None = None,
) -> TuningResult:
    """Exhaustive (V_min, T_vel) sweep; argmax ties go to the smaller value."""
    if truth is None:
        raise TuningError("tuning needs a ground-truth activity timeline")
    n_pos = int(np.count_nonzero(truth.inactive))
    n_neg = truth.duration_s - n_pos
    if n_pos == 0 or n_neg == 0:
        missing = "inactive" if n_pos == 0 else "active"
        raise TuningError(f"ground truth has no {missing} seconds; every rate in the grid is undefined")
    x = as_tracking(x)
    v_values = grids.v_min_values()
    t_values = grids.t_vel_values()
    sweep = _Sweep(x, geom, t_ft_ms, truth)
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1:
        rows = [sweep.row(v, t_values) for v in v_values]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: sweep.row(v, t_values), v_values))

    grid = {(v, t): c for v, row in zip(v_values, rows) for t, c in zip(t_values, row)}
    aucs = [auc_exact(RocPoint.from_counts(c, t) for t, c in zip(t_values, row)) for row in rows]
    best_v = int(np.argmax([a == max(aucs) for a in aucs]))
    best_row = rows[best_v]
    js = [youden(sensitivity(c), specificity(c)) for c in best_row]
    best_t = int(np.argmax([j == max(js) for j in js]))
    return TuningResult(
        v_min_values=tuple(v_values),
        t_vel_values=tuple(t_values),
        auc_by_vmin=tuple(aucs),
        v_min_star=v_values[best_v],
        auc_star=aucs[best_v],
        youden_by_tvel=tuple(js),
        t_vel_star=t_values[best_t],
        youden_star=js[best_t],
        grid=grid,
    )


def format_seconds(ms: int) -> str:
    return str(ms // 1000) if ms % 1000 == 0 else repr(ms / 1000)


def _f(value) -> str:
    return repr(float(value))


def write_auc_table(result: TuningResult, fh) -> None:
    fh.write("v_min_kmh,auc\n")
    for v, a in zip(result.v_min_values, result.auc_by_vmin):
        fh.write(f"{v!r},{_f(a)}\n")


def write_youden_table(result: TuningResult, fh) -> None:
    fh.write("t_vel_s,sensitivity,specificity,youden\n")
    for t, sens, spec, j in result.youden_rows():
        fh.write(f"{format_seconds(t)},{_f(sens)},{_f(spec)},{_f(j)}\n")


def write_grid(result: TuningResult, fh) -> None:
    fh.write("v_min_kmh,t_vel_s,tp,tn,fp,fn,sensitivity,specificity\n")
    for v in result.v_min_values:
        for t in result.t_vel_values:
            c = result.grid[v, t]
            fh.write(
                f"{v!r},{format_seconds(t)},{c.tp},{c.tn},{c.fp},{c.fn},"
                f"{_f(sensitivity(c))},{_f(specificity(c))}\n"
            )
