"""Per-second timelines: annotation reports expanded to step functions, and
frame-level predictions aggregated to seconds by majority vote."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ContractViolation, RangeError
from .filters import DropMask
from .ingest import ActivityReportRow, PossessionReportRow
from .possession import DEFENSIVE, NO_POSS, OFFENSIVE, TRANSITION, LabeledStream

MS_PER_SECOND = 1000


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ContractViolation("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class ActivityTimeline:
    """Ground-truth activity for seconds 1..duration; ``inactive[s - 1]`` covers second ``s``."""

    inactive: np.ndarray
    reasons: tuple[str | None, ...]

    @property
    def duration_s(self) -> int:
        return len(self.inactive)

    def label(self, sec: int) -> str:
        return "inactive" if self.inactive[sec - 1] else "active"

    def reason(self, sec: int) -> str | None:
        return self.reasons[sec - 1]


@dataclass(frozen=True)
class PossessionTimeline:
    offence: np.ndarray

    @property
    def duration_s(self) -> int:
        return len(self.offence)

    def label(self, sec: int) -> str:
        return "off" if self.offence[sec - 1] else "def"


@dataclass(frozen=True)
class PredictionTimeline:
    """Per-second predictions; ``poss`` holds possession codes or ``NO_POSS``."""

    inactive: np.ndarray
    poss: np.ndarray
    n_frames: np.ndarray

    @property
    def duration_s(self) -> int:
        return len(self.inactive)


def _check_duration(rows: Sequence, duration_s: int) -> None:
    if duration_s < 0:
        raise RangeError("duration must be non-negative")
    if rows and duration_s < rows[-1].sec:
        raise RangeError(f"duration {duration_s} s ends before the last report row at {rows[-1].sec} s")
    secs = [r.sec for r in rows]
    if any(s < 1 for s in secs) or secs != sorted(set(secs)):
        raise ContractViolation("report rows must have strictly increasing positive seconds")


def expand_activity(rows: Sequence[ActivityReportRow], duration_s: int) -> ActivityTimeline:
    """Step-expand the activity report; seconds before the first row count as pre-game (inactive)."""
    _check_duration(rows, duration_s)
    inactive = np.ones(duration_s, dtype=bool)
    reasons: list[str | None] = ["generic"] * duration_s
    for k, row in enumerate(rows):
        end = rows[k + 1].sec - 1 if k + 1 < len(rows) else duration_s
        stop = row.action == "stop"
        inactive[row.sec - 1 : end] = stop
        reasons[row.sec - 1 : end] = [row.reason] * (end - row.sec + 1)
    return ActivityTimeline(inactive, tuple(reasons))


def expand_possession(rows: Sequence[PossessionReportRow], duration_s: int) -> PossessionTimeline:
    """Step-expand the possession report; the first row's state also covers earlier seconds."""
    _check_duration(rows, duration_s)
    if not rows:
        raise ContractViolation("possession report is empty")
    offence = np.full(duration_s, rows[0].action == "off", dtype=bool)
    for k, row in enumerate(rows):
        end = rows[k + 1].sec - 1 if k + 1 < len(rows) else duration_s
        offence[row.sec - 1 : end] = row.action == "off"
    return PossessionTimeline(offence)


def second_of(t_ms: np.ndarray) -> np.ndarray:
    """1-based second containing each timestamp: second s spans [(s-1)*1000, s*1000) ms."""
    return np.asarray(t_ms, dtype=np.int64) // MS_PER_SECOND + 1


def duration_for(t_ms: np.ndarray, *row_groups: Sequence) -> int:
    """Smallest duration covering every frame and every report row."""
    last = int(second_of(t_ms[-1:])[0]) if len(t_ms) else 0
    for rows in row_groups:
        if rows:
            last = max(last, rows[-1].sec)
    return last


def majority_inactive(dropped_per_sec: np.ndarray, frames_per_sec: np.ndarray) -> np.ndarray:
    """Half or more dropped counts as inactive; empty seconds are inactive."""
    return 2 * dropped_per_sec >= frames_per_sec


def aggregate_predictions(
    mask: DropMask, duration_s: int, labels: LabeledStream | None = None
) -> PredictionTimeline:
    """Collapse frame decisions to seconds 1..duration_s; frames past the end are ignored."""
    sec = second_of(mask.t)
    inside = (sec >= 1) & (sec <= duration_s)
    idx = sec[inside] - 1
    n_frames = np.bincount(idx, minlength=duration_s)[:duration_s]
    n_dropped = np.bincount(idx, weights=mask.dropped[inside], minlength=duration_s)[:duration_s]
    inactive = majority_inactive(n_dropped, n_frames)

    poss = np.full(duration_s, NO_POSS, dtype=np.int8)
    if labels is not None and len(labels):
        lsec = second_of(labels.t)
        ok = (lsec >= 1) & (lsec <= duration_s)
        votes = np.zeros((duration_s, 3), dtype=np.int64)
        np.add.at(votes, (lsec[ok] - 1, labels.codes[ok].astype(np.int64)), 1)
        top = votes.max(axis=1)
        winners = (votes == top[:, None]).sum(axis=1)
        choice = votes.argmax(axis=1).astype(np.int8)
        # ties go to transition, which is excluded from off/def accordance
        choice[winners > 1] = TRANSITION
        poss = np.where(top > 0, choice, NO_POSS).astype(np.int8)
    return PredictionTimeline(inactive, poss, n_frames.astype(np.int64))


class Accordance(NamedTuple):
    counts: ConfusionCounts
    excluded: int


def offdef_accordance(pred: PredictionTimeline, truth: PossessionTimeline) -> Accordance:
    """Offence/defence agreement over seconds where both sides name a possession (positive = offence)."""
    n = min(pred.duration_s, truth.duration_s)
    p = pred.poss[:n]
    t = truth.offence[:n]
    usable = (p == OFFENSIVE) | (p == DEFENSIVE)
    p_off = p == OFFENSIVE
    counts = ConfusionCounts(
        tp=int(np.count_nonzero(usable & p_off & t)),
        tn=int(np.count_nonzero(usable & ~p_off & ~t)),
        fp=int(np.count_nonzero(usable & p_off & ~t)),
        fn=int(np.count_nonzero(usable & ~p_off & t)),
    )
    return Accordance(counts, int(n - np.count_nonzero(usable)))


TIMELINE_HEADER = ["sec", "truth_active", "pred_active", "truth_poss", "pred_poss"]
_PRED_POSS_NAMES = {OFFENSIVE: "off", DEFENSIVE: "def", TRANSITION: "transition", NO_POSS: "none"}


def write_timeline(
    fh, pred: PredictionTimeline, truth: ActivityTimeline, possession: PossessionTimeline | None = None
) -> None:
    if pred.duration_s != truth.duration_s:
        raise RangeError("prediction and truth cover different ranges")
    fh.write(",".join(TIMELINE_HEADER) + "\n")
    for s in range(1, truth.duration_s + 1):
        tp = possession.label(s) if possession is not None and s <= possession.duration_s else ""
        fh.write(
            f"{s},{int(not truth.inactive[s - 1])},{int(not pred.inactive[s - 1])},"
            f"{tp},{_PRED_POSS_NAMES[int(pred.poss[s - 1])]}\n"
        )
