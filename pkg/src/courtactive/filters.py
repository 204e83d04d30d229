"""Activity filters: drop frames without five on-court players, free-throw
dwells and low-speed spells, returning the reduced stream and a reasoned mask."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from . import kernels
from .errors import ContractViolation, ParseError
from .model import (
    FIBA_COURT,
    FRAME_PERIOD_MS,
    CourtGeometry,
    Frame,
    Tracking,
    as_tracking,
    in_court,
    in_court_array,
    in_ftsa_array,
)


class Reason(str, Enum):
    NOT_FIVE_PLAYERS = "NotFivePlayers"
    FREE_THROW_DWELL = "FreeThrowDwell"
    LOW_SPEED_SPELL = "LowSpeedSpell"


@dataclass(frozen=True)
class FilterParams:
    t_ft_ms: int = 10_000
    v_min_kmh: float = 9.25
    t_vel_ms: int = 2_000

    def __post_init__(self):
        if self.t_ft_ms < 0 or self.t_vel_ms < 0 or not self.v_min_kmh >= 0:
            raise ContractViolation("filter thresholds must be non-negative")


@dataclass(frozen=True)
class DropMask:
    """Per-frame drop decisions; one boolean column per reason."""

    t: np.ndarray
    not_five: np.ndarray
    free_throw: np.ndarray
    low_speed: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    @property
    def dropped(self) -> np.ndarray:
        return self.not_five | self.free_throw | self.low_speed

    @property
    def kept(self) -> np.ndarray:
        return ~self.dropped

    def reasons(self, k: int) -> frozenset[Reason]:
        out = set()
        if self.not_five[k]:
            out.add(Reason.NOT_FIVE_PLAYERS)
        if self.free_throw[k]:
            out.add(Reason.FREE_THROW_DWELL)
        if self.low_speed[k]:
            out.add(Reason.LOW_SPEED_SPELL)
        return frozenset(out)

    def counts(self) -> dict[str, int]:
        return {
            Reason.NOT_FIVE_PLAYERS.value: int(self.not_five.sum()),
            Reason.FREE_THROW_DWELL.value: int(self.free_throw.sum()),
            Reason.LOW_SPEED_SPELL.value: int(self.low_speed.sum()),
        }


def on_court_ids(frame: Frame, geom: CourtGeometry = FIBA_COURT) -> set[str]:
    return {s.player_id for s in frame.samples if in_court(s.pos_x, s.pos_y, geom)}


def on_court_counts(x: Tracking, geom: CourtGeometry = FIBA_COURT) -> np.ndarray:
    inside = in_court_array(x.pos_x, x.pos_y, geom)
    return np.bincount(x.frame_index[inside], minlength=len(x))


def criterion_not_five(frames, geom: CourtGeometry = FIBA_COURT) -> np.ndarray:
    x = as_tracking(frames)
    return on_court_counts(x, geom) != 5


def criterion_free_throw(frames, geom: CourtGeometry = FIBA_COURT, t_ft_ms: int = 10_000) -> np.ndarray:
    """Frames inside any single player's free-throw-area dwell of at least ``t_ft_ms``."""
    x = as_tracking(frames)
    out = np.zeros(len(x), dtype=bool)
    inside = in_ftsa_array(x.pos_x, x.pos_y, geom)
    if not inside.any():
        return out
    occupancy = np.zeros((len(x), len(x.player_ids)), dtype=bool)
    occupancy[x.frame_index[inside], x.player[inside]] = True
    for p in np.flatnonzero(occupancy.any(axis=0)):
        out |= kernels.mark_long_runs(occupancy[:, p], x.t, FRAME_PERIOD_MS, t_ft_ms)
    return out


def frame_max_speed(x: Tracking, geom: CourtGeometry = FIBA_COURT) -> np.ndarray:
    """Fastest on-court player per frame; +inf where the on-court count is not five."""
    n = len(x)
    if n == 0:
        return np.zeros(0)
    inside = in_court_array(x.pos_x, x.pos_y, geom)
    speeds = np.append(np.where(inside, x.speeds(), -np.inf), -np.inf)
    top = np.maximum.reduceat(speeds, x.offsets[:-1])
    counts = np.bincount(x.frame_index[inside], minlength=n)
    top[counts != 5] = np.inf
    return top


def low_speed_predicate(x: Tracking, geom: CourtGeometry, v_min_kmh: float) -> np.ndarray:
    return frame_max_speed(x, geom) < v_min_kmh


def criterion_low_speed(
    frames, geom: CourtGeometry = FIBA_COURT, v_min_kmh: float = 9.25, t_vel_ms: int = 2_000
) -> np.ndarray:
    """Frames in a spell of at least ``t_vel_ms`` where all five players move below ``v_min_kmh``."""
    x = as_tracking(frames)
    return kernels.mark_long_runs(low_speed_predicate(x, geom, v_min_kmh), x.t, FRAME_PERIOD_MS, t_vel_ms)


def filter_measurements(
    frames: Tracking | Iterable[Frame],
    geom: CourtGeometry = FIBA_COURT,
    params: FilterParams = FilterParams(),
) -> tuple[Tracking, DropMask]:
    x = as_tracking(frames)
    mask = DropMask(
        t=x.t.copy(),
        not_five=criterion_not_five(x, geom),
        free_throw=criterion_free_throw(x, geom, params.t_ft_ms),
        low_speed=criterion_low_speed(x, geom, params.v_min_kmh, params.t_vel_ms),
    )
    return x.select(mask.kept), mask


MASK_HEADER = ["t_ms", "kept", "reasons"]
_REASON_ORDER = (Reason.NOT_FIVE_PLAYERS, Reason.FREE_THROW_DWELL, Reason.LOW_SPEED_SPELL)


def write_mask(mask: DropMask, fh) -> None:
    fh.write(",".join(MASK_HEADER) + "\n")
    names = np.array([r.value for r in _REASON_ORDER], dtype=object)
    cols = np.stack([mask.not_five, mask.free_throw, mask.low_speed], axis=1)
    kept = mask.kept
    for t, k, row in zip(mask.t.tolist(), kept.tolist(), cols):
        fh.write(f"{t},{int(k)},{'|'.join(names[row])}\n")


def parse_mask(lines: Iterable[str] | str) -> DropMask:
    if isinstance(lines, str):
        lines = io.StringIO(lines)
    reader = csv.reader(line.rstrip("\r\n") for line in lines)
    if next(reader, None) != MASK_HEADER:
        raise ParseError(f"expected header {','.join(MASK_HEADER)!r}", 1)
    t, cols = [], ([], [], [])
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
        try:
            t.append(int(row[0]))
            kept = {"1": True, "0": False}[row[1]]
            reasons = {Reason(r) for r in row[2].split("|")} if row[2] else set()
        except (ValueError, KeyError) as exc:
            raise ParseError(f"bad mask row: {exc}", lineno) from None
        if kept == bool(reasons):
            raise ParseError("kept flag disagrees with the reason list", lineno)
        for col, reason in zip(cols, _REASON_ORDER):
            col.append(reason in reasons)
    return DropMask(np.asarray(t, dtype=np.int64), *(np.asarray(c, dtype=bool) for c in cols))
