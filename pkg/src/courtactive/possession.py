"""Possession labelling: offence/defence/transition per frame and the possession counter."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ContractViolation, ParseError
from .model import FIBA_COURT, CourtGeometry, Frame, Tracking, as_tracking, in_court, in_court_array

DEFAULT_BAND_CM = 400.0

TRANSITION, OFFENSIVE, DEFENSIVE = 0, 1, 2
NO_POSS = -1


class Poss(str, Enum):
    OFFENSIVE = "offensive"
    DEFENSIVE = "defensive"
    TRANSITION = "transition"

    @property
    def code(self) -> int:
        return _CODE_OF[self]


_CODE_OF = {Poss.TRANSITION: TRANSITION, Poss.OFFENSIVE: OFFENSIVE, Poss.DEFENSIVE: DEFENSIVE}
POSS_OF_CODE = {v: k for k, v in _CODE_OF.items()}


def parse_direction(text: str | int) -> int:
    if text in (1, -1):
        return int(text)
    value = str(text).strip().lower()
    if value in ("+x", "x", "+"):
        return 1
    if value in ("-x", "−x", "-"):
        return -1
    raise ValueError(f"attack direction must be '+x' or '-x', got {text!r}")


def format_direction(direction: int) -> str:
    return "+x" if direction > 0 else "-x"


@dataclass(frozen=True)
class Orientation:
    """Attack direction per game period.

    ``directions[k]`` is +1 when the team attacks the +x basket in period
    ``k + 1``; periods past the end reuse the last entry (overtime keeps the
    fourth-period basket). ``period_starts_ms`` lists the start time of
    periods 2, 3, ...; with none, the whole stream is period 1.
    """

    directions: tuple[int, ...] = (1, 1, -1, -1)
    period_starts_ms: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.directions or any(d not in (1, -1) for d in self.directions):
            raise ContractViolation("orientation needs at least one direction of +1/-1")
        if list(self.period_starts_ms) != sorted(set(self.period_starts_ms)):
            raise ContractViolation("period starts must be strictly increasing")

    def direction(self, period: int) -> int:
        return self.directions[min(period, len(self.directions)) - 1]

    def periods_at(self, t: np.ndarray) -> np.ndarray:
        return 1 + np.searchsorted(np.asarray(self.period_starts_ms, dtype=np.int64), t, side="right")

    def directions_at(self, t: np.ndarray) -> np.ndarray:
        table = np.asarray(self.directions, dtype=np.int8)
        idx = np.minimum(self.periods_at(np.asarray(t)), len(table)) - 1
        return table[idx]


@dataclass(frozen=True)
class PossessionLabel:
    poss: Poss
    ord: int


def mean_x(frame: Frame, geom: CourtGeometry = FIBA_COURT) -> float:
    """Average court-length coordinate of the five on-court players."""
    xs = [s.pos_x for s in frame.samples if in_court(s.pos_x, s.pos_y, geom)]
    if len(xs) != 5:
        raise ContractViolation(f"frame t={frame.t} has {len(xs)} on-court players, expected 5")
    return sum(xs) / 5


def mean_x_array(xr: Tracking, geom: CourtGeometry = FIBA_COURT) -> np.ndarray:
    inside = in_court_array(xr.pos_x, xr.pos_y, geom)
    fi = xr.frame_index
    n = len(xr)
    counts = np.bincount(fi[inside], minlength=n)
    if np.any(counts != 5):
        k = int(np.flatnonzero(counts != 5)[0])
        raise ContractViolation(
            f"frame t={int(xr.t[k])} has {int(counts[k])} on-court players, expected 5"
        )
    return np.bincount(fi[inside], weights=xr.pos_x[inside], minlength=n) / 5


def classify_poss(mean_x_cm: float, orientation: int | str = 1, band: float = DEFAULT_BAND_CM) -> Poss:
    """Offensive beyond +band in the attack direction, defensive beyond -band, else transition."""
    if band <= 0:
        raise ContractViolation("transition band must be positive")
    signed = parse_direction(orientation) * mean_x_cm
    if signed > band:
        return Poss.OFFENSIVE
    if signed < -band:
        return Poss.DEFENSIVE
    return Poss.TRANSITION


def classify_array(mean_x_cm: np.ndarray, directions: np.ndarray | int, band: float = DEFAULT_BAND_CM) -> np.ndarray:
    if band <= 0:
        raise ContractViolation("transition band must be positive")
    signed = np.asarray(directions) * np.asarray(mean_x_cm, dtype=np.float64)
    codes = np.full(signed.shape, TRANSITION, dtype=np.int8)
    codes[signed > band] = OFFENSIVE
    codes[signed < -band] = DEFENSIVE
    return codes


def assign_ord(poss: Sequence[Poss | str]) -> list[int]:
    """Possession ordinal: starts at 1, +1 on each transition -> offence/defence step."""
    if len(poss) == 0:
        raise ContractViolation("cannot number an empty possession sequence")
    codes = np.fromiter((Poss(p).code for p in poss), dtype=np.int8, count=len(poss))
    return kernels.assign_ord(codes, TRANSITION).tolist()


@dataclass(frozen=True)
class LabeledStream:
    t: np.ndarray
    mean_x: np.ndarray
    codes: np.ndarray
    ord: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    @property
    def possessions(self) -> int:
        """Total possessions counted (the final ordinal), 0 for an empty stream."""
        return int(self.ord[-1]) if len(self.ord) else 0

    @property
    def direct_flips(self) -> int:
        """Offence<->defence changes with no transition frame between them.

        These do not advance the ordinal, so a large value hints at
        under-counted possessions.
        """
        c = self.codes
        if len(c) < 2:
            return 0
        return int(np.count_nonzero((c[:-1] != TRANSITION) & (c[1:] != TRANSITION) & (c[:-1] != c[1:])))

    def labels(self) -> list[PossessionLabel]:
        return [PossessionLabel(POSS_OF_CODE[int(c)], int(o)) for c, o in zip(self.codes, self.ord)]

    def counts(self) -> dict[str, int]:
        return {p.value: int(np.count_nonzero(self.codes == p.code)) for p in Poss}


def label_possessions(
    xr: Tracking | Iterable[Frame],
    geom: CourtGeometry = FIBA_COURT,
    orientation: Orientation = Orientation(),
    band: float = DEFAULT_BAND_CM,
) -> LabeledStream:
    xr = as_tracking(xr)
    mx = mean_x_array(xr, geom)
    codes = classify_array(mx, orientation.directions_at(xr.t), band)
    ords = kernels.assign_ord(codes, TRANSITION) if len(codes) else np.zeros(0, dtype=np.int64)
    return LabeledStream(xr.t.copy(), mx, codes, ords)


LABELS_HEADER = ["t_ms", "mean_x_cm", "poss", "ord"]


def write_labels(labeled: LabeledStream, fh) -> None:
    fh.write(",".join(LABELS_HEADER) + "\n")
    names = [POSS_OF_CODE[c].value for c in range(3)]
    fh.writelines(
        f"{t},{m!r},{names[c]},{o}\n"
        for t, m, c, o in zip(labeled.t.tolist(), labeled.mean_x.tolist(), labeled.codes.tolist(), labeled.ord.tolist())
    )


def parse_labels(lines: Iterable[str] | str) -> LabeledStream:
    if isinstance(lines, str):
        lines = io.StringIO(lines)
    reader = csv.reader(line.rstrip("\r\n") for line in lines)
    header = next(reader, None)
    if header != LABELS_HEADER:
        raise ParseError(f"expected header {','.join(LABELS_HEADER)!r}", 1)
    t, mx, codes, ords = [], [], [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", lineno)
        try:
            t.append(int(row[0]))
            mx.append(float(row[1]))
            codes.append(Poss(row[2]).code)
            ords.append(int(row[3]))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return LabeledStream(
        np.asarray(t, dtype=np.int64),
        np.asarray(mx, dtype=np.float64),
        np.asarray(codes, dtype=np.int8),
        np.asarray(ords, dtype=np.int64),
    )
