"""Domain types, unit conventions and court geometry.

Internal units: positions in centimeters, velocities in km/h, time in
milliseconds. The court origin is the center circle, ``x`` runs along the
court length and ``y`` along the width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ContractViolation, InvalidMeasurementError

FRAME_PERIOD_MS = 20
SAMPLING_HZ = 50


@dataclass(frozen=True)
class PlayerSample:
    player_id: str
    pos_x: float
    pos_y: float
    vel_x: float
    vel_y: float

    def __post_init__(self):
        for name in ("pos_x", "pos_y", "vel_x", "vel_y"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidMeasurementError(f"{name} of player {self.player_id} is not finite")

    @property
    def speed(self) -> float:
        return planar_speed(self.vel_x, self.vel_y)


@dataclass(frozen=True)
class Frame:
    """All player samples recorded at one instant ``t`` (ms)."""

    t: int
    samples: tuple[PlayerSample, ...] = ()

    def __post_init__(self):
        if self.t < 0:
            raise ContractViolation(f"frame time must be non-negative, got {self.t}")
        ids = [s.player_id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise ContractViolation(f"duplicate player id in frame t={self.t}")


@dataclass(frozen=True)
class CourtGeometry:
    half_length: float = 1400.0
    half_width: float = 750.0
    ftsa_center_abs_x: float = 820.0
    ftsa_radius: float = 180.0

    def __post_init__(self):
        fields = (self.half_length, self.half_width, self.ftsa_center_abs_x, self.ftsa_radius)
        if not all(math.isfinite(v) and v > 0 for v in fields):
            raise ContractViolation("court geometry values must be finite and positive")
        if self.ftsa_center_abs_x >= self.half_length:
            raise ContractViolation("free-throw area center must lie inside the half length")
        if self.ftsa_radius > self.half_width:
            raise ContractViolation("free-throw area radius exceeds the half width")


FIBA_COURT = CourtGeometry()


def planar_speed(vel_x: float, vel_y: float) -> float:
    """Speed magnitude in km/h from the two velocity components."""
    if not (math.isfinite(vel_x) and math.isfinite(vel_y)):
        raise InvalidMeasurementError(f"non-finite velocity ({vel_x}, {vel_y})")
    return math.hypot(vel_x, vel_y)


def in_court(pos_x: float, pos_y: float, geom: CourtGeometry = FIBA_COURT) -> bool:
    return abs(pos_x) <= geom.half_length and abs(pos_y) <= geom.half_width


def in_ftsa(pos_x: float, pos_y: float, geom: CourtGeometry = FIBA_COURT) -> bool:
    """True when the point lies in either free-throw disc (closed)."""
    dx = abs(pos_x) - geom.ftsa_center_abs_x
    return dx * dx + pos_y * pos_y <= geom.ftsa_radius * geom.ftsa_radius


def in_court_array(pos_x: np.ndarray, pos_y: np.ndarray, geom: CourtGeometry) -> np.ndarray:
    return (np.abs(pos_x) <= geom.half_length) & (np.abs(pos_y) <= geom.half_width)


def in_ftsa_array(pos_x: np.ndarray, pos_y: np.ndarray, geom: CourtGeometry) -> np.ndarray:
    dx = np.abs(pos_x) - geom.ftsa_center_abs_x
    return dx * dx + pos_y * pos_y <= geom.ftsa_radius * geom.ftsa_radius


class Tracking(Sequence[Frame]):
    """An ordered stream of frames stored column-wise.

    Samples are kept flat in frame-major order; ``offsets[k]:offsets[k + 1]``
    selects the samples of frame ``k``. ``player`` indexes ``player_ids``.
    Indexing or iterating yields :class:`Frame` objects.
    """

    __slots__ = ("t", "offsets", "player", "player_ids", "pos_x", "pos_y", "vel_x", "vel_y", "_frame_index")

    def __init__(self, t, offsets, player, player_ids, pos_x, pos_y, vel_x, vel_y):
        self.t = np.asarray(t, dtype=np.int64)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.player = np.asarray(player, dtype=np.int64)
        self.player_ids = tuple(player_ids)
        self.pos_x = np.asarray(pos_x, dtype=np.float64)
        self.pos_y = np.asarray(pos_y, dtype=np.float64)
        self.vel_x = np.asarray(vel_x, dtype=np.float64)
        self.vel_y = np.asarray(vel_y, dtype=np.float64)
        self._frame_index = None
        if len(self.offsets) != len(self.t) + 1:
            raise ContractViolation("offsets must have one more entry than frames")
        if len(self.t) > 1 and np.any(np.diff(self.t) <= 0):
            raise ContractViolation("frame times must be strictly increasing")
        if len(self.t) and self.t[0] < 0:
            raise ContractViolation("frame times must be non-negative")
        for arr in (self.pos_x, self.pos_y, self.vel_x, self.vel_y):
            if not np.all(np.isfinite(arr)):
                raise InvalidMeasurementError("tracking contains non-finite values")

    @classmethod
    def empty(cls) -> "Tracking":
        z = np.zeros(0)
        return cls(np.zeros(0, np.int64), [0], np.zeros(0, np.int64), (), z, z, z, z)

    @classmethod
    def from_frames(cls, frames: Iterable[Frame]) -> "Tracking":
        if isinstance(frames, Tracking):
            return frames
        ids: dict[str, int] = {}
        t, offsets, player = [], [0], []
        cols: tuple[list, list, list, list] = ([], [], [], [])
        for frame in frames:
            t.append(frame.t)
            for s in frame.samples:
                player.append(ids.setdefault(s.player_id, len(ids)))
                cols[0].append(s.pos_x)
                cols[1].append(s.pos_y)
                cols[2].append(s.vel_x)
                cols[3].append(s.vel_y)
            offsets.append(len(player))
        return cls(t, offsets, player, ids, *cols)

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, k):
        if isinstance(k, slice):
            keep = np.zeros(len(self), dtype=bool)
            keep[k] = True
            return self.select(keep)
        k = range(len(self))[k]
        lo, hi = self.offsets[k], self.offsets[k + 1]
        samples = tuple(
            PlayerSample(
                self.player_ids[self.player[j]],
                float(self.pos_x[j]),
                float(self.pos_y[j]),
                float(self.vel_x[j]),
                float(self.vel_y[j]),
            )
            for j in range(lo, hi)
        )
        return Frame(int(self.t[k]), samples)

    def __iter__(self) -> Iterator[Frame]:
        for k in range(len(self)):
            yield self[k]

    def __repr__(self) -> str:
        return f"Tracking(frames={len(self)}, samples={self.n_samples}, players={len(self.player_ids)})"

    @property
    def n_samples(self) -> int:
        return int(self.offsets[-1])

    @property
    def frame_index(self) -> np.ndarray:
        """Frame number of every sample."""
        if self._frame_index is None:
            self._frame_index = np.repeat(np.arange(len(self)), np.diff(self.offsets))
        return self._frame_index

    def speeds(self) -> np.ndarray:
        return np.hypot(self.vel_x, self.vel_y)

    def select(self, keep: np.ndarray) -> "Tracking":
        """Sub-stream of the frames where ``keep`` is true, order preserved."""
        keep = np.asarray(keep, dtype=bool)
        if keep.shape != (len(self),):
            raise ContractViolation("frame mask length does not match the stream")
        sample_keep = keep[self.frame_index]
        counts = np.diff(self.offsets)[keep]
        offsets = np.concatenate(([0], np.cumsum(counts)))
        return Tracking(
            self.t[keep],
            offsets,
            self.player[sample_keep],
            self.player_ids,
            self.pos_x[sample_keep],
            self.pos_y[sample_keep],
            self.vel_x[sample_keep],
            self.vel_y[sample_keep],
        )

    def equals(self, other: "Tracking") -> bool:
        """Value equality on frames (player ids compared by name)."""
        if len(self) != len(other) or self.n_samples != other.n_samples:
            return False
        mine = np.array(self.player_ids, dtype=object)[self.player] if self.n_samples else np.array([])
        theirs = np.array(other.player_ids, dtype=object)[other.player] if other.n_samples else np.array([])
        return bool(
            np.array_equal(self.t, other.t)
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(mine, theirs)
            and all(
                np.array_equal(getattr(self, f), getattr(other, f))
                for f in ("pos_x", "pos_y", "vel_x", "vel_y")
            )
        )


def as_tracking(frames: Tracking | Iterable[Frame]) -> Tracking:
    return Tracking.from_frames(frames)
