"""Seeded synthetic games with matching annotation reports.

A game is a list of segments, each holding one state for a whole number of
seconds. Speeds are drawn per frame and player from a band tied to the
segment's regime: active segments move at ``high`` to ``1.2 * high`` km/h,
inactive ones at ``0.8 * low`` up to (excluding) ``low``. Positions follow a
fixed formation per state plus Gaussian jitter.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ScriptError
from .ingest import ActivityReportRow, PossessionReportRow, parse_key_values
from .model import FRAME_PERIOD_MS, SAMPLING_HZ, Tracking
from .possession import Orientation

ACTIVE_STATES = ("active-offence", "active-defence", "active-transition")
INACTIVE_STATES = (
    "inactive-stop",
    "inactive-freethrow",
    "inactive-timeout",
    "inactive-quarter",
    "inactive-half",
)
STATES = ACTIVE_STATES + INACTIVE_STATES

_REPORT_FLAG = {
    "inactive-stop": None,
    "inactive-freethrow": "ft",
    "inactive-timeout": "timeout",
    "inactive-quarter": "quarter",
    "inactive-half": "half",
}

# formations in cm, written for a team attacking +x
_OFFENCE = [(1100, 500), (1100, -500), (600, 300), (600, -300), (1250, 0)]
_FORMATIONS = {
    "active-offence": _OFFENCE,
    "active-defence": [(-x, y) for x, y in _OFFENCE],
    "active-transition": [(-200, -300), (-100, 400), (0, 0), (100, -400), (200, 300)],
    "inactive-stop": [(-300, 200), (-150, -350), (0, 100), (150, -100), (300, 350)],
    "inactive-freethrow": [(820, 0), (1000, 250), (1000, -250), (650, 250), (650, -250)],
    "inactive-timeout": [(-400, -550), (-200, -550), (0, -550), (200, -550), (400, -550)],
}
_FORMATIONS["inactive-quarter"] = _FORMATIONS["inactive-timeout"]
_FORMATIONS["inactive-half"] = _FORMATIONS["inactive-timeout"]

_BENCH_Y = -900.0


@dataclass(frozen=True)
class Segment:
    duration_s: int
    state: str
    low_kmh: float = 5.0
    high_kmh: float = 12.0

    def __post_init__(self):
        if not isinstance(self.duration_s, int) or self.duration_s < 1:
            raise ScriptError(f"segment duration must be a whole number of seconds >= 1, got {self.duration_s!r}")
        if self.state not in STATES:
            raise ScriptError(f"unknown segment state {self.state!r}")
        if not (0 <= self.low_kmh < self.high_kmh) or not math.isfinite(self.high_kmh):
            raise ScriptError(f"speed regime needs 0 <= low < high, got ({self.low_kmh}, {self.high_kmh})")

    @property
    def active(self) -> bool:
        return self.state in ACTIVE_STATES

    def speed_band(self) -> tuple[float, float]:
        if self.active:
            return self.high_kmh, 1.2 * self.high_kmh
        return 0.8 * self.low_kmh, self.low_kmh


@dataclass(frozen=True)
class GameScript:
    segments: tuple[Segment, ...]
    seed: int = 0
    noise_cm: float = 30.0
    bench_players: int = 0
    ramp_s: float = 0.0
    orientation: Orientation = field(default_factory=Orientation)

    def __post_init__(self):
        if not self.segments:
            raise ScriptError("a game script needs at least one segment")
        if self.noise_cm < 0 or self.bench_players < 0 or self.ramp_s < 0:
            raise ScriptError("noise, bench size and ramp must be non-negative")

    @property
    def duration_s(self) -> int:
        return sum(s.duration_s for s in self.segments)


class SyntheticGame(NamedTuple):
    tracking: Tracking
    activity: list[ActivityReportRow]
    possession: list[PossessionReportRow]


def _segment_periods(script: GameScript) -> list[int]:
    periods, period, pending = [], 1, False
    for seg in script.segments:
        if seg.active and pending:
            period += 1
            pending = False
        if seg.state in ("inactive-quarter", "inactive-half"):
            pending = True
        periods.append(period)
    return periods


def _reports(script: GameScript) -> tuple[list[ActivityReportRow], list[PossessionReportRow]]:
    activity: list[ActivityReportRow] = []
    possession: list[PossessionReportRow] = []
    start = 0
    for seg in script.segments:
        sec = start + 1
        action = "play" if seg.active else "stop"
        if not activity or activity[-1].action != action:
            if seg.active:
                activity.append(ActivityReportRow("play", sec, 1))
            else:
                flag = _REPORT_FLAG[seg.state]
                flags = {name: int(name == flag) for name in ("timeout", "ft", "quarter", "half")}
                activity.append(ActivityReportRow("stop", sec, 0, **flags))
        if seg.state in ("active-offence", "active-defence"):
            side = "off" if seg.state == "active-offence" else "def"
            if not possession or possession[-1].action != side:
                possession.append(PossessionReportRow(side, sec, int(side == "off")))
        start += seg.duration_s
    return activity, possession


def generate(script: GameScript) -> SyntheticGame:
    """Render a script to a 50 Hz tracking stream plus both annotation reports."""
    rng = np.random.default_rng(script.seed)
    n_bench = script.bench_players
    n_players = 5 + n_bench
    ramp = int(round(script.ramp_s * SAMPLING_HZ))
    periods = _segment_periods(script)

    px, py, speeds = [], [], []
    prev_pos = prev_band = None
    for seg, period in zip(script.segments, periods):
        m = seg.duration_s * SAMPLING_HZ
        d = script.orientation.direction(period)
        form = np.asarray(_FORMATIONS[seg.state], dtype=np.float64)
        form[:, 0] *= d
        lo, hi = seg.speed_band()
        pos = np.broadcast_to(form, (m, 5, 2)).copy()
        lo_arr = np.full((m, 1), lo)
        hi_arr = np.full((m, 1), hi)
        if ramp and prev_pos is not None:
            r = min(ramp, m)
            alpha = (np.arange(1, r + 1) / ramp)[:, None]
            pos[:r] = (1 - alpha[:, :, None]) * prev_pos + alpha[:, :, None] * form
            lo_arr[:r] = (1 - alpha) * prev_band[0] + alpha * lo
            hi_arr[:r] = (1 - alpha) * prev_band[1] + alpha * hi
        u = rng.random((m, 5))
        speeds.append(lo_arr + u * (hi_arr - lo_arr))
        jitter = rng.normal(0.0, script.noise_cm, (m, 5, 2)) if script.noise_cm > 0 else 0.0
        pos = pos + jitter
        px.append(pos[:, :, 0])
        py.append(pos[:, :, 1])
        prev_pos, prev_band = form, (lo, hi)

    px = np.concatenate(px)
    py = np.concatenate(py)
    speed = np.concatenate(speeds)
    heading = rng.uniform(0.0, 2 * math.pi, speed.shape)
    vx = speed * np.cos(heading)
    vy = speed * np.sin(heading)
    n = px.shape[0]
    if n_bench:
        bench_x = np.broadcast_to(-600.0 + 100.0 * np.arange(n_bench), (n, n_bench))
        zeros = np.zeros((n, n_bench))
        px = np.hstack([px, bench_x])
        py = np.hstack([py, zeros + _BENCH_Y])
        vx = np.hstack([vx, zeros])
        vy = np.hstack([vy, zeros])

    ids = [str(k) for k in range(1, 6)] + [f"B{k}" for k in range(1, n_bench + 1)]
    tracking = Tracking(
        t=np.arange(n, dtype=np.int64) * FRAME_PERIOD_MS,
        offsets=np.arange(n + 1, dtype=np.int64) * n_players,
        player=np.tile(np.arange(n_players), n),
        player_ids=ids,
        pos_x=px.ravel(),
        pos_y=py.ravel(),
        vel_x=vx.ravel(),
        vel_y=vy.ravel(),
    )
    activity, possession = _reports(script)
    return SyntheticGame(tracking, activity, possession)


def planted_truth(script: GameScript) -> np.ndarray:
    """Per-second inactive flags implied directly by the script."""
    return np.concatenate([np.full(s.duration_s, not s.active) for s in script.segments])


# --------------------------------------------------------------------------
# canned scripts


def alternating_script(
    minutes: int = 10, active_s: int = 30, stop_s: int = 10, low: float = 5.0, high: float = 12.0, seed: int = 0
) -> GameScript:
    segs = []
    total = minutes * 60
    k = 0
    while sum(s.duration_s for s in segs) < total:
        state = "active-offence" if k % 2 == 0 else "active-defence"
        segs.append(Segment(active_s, state, low, high))
        segs.append(Segment(stop_s, "inactive-stop", low, high))
        k += 1
    return GameScript(tuple(_trim(segs, total)), seed=seed)


def planted_script(
    seconds: int = 600, boundary_kmh: float = 8.0, min_spell_s: int = 3, seed: int = 0, noise_cm: float = 30.0
) -> GameScript:
    """A game whose inactivity is every player below ``boundary_kmh`` for at least ``min_spell_s``.

    Live play contains short pauses (below the boundary but shorter than
    ``min_spell_s``) and slow half-court sets just above the boundary, so
    both thresholds are pinned from either side.
    """
    b = boundary_kmh
    segs: list[Segment] = []
    c = 0
    while sum(s.duration_s for s in segs) < seconds:
        stop_s = min_spell_s + c % 3
        ft_s = min_spell_s + (2 * c) % 5
        pause_long = max(1, min_spell_s - 1)
        segs += [
            _live(10, "active-offence", 1.75 * b),
            _live(pause_long, "active-offence", 0.75 * b),
            _live(5, "active-offence", 1.0125 * b),
            _live(3, "active-transition", 2.0 * b),
            _dead(stop_s, "inactive-stop", b),
            _live(8, "active-defence", 1.5 * b),
            _live(1, "active-defence", 0.625 * b),
            _live(3, "active-defence", 1.025 * b),
            _dead(ft_s, "inactive-freethrow" if c % 2 else "inactive-timeout", b),
        ]
        c += 1
    return GameScript(tuple(_trim(segs, seconds, filler=_live(1, "active-offence", 1.75 * b))), seed=seed, noise_cm=noise_cm)


def _live(duration_s: int, state: str, high: float) -> Segment:
    return Segment(duration_s, state, low_kmh=high / 2, high_kmh=high)


def _dead(duration_s: int, state: str, low: float) -> Segment:
    return Segment(duration_s, state, low_kmh=low, high_kmh=2 * low)


def _trim(segs: list[Segment], total: int, filler: Segment | None = None) -> list[Segment]:
    out: list[Segment] = []
    used = 0
    for seg in segs:
        if used + seg.duration_s <= total:
            out.append(seg)
            used += seg.duration_s
        else:
            break
    if used < total:
        pad = filler or out[-1]
        out.append(Segment(total - used, pad.state, pad.low_kmh, pad.high_kmh))
    return out


# --------------------------------------------------------------------------
# script files

_HEADER_KEYS = ("seed", "noise_cm", "bench_players", "ramp_s")
_SEGMENT_KEYS = ("duration_s", "state", "low_kmh", "high_kmh")


def parse_script(source: Iterable[str] | str) -> GameScript:
    """Read a script: header keys, then one ``[segment]`` block per segment."""
    header: dict[str, str] = {}
    blocks: list[dict[str, str]] = []
    block_lines: list[int] = []
    for key, value, lineno in parse_key_values(source, error=ScriptError):
        if key.startswith("["):
            if key != "[segment]":
                raise ScriptError(f"unknown section {key}", lineno)
            blocks.append({})
            block_lines.append(lineno)
            continue
        target, allowed = (blocks[-1], _SEGMENT_KEYS) if blocks else (header, _HEADER_KEYS)
        if key not in allowed:
            raise ScriptError(f"unknown key {key!r}", lineno)
        if key in target:
            raise ScriptError(f"duplicate key {key!r}", lineno)
        target[key] = value
    try:
        segments = []
        for block, lineno in zip(blocks, block_lines):
            if "duration_s" not in block or "state" not in block:
                raise ScriptError("segment needs duration_s and state", lineno)
            segments.append(
                Segment(
                    int(block["duration_s"]),
                    block["state"],
                    float(block.get("low_kmh", 5.0)),
                    float(block.get("high_kmh", 12.0)),
                )
            )
        return GameScript(
            tuple(segments),
            seed=int(header.get("seed", 0)),
            noise_cm=float(header.get("noise_cm", 30.0)),
            bench_players=int(header.get("bench_players", 0)),
            ramp_s=float(header.get("ramp_s", 0.0)),
        )
    except ValueError as exc:
        if isinstance(exc, ScriptError):
            raise
        raise ScriptError(f"bad script value: {exc}") from None


def format_script(script: GameScript) -> str:
    buf = io.StringIO()
    buf.write(f"seed = {script.seed}\nnoise_cm = {script.noise_cm!r}\n")
    buf.write(f"bench_players = {script.bench_players}\nramp_s = {script.ramp_s!r}\n")
    for seg in script.segments:
        buf.write(
            f"\n[segment]\nduration_s = {seg.duration_s}\nstate = {seg.state}\n"
            f"low_kmh = {seg.low_kmh!r}\nhigh_kmh = {seg.high_kmh!r}\n"
        )
    return buf.getvalue()
