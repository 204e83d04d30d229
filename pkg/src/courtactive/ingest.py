"""Text formats: tracking streams, the two annotation reports, and the config file.

Parsing is strict; anything malformed raises with the offending line number.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np
import pandas as pd

from .errors import ConfigError, ContractViolation, DuplicateRecordError, OrderingError, ParseError, ReportError
from .filters import FilterParams
from .model import FIBA_COURT, CourtGeometry, Tracking
from .possession import DEFAULT_BAND_CM, Orientation, format_direction, parse_direction

TRACKING_HEADER = ["t_ms", "player_id", "pos_x_cm", "pos_y_cm", "vel_x_kmh", "vel_y_kmh"]
ACTIVITY_HEADER = ["action", "sec", "active", "timeout", "ft", "quarter", "half"]
POSSESSION_HEADER = ["action", "sec", "off"]
REASON_COLUMNS = ("timeout", "ft", "quarter", "half")


def _lines(source) -> Iterable[str]:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


# --------------------------------------------------------------------------
# tracking


@dataclass(frozen=True)
class TrackingRecord:
    t: int
    player_id: str
    pos_x: float
    pos_y: float
    vel_x: float
    vel_y: float


def _parse_record(fields: list[str], lineno: int) -> TrackingRecord:
    if len(fields) != 6:
        raise ParseError(f"expected 6 fields, got {len(fields)}", lineno)
    t_text, pid = fields[0], fields[1]
    if not t_text.isdigit():
        raise ParseError(f"t_ms must be a non-negative integer, got {t_text!r}", lineno)
    if not pid or pid != pid.strip():
        raise ParseError(f"bad player_id {pid!r}", lineno)
    values = []
    for name, text in zip(TRACKING_HEADER[2:], fields[2:]):
        try:
            value = float(text)
        except ValueError:
            raise ParseError(f"{name} is not a decimal number: {text!r}", lineno) from None
        if not math.isfinite(value) or text.strip() != text:
            raise ParseError(f"{name} is not a finite decimal: {text!r}", lineno)
        values.append(value)
    return TrackingRecord(int(t_text), pid, *values)


def parse_tracking_record(line: str, lineno: int = 2) -> TrackingRecord:
    return _parse_record(line.rstrip("\r\n").split(","), lineno)


def _records_to_tracking(t, pid, px, py, vx, vy) -> Tracking:
    """Group flat records by time. ``t`` must be non-decreasing with each value contiguous."""
    t = np.asarray(t, dtype=np.int64)
    n = len(t)
    if n == 0:
        return Tracking.empty()
    steps = np.diff(t)
    if np.any(steps < 0):
        k = int(np.flatnonzero(steps < 0)[0]) + 1
        raise OrderingError(f"t_ms {int(t[k])} goes back in time after {int(t[k - 1])}", k + 2)
    codes, ids = pd.factorize(pd.Series(pid, dtype=object), sort=False)
    starts = np.concatenate(([0], np.flatnonzero(steps) + 1))
    frame_of = np.repeat(np.arange(len(starts)), np.diff(np.append(starts, n)))
    key = frame_of.astype(np.int64) * (len(ids) + 1) + codes
    order = np.argsort(key, kind="stable")
    dup = np.flatnonzero(key[order][1:] == key[order][:-1])
    if dup.size:
        k = int(order[dup[0] + 1])
        raise DuplicateRecordError(f"duplicate record for t={int(t[k])}, player {pid[k]!r}", k + 2)
    return Tracking(
        t[starts],
        np.append(starts, n),
        codes,
        [str(i) for i in ids],
        px,
        py,
        vx,
        vy,
    )


def _parse_tracking_slow(lines: Iterable[str]) -> Tracking:
    it = iter(lines)
    header = next(it, None)
    if header is None or header.rstrip("\r\n").lstrip("﻿") != ",".join(TRACKING_HEADER):
        raise ParseError(f"expected header {','.join(TRACKING_HEADER)!r}", 1)
    cols: tuple[list, ...] = ([], [], [], [], [], [])
    for lineno, line in enumerate(it, start=2):
        line = line.rstrip("\r\n")
        if not line:
            raise ParseError("empty line", lineno)
        rec = _parse_record(line.split(","), lineno)
        for col, value in zip(cols, (rec.t, rec.player_id, rec.pos_x, rec.pos_y, rec.vel_x, rec.vel_y)):
            col.append(value)
    return _records_to_tracking(*cols)


def parse_tracking(source: Iterable[str] | str) -> Tracking:
    """Parse tracking text (header + one record per line) into frames."""
    return _parse_tracking_slow(_lines(source))


def read_tracking(path: str | os.PathLike) -> Tracking:
    """Read a tracking file, using pandas' C reader when the file is clean.

    Any anomaly falls back to the line-by-line parser, which reports the
    exact line number of the problem.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\r\n").lstrip("﻿")
    if header != ",".join(TRACKING_HEADER):
        raise ParseError(f"expected header {','.join(TRACKING_HEADER)!r}", 1)
    try:
        df = pd.read_csv(
            path,
            dtype={"t_ms": np.int64, "player_id": str, **{c: np.float64 for c in TRACKING_HEADER[2:]}},
            keep_default_na=False,
            na_filter=False,
            engine="c",
            skip_blank_lines=False,
            float_precision="round_trip",
        )
        ok = (
            list(df.columns) == TRACKING_HEADER
            and (df["t_ms"].to_numpy() >= 0).all()
            and np.isfinite(df[TRACKING_HEADER[2:]].to_numpy()).all()
            and (df["player_id"].str.len() > 0).all()
        )
    except (ValueError, TypeError, pd.errors.ParserError):
        ok = False
    if not ok:
        with path.open("r", encoding="utf-8", newline="") as fh:
            return _parse_tracking_slow(fh)
    try:
        return _records_to_tracking(
            df["t_ms"].to_numpy(),
            df["player_id"].to_numpy(dtype=object),
            *(df[c].to_numpy() for c in TRACKING_HEADER[2:]),
        )
    except ParseError:
        with path.open("r", encoding="utf-8", newline="") as fh:
            return _parse_tracking_slow(fh)


def write_tracking(x: Tracking, fh: TextIO) -> None:
    fh.write(",".join(TRACKING_HEADER) + "\n")
    if x.n_samples == 0:
        return
    df = pd.DataFrame(
        {
            "t_ms": x.t[x.frame_index],
            "player_id": np.asarray(x.player_ids, dtype=object)[x.player],
            "pos_x_cm": x.pos_x,
            "pos_y_cm": x.pos_y,
            "vel_x_kmh": x.vel_x,
            "vel_y_kmh": x.vel_y,
        }
    )
    df.to_csv(fh, header=False, index=False, lineterminator="\n")


def tracking_to_text(x: Tracking) -> str:
    buf = io.StringIO()
    write_tracking(x, buf)
    return buf.getvalue()


# --------------------------------------------------------------------------
# annotation reports


@dataclass(frozen=True)
class ActivityReportRow:
    action: str
    sec: int
    active: int
    timeout: int = 0
    ft: int = 0
    quarter: int = 0
    half: int = 0

    @property
    def reason(self) -> str | None:
        """Why play stopped; ``None`` on play rows."""
        if self.action == "play":
            return None
        for name in REASON_COLUMNS:
            if getattr(self, name):
                return name
        return "generic"


@dataclass(frozen=True)
class PossessionReportRow:
    action: str
    sec: int
    off: int


def _flag(text: str, name: str, lineno: int) -> int:
    if text not in ("0", "1"):
        raise ReportError(f"{name} must be 0 or 1, got {text!r}", lineno, rule="binary-flag")
    return int(text)


def _sec(text: str, lineno: int) -> int:
    if not text.isdigit() or int(text) < 1:
        raise ReportError(f"sec must be a positive integer, got {text!r}", lineno, rule="positive-sec")
    return int(text)


def _report_rows(source, header: list[str]):
    reader = csv.reader(line.rstrip("\r\n") for line in _lines(source))
    first = next(reader, None)
    if first is None or [c.strip().lstrip("﻿") for c in first] != header:
        raise ReportError(f"expected header {','.join(header)!r}", 1, rule="header")
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ReportError(f"expected {len(header)} fields, got {len(row)}", lineno, rule="field-count")
        yield lineno, [c.strip() for c in row]


def _check_sequence(rows, lineno: int, row) -> None:
    if rows:
        prev = rows[-1]
        if row.sec <= prev.sec:
            raise ReportError(f"sec {row.sec} does not increase past {prev.sec}", lineno, rule="increasing-sec")
        if row.action == prev.action:
            raise ReportError(f"action {row.action!r} repeats", lineno, rule="alternation")


def parse_activity_report(source: Iterable[str] | str) -> list[ActivityReportRow]:
    rows: list[ActivityReportRow] = []
    for lineno, fields in _report_rows(source, ACTIVITY_HEADER):
        action = fields[0]
        if action not in ("play", "stop"):
            raise ReportError(f"action must be play or stop, got {action!r}", lineno, rule="action")
        sec = _sec(fields[1], lineno)
        flags = [_flag(v, n, lineno) for v, n in zip(fields[2:], ACTIVITY_HEADER[2:])]
        row = ActivityReportRow(action, sec, *flags)
        if row.active != (action == "play"):
            raise ReportError("active must be 1 on play rows and 0 on stop rows", lineno, rule="active-consistency")
        n_reasons = sum(flags[1:])
        if n_reasons > 1:
            raise ReportError("more than one stoppage reason set", lineno, rule="single-reason")
        if action == "play" and n_reasons:
            raise ReportError("play rows carry no stoppage reason", lineno, rule="reason-on-play")
        _check_sequence(rows, lineno, row)
        rows.append(row)
    return rows


def parse_possession_report(source: Iterable[str] | str) -> list[PossessionReportRow]:
    rows: list[PossessionReportRow] = []
    for lineno, fields in _report_rows(source, POSSESSION_HEADER):
        action = fields[0]
        if action not in ("off", "def"):
            raise ReportError(f"action must be off or def, got {action!r}", lineno, rule="action")
        row = PossessionReportRow(action, _sec(fields[1], lineno), _flag(fields[2], "off", lineno))
        if row.off != (action == "off"):
            raise ReportError("off flag disagrees with action", lineno, rule="off-consistency")
        _check_sequence(rows, lineno, row)
        rows.append(row)
    return rows


def write_activity_report(rows: Iterable[ActivityReportRow], fh: TextIO) -> None:
    fh.write(",".join(ACTIVITY_HEADER) + "\n")
    for r in rows:
        fh.write(f"{r.action},{r.sec},{r.active},{r.timeout},{r.ft},{r.quarter},{r.half}\n")


def write_possession_report(rows: Iterable[PossessionReportRow], fh: TextIO) -> None:
    fh.write(",".join(POSSESSION_HEADER) + "\n")
    for r in rows:
        fh.write(f"{r.action},{r.sec},{r.off}\n")


def activity_report_text(rows) -> str:
    buf = io.StringIO()
    write_activity_report(rows, buf)
    return buf.getvalue()


def possession_report_text(rows) -> str:
    buf = io.StringIO()
    write_possession_report(rows, buf)
    return buf.getvalue()


def period_starts_from_activity(rows: Iterable[ActivityReportRow]) -> tuple[int, ...]:
    """Start times (ms) of periods 2, 3, ...: each play row after a quarter or half interval."""
    starts = []
    interval = False
    for r in rows:
        if r.action == "stop" and (r.quarter or r.half):
            interval = True
        elif r.action == "play" and interval:
            starts.append((r.sec - 1) * 1000)
            interval = False
    return tuple(starts)


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class GridSpec:
    """Tuning grids: speed threshold in km/h, spell duration in ms."""

    v_min: tuple[float, float, float] = (0.0, 20.0, 0.25)
    t_vel: tuple[int, int, int] = (0, 20_000, 1_000)

    def __post_init__(self):
        for lo, hi, step in (self.v_min, self.t_vel):
            if not step > 0:
                raise ContractViolation("grid step must be positive")
            if lo > hi:
                raise ContractViolation("grid min exceeds max")
        if self.v_min[0] < 0 or self.t_vel[0] < 0:
            raise ContractViolation("grid values must be non-negative")

    def v_min_values(self) -> list[float]:
        lo, hi, step = self.v_min
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + k * step, 10) for k in range(count)]

    def t_vel_values(self) -> list[int]:
        lo, hi, step = self.t_vel
        return list(range(int(lo), int(hi) + 1, int(step)))


@dataclass(frozen=True)
class Config:
    geometry: CourtGeometry = FIBA_COURT
    t_ft_ms: int = 10_000
    v_min_kmh: float = 9.25
    t_vel_ms: int = 2_000
    transition_band_cm: float = DEFAULT_BAND_CM
    attack_directions: tuple[int, ...] = (1, 1, -1, -1)
    period_starts_ms: tuple[int, ...] = ()
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        if self.t_ft_ms < 0 or self.t_vel_ms < 0:
            raise ConfigError("durations must be non-negative")
        if not (math.isfinite(self.v_min_kmh) and self.v_min_kmh >= 0):
            raise ConfigError("v_min_kmh must be a non-negative number")
        if not self.transition_band_cm > 0:
            raise ConfigError("transition_band_cm must be positive")

    @property
    def filter_params(self) -> FilterParams:
        return FilterParams(self.t_ft_ms, self.v_min_kmh, self.t_vel_ms)

    @property
    def orientation(self) -> Orientation:
        return Orientation(self.attack_directions, self.period_starts_ms)

    def with_values(self, values: dict[str, str]) -> "Config":
        """Apply ``key -> text`` settings using the config-file key names."""
        return _apply(self, values, lineno_of={})


def _seconds_to_ms(text: str) -> int:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("not finite")
    return int(round(value * 1000))


def _apply(cfg: Config, values: dict[str, str], lineno_of: dict[str, int]) -> Config:
    geom = {}
    top: dict = {}
    directions = list(cfg.attack_directions)
    grid_v = list(cfg.grid.v_min)
    grid_t = list(cfg.grid.t_vel)
    geom_keys = {
        "half_length_cm": "half_length",
        "half_width_cm": "half_width",
        "ftsa_center_x_cm": "ftsa_center_abs_x",
        "ftsa_radius_cm": "ftsa_radius",
    }
    for key, text in values.items():
        line = lineno_of.get(key)
        try:
            if key in geom_keys:
                geom[geom_keys[key]] = float(text)
            elif key == "t_ft_s":
                top["t_ft_ms"] = _seconds_to_ms(text)
            elif key == "t_vel_s":
                top["t_vel_ms"] = _seconds_to_ms(text)
            elif key == "v_min_kmh":
                top["v_min_kmh"] = float(text)
            elif key == "transition_band_cm":
                top["transition_band_cm"] = float(text)
            elif key.startswith("attack_direction_p") and key[18:].isdigit() and int(key[18:]) >= 1:
                period = int(key[18:])
                while len(directions) < period:
                    directions.append(directions[-1])
                directions[period - 1] = parse_direction(text)
            elif key == "period_starts_s":
                top["period_starts_ms"] = tuple(_seconds_to_ms(v) for v in text.split(",") if v.strip())
            elif key.startswith("grid_vmin_") and key[10:] in ("min", "max", "step"):
                grid_v[("min", "max", "step").index(key[10:])] = float(text)
            elif key.startswith("grid_tvel_") and key[10:] in ("min", "max", "step"):
                grid_t[("min", "max", "step").index(key[10:])] = _seconds_to_ms(text)
            else:
                raise ConfigError(f"unknown key {key!r}", line)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key}: {text!r} ({exc})", line) from None
    try:
        return replace(
            cfg,
            geometry=replace(cfg.geometry, **geom) if geom else cfg.geometry,
            attack_directions=tuple(directions),
            grid=GridSpec(tuple(grid_v), tuple(grid_t)),
            **top,
        )
    except ContractViolation as exc:
        raise ConfigError(str(exc)) from None


def parse_key_values(source: Iterable[str] | str, error=ConfigError) -> list[tuple[str, str, int]]:
    """``key = value`` lines with ``#`` comments; returns (key, value, line) triples."""
    out = []
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            out.append((line, "", lineno))
            continue
        if "=" not in line:
            raise error(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise error("missing key", lineno)
        out.append((key, value, lineno))
    return out


def parse_config(source: Iterable[str] | str) -> Config:
    values: dict[str, str] = {}
    lineno_of: dict[str, int] = {}
    for key, value, lineno in parse_key_values(source):
        if key.startswith("["):
            raise ConfigError(f"sections are not allowed in a config file: {key}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        values[key] = value
        lineno_of[key] = lineno
    return _apply(Config(), values, lineno_of)


def load_config(path: str | os.PathLike | None = None) -> Config:
    if path is None:
        return Config()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh)


def format_config(cfg: Config) -> str:
    """Render a config back to ``key = value`` text (round-trips through parse_config)."""
    g = cfg.geometry
    lines = [
        f"half_length_cm = {g.half_length!r}",
        f"half_width_cm = {g.half_width!r}",
        f"ftsa_center_x_cm = {g.ftsa_center_abs_x!r}",
        f"ftsa_radius_cm = {g.ftsa_radius!r}",
        f"t_ft_s = {cfg.t_ft_ms / 1000!r}",
        f"v_min_kmh = {cfg.v_min_kmh!r}",
        f"t_vel_s = {cfg.t_vel_ms / 1000!r}",
        f"transition_band_cm = {cfg.transition_band_cm!r}",
    ]
    lines += [f"attack_direction_p{k} = {format_direction(d)}" for k, d in enumerate(cfg.attack_directions, 1)]
    if cfg.period_starts_ms:
        lines.append("period_starts_s = " + ",".join(repr(ms / 1000) for ms in cfg.period_starts_ms))
    for name, (lo, hi, step), scale in (("vmin", cfg.grid.v_min, 1), ("tvel", cfg.grid.t_vel, 1000)):
        lines += [
            f"grid_{name}_min = {lo / scale!r}",
            f"grid_{name}_max = {hi / scale!r}",
            f"grid_{name}_step = {step / scale!r}",
        ]
    return "\n".join(lines) + "\n"
