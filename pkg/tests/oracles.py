"""Independent reference implementations used to check the fast paths.

Everything here is scalar pure Python over plain lists; nothing calls the
package's vectorized code or kernels.
"""

from __future__ import annotations

import math

import numpy as np

from courtactive.model import Tracking

PERIOD = 20


def frames_as_lists(x: Tracking):
    """[(t, [(pid, px, py, vx, vy), ...]), ...] built from raw columns."""
    out = []
    t = x.t.tolist()
    off = x.offsets.tolist()
    pid = x.player.tolist()
    cols = [c.tolist() for c in (x.pos_x, x.pos_y, x.vel_x, x.vel_y)]
    for k in range(len(t)):
        out.append((t[k], [(pid[j], cols[0][j], cols[1][j], cols[2][j], cols[3][j]) for j in range(off[k], off[k + 1])]))
    return out


def _inside(px, py, geom):
    return abs(px) <= geom.half_length and abs(py) <= geom.half_width


def _in_disc(px, py, geom):
    c = geom.ftsa_center_abs_x
    r2 = geom.ftsa_radius**2
    return (px - c) ** 2 + py**2 <= r2 or (px + c) ** 2 + py**2 <= r2


def _window_marks(flags, t, threshold):
    """For every frame, scan its full containing run and test the run's duration."""
    n = len(flags)
    left = [0] * n
    right = [0] * n
    for k in range(n):
        if flags[k] and k > 0 and flags[k - 1] and t[k] - t[k - 1] <= PERIOD:
            left[k] = left[k - 1]
        else:
            left[k] = k
    for k in range(n - 1, -1, -1):
        if flags[k] and k < n - 1 and flags[k + 1] and t[k + 1] - t[k] <= PERIOD:
            right[k] = right[k + 1]
        else:
            right[k] = k
    return [bool(flags[k]) and (t[right[k]] - t[left[k]] + PERIOD >= threshold) for k in range(n)]


def naive_window_marks(flags, t, threshold):
    """Quadratic version: walk outward from each frame until the run ends."""
    n = len(flags)
    out = [False] * n
    for k in range(n):
        if not flags[k]:
            continue
        i = k
        while i > 0 and flags[i - 1] and t[i] - t[i - 1] <= PERIOD:
            i -= 1
        j = k
        while j < n - 1 and flags[j + 1] and t[j + 1] - t[j] <= PERIOD:
            j += 1
        out[k] = t[j] - t[i] + PERIOD >= threshold
    return out


def oracle_not_five(x: Tracking, geom):
    return [sum(_inside(s[1], s[2], geom) for s in samples) != 5 for _, samples in frames_as_lists(x)]


def oracle_free_throw(x: Tracking, geom, t_ft, naive=False):
    frames = frames_as_lists(x)
    t = [f[0] for f in frames]
    players = sorted({s[0] for _, samples in frames for s in samples})
    marks = [False] * len(frames)
    scan = naive_window_marks if naive else _window_marks
    for p in players:
        flags = []
        for _, samples in frames:
            here = [s for s in samples if s[0] == p]
            flags.append(bool(here) and _in_disc(here[0][1], here[0][2], geom))
        for k, m in enumerate(scan(flags, t, t_ft)):
            marks[k] = marks[k] or m
    return marks


def oracle_low_speed(x: Tracking, geom, v_min, t_vel, naive=False):
    frames = frames_as_lists(x)
    t = [f[0] for f in frames]
    flags = []
    for _, samples in frames:
        court = [s for s in samples if _inside(s[1], s[2], geom)]
        flags.append(len(court) == 5 and all(math.hypot(s[3], s[4]) < v_min for s in court))
    scan = naive_window_marks if naive else _window_marks
    return scan(flags, t, t_vel)


def naive_ord(seq):
    fires = sum(1 for a, b in zip(seq, seq[1:]) if a == "transition" and b != "transition")
    return 1 + fires


def _markov(rng, p_on, p_off, size):
    state = np.zeros(size, dtype=bool)
    cur = bool(rng.random() < 0.5)
    flips = rng.random(size).tolist()
    for k in range(size):
        cur = (flips[k] >= p_off) if cur else (flips[k] < p_on)
        state[k] = cur
    return state


def micro_game(rng: np.random.Generator, n_frames: int | None = None) -> Tracking:
    """Random stream with long occupancy runs, player dropouts, off-court excursions and time gaps."""
    n = int(rng.integers(1, 2001)) if n_frames is None else n_frames
    n_players = int(rng.integers(5, 8))
    shape = (n, n_players)
    steps = np.where(rng.random(n) < 0.02, rng.integers(2, 6, n) * PERIOD, PERIOD)
    steps[0] = int(rng.integers(0, 5)) * PERIOD
    t = np.cumsum(steps)

    slow = _markov(rng, 0.02, 0.01, n)
    speed = np.where(slow[:, None], rng.uniform(0, 6, shape), rng.uniform(4, 20, shape))
    heading = rng.uniform(0, 2 * math.pi, shape)
    ftsa = np.stack([_markov(rng, 0.01, 0.02, n) for _ in range(n_players)], axis=1)
    away = np.stack([_markov(rng, 0.002, 0.05, n) for _ in range(n_players)], axis=1)
    for p in range(5, n_players):
        away[:, p] = _markov(rng, 0.05, 0.005, n)
    present = rng.random(shape) > 0.01

    x = rng.uniform(-1400, 1400, shape)
    y = rng.uniform(-750, 750, shape)
    side = np.where(np.arange(n_players) % 2 == 1, 1.0, -1.0)
    r = 175 * np.sqrt(rng.random(shape))
    a = rng.uniform(0, 2 * math.pi, shape)
    x = np.where(ftsa, side * 820 + r * np.cos(a), x)
    y = np.where(ftsa, r * np.sin(a), y)
    x = np.where(away, rng.uniform(-1500, 1500, shape), x)
    y = np.where(away, rng.choice([-1.0, 1.0], shape) * rng.uniform(760, 900, shape), y)

    pid = np.broadcast_to(np.arange(n_players), shape)
    offsets = np.concatenate(([0], np.cumsum(present.sum(axis=1))))
    return Tracking(
        t,
        offsets,
        pid[present],
        [f"p{p}" for p in range(n_players)],
        x[present],
        y[present],
        (speed * np.cos(heading))[present],
        (speed * np.sin(heading))[present],
    )
