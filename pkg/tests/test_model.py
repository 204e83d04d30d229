import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from courtactive.errors import ContractViolation, InvalidMeasurementError
from courtactive.model import (
    FIBA_COURT,
    CourtGeometry,
    Frame,
    PlayerSample,
    Tracking,
    in_court,
    in_court_array,
    in_ftsa,
    in_ftsa_array,
    planar_speed,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)
coord = st.floats(-3000, 3000, allow_nan=False)


@pytest.mark.parametrize("vx,vy,expected", [(3.0, 4.0, 5.0), (0.0, 0.0, 0.0), (-6.0, 8.0, 10.0)])
def test_planar_speed_examples(vx, vy, expected):
    assert planar_speed(vx, vy) == expected


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_planar_speed_rejects_non_finite(bad):
    with pytest.raises(InvalidMeasurementError):
        planar_speed(bad, 1.0)


@given(finite, finite)
def test_planar_speed_symmetries(a, b):
    s = planar_speed(a, b)
    assert s >= 0
    assert s == planar_speed(abs(a), abs(b)) == planar_speed(b, a)


@pytest.mark.parametrize(
    "x,y,expected", [(0, 0, True), (1500, 0, False), (-1400, 750, True), (0, 750.01, False)]
)
def test_in_court(x, y, expected):
    assert in_court(x, y, FIBA_COURT) is expected


@pytest.mark.parametrize("x,y,expected", [(820, 0, True), (820, 181, False), (0, 0, False), (-820, 180, True)])
def test_in_ftsa(x, y, expected):
    assert in_ftsa(x, y, FIBA_COURT) is expected


@given(coord, coord)
def test_in_ftsa_mirror_symmetry(x, y):
    assert in_ftsa(x, y) == in_ftsa(-x, y) == in_ftsa(x, -y)


@given(coord, coord)
def test_ftsa_inside_court(x, y):
    if in_ftsa(x, y):
        assert in_court(x, y)


@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=50))
def test_vectorized_predicates_match_scalar(points):
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    assert in_court_array(xs, ys, FIBA_COURT).tolist() == [in_court(x, y) for x, y in points]
    assert in_ftsa_array(xs, ys, FIBA_COURT).tolist() == [in_ftsa(x, y) for x, y in points]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(half_length=0),
        dict(ftsa_center_abs_x=1500),
        dict(ftsa_radius=800),
        dict(half_width=-1),
    ],
)
def test_geometry_validation(kwargs):
    with pytest.raises(ContractViolation):
        CourtGeometry(**kwargs)


def test_frame_rejects_duplicate_ids_and_negative_time():
    s = PlayerSample("1", 0, 0, 0, 0)
    with pytest.raises(ContractViolation):
        Frame(0, (s, s))
    with pytest.raises(ContractViolation):
        Frame(-20, (s,))


def test_player_sample_requires_finite_values():
    with pytest.raises(InvalidMeasurementError):
        PlayerSample("1", math.nan, 0, 0, 0)


def test_tracking_round_trips_frames():
    frames = [
        Frame(0, (PlayerSample("a", 1, 2, 3, 4), PlayerSample("b", 5, 6, 7, 8))),
        Frame(20, ()),
        Frame(40, (PlayerSample("b", 9, 10, 11, 12),)),
    ]
    x = Tracking.from_frames(frames)
    assert len(x) == 3
    assert list(x) == frames
    assert x[-1] == frames[-1]
    assert x[1:].equals(Tracking.from_frames(frames[1:]))
    assert x.frame_index.tolist() == [0, 0, 2]


def test_tracking_requires_increasing_time():
    with pytest.raises(ContractViolation):
        Tracking.from_frames([Frame(20), Frame(20)])
