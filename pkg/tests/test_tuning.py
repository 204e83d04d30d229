import io
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from courtactive.errors import RangeError, TuningError, UndefinedRateError
from courtactive.filters import FilterParams, filter_measurements
from courtactive.ground_truth import ActivityTimeline, ConfusionCounts, PredictionTimeline, aggregate_predictions, expand_activity
from courtactive.ingest import GridSpec
from courtactive.model import FIBA_COURT
from courtactive.synth import GameScript, Segment, generate, planted_script
from courtactive.tuning import (
    RocPoint,
    auc,
    confusion,
    roc_for_vmin,
    sensitivity,
    specificity,
    tune,
    write_auc_table,
    write_grid,
    write_youden_table,
    youden,
)


def _timeline(flags):
    flags = np.asarray(flags, dtype=bool)
    return ActivityTimeline(flags, tuple(None for _ in flags))


def _pred(flags):
    flags = np.asarray(flags, dtype=bool)
    return PredictionTimeline(flags, np.full(len(flags), -1, dtype=np.int8), np.full(len(flags), 50))


TEN = [True] * 4 + [False] * 6


def test_confusion_perfect_and_inverted():
    assert confusion(_pred(TEN), _timeline(TEN)) == ConfusionCounts(tp=4, tn=6, fp=0, fn=0)
    assert confusion(_pred([not v for v in TEN]), _timeline(TEN)) == ConfusionCounts(tp=0, tn=0, fp=6, fn=4)


def test_confusion_range_mismatch():
    with pytest.raises(RangeError):
        confusion(_pred(TEN), _timeline(TEN[:5]))


def test_confusion_random_recount():
    rng = np.random.default_rng(1)
    p, t = rng.random(120) < 0.4, rng.random(120) < 0.3
    c = confusion(_pred(p), _timeline(t))
    pairs = list(zip(p.tolist(), t.tolist()))
    assert (c.tp, c.tn, c.fp, c.fn) == (
        pairs.count((True, True)),
        pairs.count((False, False)),
        pairs.count((True, False)),
        pairs.count((False, True)),
    )
    assert c.total == 120


def test_rates():
    assert sensitivity(ConfusionCounts(tp=4, fn=0)) == 1
    assert sensitivity(ConfusionCounts(tp=1, fn=3)) == Fraction(1, 4)
    with pytest.raises(UndefinedRateError):
        sensitivity(ConfusionCounts(tn=3))
    with pytest.raises(UndefinedRateError):
        specificity(ConfusionCounts(tp=3))
    assert specificity(ConfusionCounts(tn=6, fp=2)) == Fraction(3, 4)


@pytest.mark.parametrize("sens,spec,j", [(1.0, 1.0, 1.0), (0.5, 0.5, 0.0), (0.9, 0.7, 0.6)])
def test_youden(sens, spec, j):
    assert youden(sens, spec) == pytest.approx(j, abs=1e-12)


def test_auc_examples():
    assert auc([]) == 0.5
    assert auc([RocPoint(0, 1)]) == 1.0
    assert auc([RocPoint(0.5, 0.5)]) == 0.5
    assert auc([RocPoint(0.25, 0.75)]) == pytest.approx(0.75, abs=1e-12)


unit = st.floats(0, 1)


@given(st.lists(unit, max_size=20))
def test_auc_diagonal_is_half(xs):
    assert auc([RocPoint(x, x) for x in xs]) == 0.5


@given(st.lists(st.tuples(unit, unit), max_size=15), st.randoms())
def test_auc_permutation_invariant(pts, rnd):
    points = [RocPoint(a, b) for a, b in pts]
    shuffled = points[:]
    rnd.shuffle(shuffled)
    assert auc(points) == auc(shuffled)
    assert 0 <= auc(points) <= 1


def test_roc_point_range():
    with pytest.raises(ValueError):
        RocPoint(1.5, 0)


@pytest.fixture(scope="module")
def small_game():
    script = planted_script(seconds=120, seed=11)
    game = generate(script)
    truth = expand_activity(game.activity, script.duration_s)
    return game.tracking, truth


def test_roc_for_vmin_cardinality_and_zero_speed(small_game):
    x, truth = small_game
    assert len(roc_for_vmin(8.0, [2000], x, FIBA_COURT, 10_000, truth)) == 1
    pts = roc_for_vmin(0.0, [0, 1000, 5000], x, FIBA_COURT, 10_000, truth)
    assert len({(p.fpr, p.tpr) for p in pts}) == 1


def test_tune_matches_pipeline_recomputation(small_game):
    x, truth = small_game
    grid = GridSpec(v_min=(6.0, 10.0, 0.5), t_vel=(0, 6000, 1000))
    result = tune(x, FIBA_COURT, 10_000, truth, grid, workers=3)
    for v in grid.v_min_values():
        points = roc_for_vmin(v, grid.t_vel_values(), x, FIBA_COURT, 10_000, truth)
        assert [(p.fpr, p.tpr) for p in points] == [(p.fpr, p.tpr) for p in result.roc_points(v)]
        for t in grid.t_vel_values():
            _, mask = filter_measurements(x, FIBA_COURT, FilterParams(10_000, v, t))
            assert result.grid[v, t] == confusion(aggregate_predictions(mask, truth.duration_s), truth)
    assert result.auc_star == max(result.auc_by_vmin)
    best = max(
        float(sensitivity(result.grid[result.v_min_star, t]) + specificity(result.grid[result.v_min_star, t]))
        for t in grid.t_vel_values()
    )
    assert float(result.youden_star) + 1 == pytest.approx(best, abs=1e-12)


def test_roc_points_monotone_in_t_vel(small_game):
    x, truth = small_game
    result = tune(x, FIBA_COURT, 10_000, truth, GridSpec(v_min=(4.0, 12.0, 2.0), t_vel=(0, 8000, 500)))
    for v in result.v_min_values:
        pts = result.roc_points(v)
        assert all(a.fpr >= b.fpr and a.tpr >= b.tpr for a, b in zip(pts, pts[1:]))


def test_singleton_grid(small_game):
    x, truth = small_game
    result = tune(x, FIBA_COURT, 10_000, truth, GridSpec(v_min=(8.0, 8.0, 1.0), t_vel=(3000, 3000, 1000)))
    assert result.v_min_star == 8.0 and result.t_vel_star == 3000
    assert result.auc_star == auc(result.roc_points(8.0))


def test_all_active_truth_is_degenerate():
    game = generate(GameScript((Segment(20, "active-offence"),), seed=0))
    truth = expand_activity(game.activity, 20)
    with pytest.raises(TuningError):
        tune(game.tracking, FIBA_COURT, 10_000, truth, GridSpec())


def test_ties_choose_smallest():
    # identical streams for every V_min above the active speeds -> equal AUCs
    game = generate(GameScript((Segment(10, "active-offence", 1, 2), Segment(10, "inactive-stop", 1, 2)), seed=0))
    truth = expand_activity(game.activity, 20)
    result = tune(game.tracking, FIBA_COURT, 10_000, truth, GridSpec(v_min=(5.0, 6.0, 0.5), t_vel=(0, 2000, 1000)))
    assert len(set(result.auc_by_vmin)) == 1
    assert result.v_min_star == 5.0


def test_parallel_and_serial_agree(small_game):
    x, truth = small_game
    grid = GridSpec(v_min=(0.0, 20.0, 1.0), t_vel=(0, 20_000, 2000))
    outputs = []
    for workers in (1, 4):
        r = tune(x, FIBA_COURT, 10_000, truth, grid, workers=workers)
        buf = io.StringIO()
        write_auc_table(r, buf)
        write_youden_table(r, buf)
        write_grid(r, buf)
        outputs.append(buf.getvalue())
    assert outputs[0] == outputs[1]
    assert outputs[0].startswith("v_min_kmh,auc\n0.0,")
