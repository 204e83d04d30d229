import subprocess
import sys

import pytest

from courtactive.cli import run
from courtactive.ingest import read_tracking, tracking_to_text
from courtactive.synth import GameScript, Segment, format_script, generate, planted_script

HEADER = "t_ms,player_id,pos_x_cm,pos_y_cm,vel_x_kmh,vel_y_kmh\n"


@pytest.fixture
def planted_files(tmp_path):
    script_path = tmp_path / "game.script"
    script_path.write_text(format_script(planted_script(seconds=600, seed=21)))
    assert run(["simulate", str(script_path), "-o", str(tmp_path / "game")]) == 0
    return tmp_path / "game"


def test_simulate_outputs(planted_files, capsys):
    assert len(read_tracking(planted_files / "tracking.csv")) == 30_000
    assert (planted_files / "activity.csv").read_text().startswith("action,sec,active")
    assert (planted_files / "possession.csv").read_text().startswith("action,sec,off\noff,1,1")


def test_tune_recovers_planted_speed(planted_files, tmp_path, capsys):
    out = tmp_path / "tune"
    assert run(["tune", str(planted_files / "tracking.csv"), str(planted_files / "activity.csv"), "-o", str(out)]) == 0
    printed = capsys.readouterr().out
    v_star = float(printed.split("v_min_star_kmh: ")[1].split()[0])
    assert abs(v_star - 8.0) <= 0.5
    assert "t_vel_star_s: 3" in printed
    assert (out / "auc_table.csv").read_text().count("\n") == 82
    assert (out / "youden_table.csv").read_text().startswith("t_vel_s,sensitivity,specificity,youden\n0,")
    assert (out / "grid.csv").read_text().count("\n") == 1 + 81 * 21


def test_filter_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADER)
    assert run(["filter", str(empty), "-o", str(tmp_path / "f")]) == 0
    assert "frames in: 0" in capsys.readouterr().out
    assert (tmp_path / "f" / "xr.csv").read_text() == HEADER
    zero_bytes = tmp_path / "zero.csv"
    zero_bytes.write_text("")
    assert run(["filter", str(zero_bytes), "-o", str(tmp_path / "g")]) == 0


def test_label_constant_offence(tmp_path, capsys):
    x = generate(GameScript((Segment(20, "active-offence", 5, 12),), seed=0)).tracking
    path = tmp_path / "xr.csv"
    path.write_text(tracking_to_text(x))
    assert run(["label", str(path), "-o", str(tmp_path / "l")]) == 0
    assert "possessions: 1" in capsys.readouterr().out
    assert (tmp_path / "l" / "labels.csv").read_text().startswith("t_ms,mean_x_cm,poss,ord\n0,")


def test_filter_label_evaluate_chain(planted_files, tmp_path, capsys):
    f, l, e = tmp_path / "f", tmp_path / "l", tmp_path / "e"
    assert run(["filter", str(planted_files / "tracking.csv"), "-o", str(f), "--v-min-kmh", "8", "--t-vel-s", "3"]) == 0
    assert run(["label", str(f / "xr.csv"), "-o", str(l), "--activity-report", str(planted_files / "activity.csv")]) == 0
    capsys.readouterr()
    args = ["evaluate", "--mask", str(f / "mask.csv"), "--labels", str(l / "labels.csv"),
            "--activity", str(planted_files / "activity.csv"), "--possession", str(planted_files / "possession.csv"), "-o", str(e)]
    assert run(args) == 0
    out = capsys.readouterr().out
    assert "activity sensitivity: 1.0" in out and "activity specificity: 1.0" in out
    offdef = next(line for line in out.splitlines() if line.startswith("offdef tp="))
    assert offdef.endswith("fp=0 fn=0")
    assert "offdef accordance: 1.0" in out
    assert (e / "timeline.csv").read_text().startswith("sec,truth_active,pred_active,truth_poss,pred_poss\n1,1,1,off,off")


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(HEADER + "0,1,x,0,0,0\n")
    assert run(["filter", str(bad), "-o", str(tmp_path / "o")]) == 3
    assert run(["filter", str(tmp_path / "missing.csv"), "-o", str(tmp_path / "o")]) == 2
    assert run(["frobnicate"]) == 2
    unfiltered = tmp_path / "six.csv"
    unfiltered.write_text(HEADER + "".join(f"0,{i},{i * 10},0,0,0\n" for i in range(6)))
    assert run(["label", str(unfiltered), "-o", str(tmp_path / "o")]) == 4
    game = generate(GameScript((Segment(10, "active-offence", 5, 12),), seed=0))
    trk = tmp_path / "t.csv"
    trk.write_text(tracking_to_text(game.tracking))
    act = tmp_path / "a.csv"
    act.write_text("action,sec,active,timeout,ft,quarter,half\nplay,1,1,0,0,0,0\n")
    assert run(["tune", str(trk), str(act), "-o", str(tmp_path / "o")]) == 5
    cfg = tmp_path / "c.cfg"
    cfg.write_text("v_min_kmh = -1\n")
    assert run(["filter", str(trk), "-o", str(tmp_path / "o"), "--config", str(cfg)]) == 3
    assert run(["tune", str(trk), str(act), "-o", str(tmp_path / "o"), "--grid-vmin", "1:2"]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "courtactive", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "simulate" in proc.stdout
