"""Command-line entry point: ``courtactive {filter,label,tune,simulate,evaluate}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ContractViolation, InvalidMeasurementError, ParseError, TuningError, UndefinedRateError
from .filters import filter_measurements, parse_mask, write_mask
from .ground_truth import (
    aggregate_predictions,
    duration_for,
    expand_activity,
    expand_possession,
    offdef_accordance,
    write_timeline,
)
from .ingest import (
    Config,
    load_config,
    parse_activity_report,
    parse_possession_report,
    period_starts_from_activity,
    read_tracking,
    write_activity_report,
    write_possession_report,
    write_tracking,
)
from .model import Tracking
from .possession import label_possessions, parse_labels, write_labels
from .synth import generate, parse_script
from .tuning import (
    confusion,
    format_seconds,
    sensitivity,
    specificity,
    tune,
    write_auc_table,
    write_grid,
    write_youden_table,
    youden,
)

log = logging.getLogger("courtactive")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CONTRACT, EXIT_TUNING = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _add_config_flags(p: argparse.ArgumentParser, grids: bool = False) -> None:
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--t-ft-s", help="free-throw dwell threshold in seconds")
    p.add_argument("--v-min-kmh", help="low-speed threshold in km/h")
    p.add_argument("--t-vel-s", help="low-speed spell threshold in seconds")
    p.add_argument("--transition-band-cm", help="half-width of the mid-court transition band")
    p.add_argument("--attack-direction", help="comma list per period, e.g. +x,+x,-x,-x")
    if grids:
        p.add_argument("--grid-vmin", metavar="MIN:MAX:STEP", help="speed grid in km/h")
        p.add_argument("--grid-tvel", metavar="MIN:MAX:STEP", help="spell grid in seconds")


def _config(args) -> Config:
    cfg = load_config(args.config)
    values: dict[str, str] = {}
    for flag, key in (
        ("t_ft_s", "t_ft_s"),
        ("v_min_kmh", "v_min_kmh"),
        ("t_vel_s", "t_vel_s"),
        ("transition_band_cm", "transition_band_cm"),
    ):
        if getattr(args, flag, None) is not None:
            values[key] = getattr(args, flag)
    if getattr(args, "attack_direction", None):
        for k, d in enumerate(args.attack_direction.split(","), start=1):
            values[f"attack_direction_p{k}"] = d
    for flag, prefix in (("grid_vmin", "grid_vmin_"), ("grid_tvel", "grid_tvel_")):
        spec = getattr(args, flag, None)
        if spec is not None:
            parts = spec.split(":")
            if len(parts) != 3:
                raise UsageError(f"--{flag.replace('_', '-')} expects MIN:MAX:STEP, got {spec!r}")
            values.update({prefix + name: v for name, v in zip(("min", "max", "step"), parts)})
    return cfg.with_values(values) if values else cfg


def _read_tracking(path: Path) -> Tracking:
    if path.stat().st_size == 0:
        return Tracking.empty()
    return read_tracking(path)


def _read_text(path: Path) -> list[str]:
    with path.open(encoding="utf-8", newline="") as fh:
        return fh.readlines()


def _open_out(outdir: Path, name: str):
    return (outdir / name).open("w", encoding="utf-8", newline="")


def cmd_filter(args) -> int:
    cfg = _config(args)
    x = _read_tracking(args.tracking)
    xr, mask = filter_measurements(x, cfg.geometry, cfg.filter_params)
    with _open_out(args.out, "xr.csv") as fh:
        write_tracking(xr, fh)
    with _open_out(args.out, "mask.csv") as fh:
        write_mask(mask, fh)
    print(f"frames in: {len(x)}")
    print(f"frames out: {len(xr)}")
    for reason, count in mask.counts().items():
        print(f"dropped {reason}: {count}")
    return EXIT_OK


def cmd_label(args) -> int:
    cfg = _config(args)
    orientation = cfg.orientation
    if args.activity_report is not None:
        starts = period_starts_from_activity(parse_activity_report(_read_text(args.activity_report)))
        orientation = type(orientation)(orientation.directions, starts)
    xr = _read_tracking(args.xr)
    labeled = label_possessions(xr, cfg.geometry, orientation, cfg.transition_band_cm)
    with _open_out(args.out, "labels.csv") as fh:
        write_labels(labeled, fh)
    print(f"possessions: {labeled.possessions}")
    for name, count in labeled.counts().items():
        print(f"frames {name}: {count}")
    print(f"direct offence/defence flips: {labeled.direct_flips}")
    return EXIT_OK


def cmd_tune(args) -> int:
    cfg = _config(args)
    x = _read_tracking(args.tracking)
    rows = parse_activity_report(_read_text(args.activity_report))
    truth = expand_activity(rows, duration_for(x.t, rows))
    result = tune(x, cfg.geometry, cfg.t_ft_ms, truth, cfg.grid, workers=args.workers)
    with _open_out(args.out, "auc_table.csv") as fh:
        write_auc_table(result, fh)
    with _open_out(args.out, "youden_table.csv") as fh:
        write_youden_table(result, fh)
    with _open_out(args.out, "grid.csv") as fh:
        write_grid(result, fh)
    summary = (
        f"v_min_star_kmh: {result.v_min_star!r}\n"
        f"auc_star: {float(result.auc_star)!r}\n"
        f"t_vel_star_s: {format_seconds(result.t_vel_star)}\n"
        f"youden_star: {float(result.youden_star)!r}\n"
    )
    with _open_out(args.out, "tuning.txt") as fh:
        fh.write(summary)
    sys.stdout.write(summary)
    return EXIT_OK


def cmd_simulate(args) -> int:
    script = parse_script(_read_text(args.script))
    if args.seed is not None:
        script = type(script)(script.segments, args.seed, script.noise_cm, script.bench_players, script.ramp_s)
    game = generate(script)
    with _open_out(args.out, "tracking.csv") as fh:
        write_tracking(game.tracking, fh)
    with _open_out(args.out, "activity.csv") as fh:
        write_activity_report(game.activity, fh)
    with _open_out(args.out, "possession.csv") as fh:
        write_possession_report(game.possession, fh)
    print(f"frames: {len(game.tracking)}")
    print(f"seconds: {script.duration_s}")
    return EXIT_OK


def _rate_text(fn, counts) -> str:
    try:
        return repr(float(fn(counts)))
    except UndefinedRateError:
        return "undefined"


def cmd_evaluate(args) -> int:
    mask = parse_mask(_read_text(args.mask))
    labels = parse_labels(_read_text(args.labels))
    activity = parse_activity_report(_read_text(args.activity))
    possession = parse_possession_report(_read_text(args.possession))
    duration = duration_for(mask.t, activity, possession)
    truth = expand_activity(activity, duration)
    poss_truth = expand_possession(possession, duration) if possession else None
    pred = aggregate_predictions(mask, duration, labels)

    c = confusion(pred, truth)
    lines = [
        f"seconds: {duration}",
        f"activity tp={c.tp} tn={c.tn} fp={c.fp} fn={c.fn}",
        f"activity sensitivity: {_rate_text(sensitivity, c)}",
        f"activity specificity: {_rate_text(specificity, c)}",
    ]
    try:
        lines.append(f"activity youden: {float(youden(sensitivity(c), specificity(c)))!r}")
    except UndefinedRateError:
        lines.append("activity youden: undefined")
    if poss_truth is not None:
        acc, excluded = offdef_accordance(pred, poss_truth)
        compared = acc.total
        agree = repr((acc.tp + acc.tn) / compared) if compared else "undefined"
        lines += [
            f"offdef tp={acc.tp} tn={acc.tn} fp={acc.fp} fn={acc.fn}",
            f"offdef excluded seconds: {excluded}",
            f"offdef accordance: {agree}",
        ]
    text = "\n".join(lines) + "\n"
    with _open_out(args.out, "evaluation.txt") as fh:
        fh.write(text)
    with _open_out(args.out, "timeline.csv") as fh:
        write_timeline(fh, pred, truth, poss_truth)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="courtactive", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="drop inactive frames from a tracking file")
    p.add_argument("tracking", type=Path)
    p.add_argument("-o", "--out", type=Path, required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("label", help="label filtered frames by possession")
    p.add_argument("xr", type=Path)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.add_argument("--activity-report", type=Path, help="derive period boundaries from quarter/half intervals")
    _add_config_flags(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("tune", help="choose V_min by AUC and T_vel by Youden index")
    p.add_argument("tracking", type=Path)
    p.add_argument("activity_report", type=Path)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.add_argument("--workers", type=int, default=None)
    _add_config_flags(p, grids=True)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("simulate", help="generate a synthetic game from a script")
    p.add_argument("script", type=Path)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="compare predictions with both annotation reports")
    p.add_argument("--mask", type=Path, required=True)
    p.add_argument("--labels", type=Path, required=True)
    p.add_argument("--activity", type=Path, required=True)
    p.add_argument("--possession", type=Path, required=True)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.set_defaults(func=cmd_evaluate)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    log.debug("kernel backend: %s", kernels.BACKEND)
    try:
        for name in ("tracking", "xr", "activity_report", "script", "mask", "labels", "activity", "possession"):
            path = getattr(args, name, None)
            if path is not None and not path.is_file():
                raise UsageError(f"input file not found: {path}")
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ContractViolation, InvalidMeasurementError) as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (TuningError, UndefinedRateError) as exc:
        print(f"tuning error: {exc}", file=sys.stderr)
        return EXIT_TUNING


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
