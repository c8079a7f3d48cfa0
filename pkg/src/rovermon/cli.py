"""Command line entry point.

Commands:
    run     execute one scenario from a JSON config file
    batch   execute all builtin scenarios and write a combined report
    list    show the builtin scenario names
    report  build report.json from run summaries under a directory
    plot    render figures from an exported telemetry CSV

Exit codes: 0 success, 1 usage/config error, 2 simulation abort.
"""

import argparse
import json
import os
import sys

from . import config as config_mod
from .errors import ConfigError, RoverMonError, SimulationError
from .plots import emit_plots
from .reporting import (
    build_report, collect_summaries, export_csv, load_csv, write_summary,
)
from .scenario import run_scenario

OUT_ENV_VAR = "ROVERMON_OUT"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _default_out():
    return os.environ.get(OUT_ENV_VAR, "out")


def _build_parser():
    parser = _Parser(prog="rovermon",
                     description="Rover health monitoring and fault detection simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario from a config file")
    run.add_argument("--config", required=True, help="JSON scenario config")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="noise seed override")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="config override (dotted path)")
    run.add_argument("--no-plots", action="store_true", help="skip figure emission")

    batch = sub.add_parser("batch", help="run builtin scenarios")
    batch.add_argument("--all-builtin", action="store_true", required=True,
                       help="run every builtin scenario")
    batch.add_argument("--out", default=None, help="output directory")
    batch.add_argument("--seed", type=int, default=None, help="noise seed override")
    batch.add_argument("--no-plots", action="store_true", help="skip figure emission")

    sub.add_parser("list", help="list builtin scenario names")

    report = sub.add_parser("report", help="combine run summaries into report.json")
    report.add_argument("--in", dest="indir", required=True,
                        help="directory containing <run>/summary.json files")

    plot = sub.add_parser("plot", help="render figures from a telemetry CSV")
    plot.add_argument("--in", dest="incsv", required=True, help="telemetry CSV")
    plot.add_argument("--out", default=None, help="output directory")
    return parser


def _load_run_config(path, seed, overrides):
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: JSON syntax error at line {e.lineno}: {e.msg}")
    if overrides:
        raw = config_mod.apply_overrides(raw, overrides)
    cfg = config_mod.from_dict(raw)
    if seed is not None:
        cfg.noise["seed"] = seed
    return cfg


def _execute(cfg, outdir, make_plots=True):
    rundir = os.path.join(outdir, cfg.name)
    os.makedirs(rundir, exist_ok=True)
    try:
        log, summary = run_scenario(cfg)
    except SimulationError as e:
        partial = getattr(e, "log", None)
        if partial is not None and len(partial) > 0:
            export_csv(partial, os.path.join(rundir, "telemetry_partial.csv"))
        raise
    export_csv(log, os.path.join(rundir, "telemetry.csv"))
    write_summary(summary, os.path.join(rundir, "summary.json"))
    config_mod.write_config(cfg, os.path.join(rundir, "config.json"))
    if make_plots:
        emit_plots(log, summary, rundir, cfg)
    return summary


def _cmd_run(args):
    cfg = _load_run_config(args.config, args.seed, args.overrides)
    outdir = args.out or _default_out()
    summary = _execute(cfg, outdir, make_plots=not args.no_plots)
    print(f"{cfg.name}: {len(summary.detections)} adaptive detection(s), "
          f"min health {summary.min_health:.3f}, "
          f"output in {os.path.join(outdir, cfg.name)}")
    return 0


def _cmd_batch(args):
    outdir = args.out or _default_out()
    summaries = []
    for name in config_mod.BUILTIN_NAMES:
        cfg = config_mod.from_dict({"builtin": name})
        if args.seed is not None:
            cfg.noise["seed"] = args.seed
        summary = _execute(cfg, outdir, make_plots=not args.no_plots)
        summaries.append(summary)
        latency = summary.detection_latency.get("first") if summary.detection_latency else None
        latency_txt = f"{latency:.2f} s" if latency is not None else "-"
        print(f"{name}: detections={len(summary.detections)} "
              f"latency={latency_txt} min_health={summary.min_health:.3f}")
    report = build_report(summaries)
    report_path = os.path.join(outdir, "report.json")
    with open(report_path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"report written to {report_path}")
    return 0


def _cmd_list(_args):
    for name in config_mod.BUILTIN_NAMES:
        cfg = config_mod.from_dict({"builtin": name})
        faults = ", ".join(f["kind"] for f in cfg.faults) or "no fault"
        print(f"{name}: {len(cfg.mission['waypoints'])} waypoint(s), {faults}")
    return 0


def _cmd_report(args):
    summaries = collect_summaries(args.indir)
    report = build_report(summaries)
    report_path = os.path.join(args.indir, "report.json")
    with open(report_path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    for row in report["comparison"]:
        latency = row["first_detection_latency"]
        latency_txt = f"{latency:.2f} s" if latency is not None else "-"
        print(f"{row['name']}: detections={row['adaptive_detections']} "
              f"latency={latency_txt} min_health={row['min_health']:.3f}")
    print(f"report written to {report_path}")
    return 0


def _cmd_plot(args):
    log = load_csv(args.incsv)
    outdir = args.out or _default_out()
    written = emit_plots(log, None, outdir)
    for path in written:
        print(path)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "batch": _cmd_batch,
    "list": _cmd_list,
    "report": _cmd_report,
    "plot": _cmd_plot,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SimulationError as e:
        print(f"simulation aborted: {e}", file=sys.stderr)
        return 2
    except RoverMonError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
