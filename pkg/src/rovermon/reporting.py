"""Telemetry CSV export/import and structured run reports."""

import json
import os

from .errors import ConfigError
from .scenario import COLUMNS, TelemetryLog

# Columns written as integers rather than shortest round-trip decimals.
_INT_COLUMNS = {"alarm_psi", "alarm_v"}


def export_csv(log, path):
    """Write a telemetry log as UTF-8 CSV with the fixed column order.

    Floats are rendered as shortest round-trip decimals, so re-exporting an
    identical log is byte-identical.
    """
    if len(log) == 0:
        raise ConfigError("refusing to export an empty telemetry log")
    int_idx = {i for i, name in enumerate(COLUMNS) if name in _INT_COLUMNS}
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(COLUMNS) + "\n")
        for row in log.rows:
            f.write(",".join(
                str(int(v)) if i in int_idx else repr(float(v))
                for i, v in enumerate(row)
            ) + "\n")


def load_csv(path):
    """Read a telemetry CSV back into a TelemetryLog."""
    log = TelemetryLog()
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        if tuple(header) != COLUMNS:
            raise ConfigError(f"{path}: unexpected telemetry header")
        for line in f:
            line = line.strip()
            if line:
                log.append(tuple(float(v) for v in line.split(",")))
    return log


def write_summary(summary, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary.as_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def build_report(summaries):
    """Cross-run report: per-run details plus an A/B/C comparison table."""
    if not summaries:
        raise ConfigError("report needs at least one run summary")
    comparison = []
    for s in summaries:
        d = s if isinstance(s, dict) else s.as_dict()
        case = d["name"].rsplit("_", 1)[-1] if "_" in d["name"] else ""
        comparison.append({
            "name": d["name"],
            "case": case,
            "config_hash": d["config_hash"],
            "adaptive_detections": len(d["detections"]),
            "first_detection_latency": (d["detection_latency"] or {}).get("first"),
            "min_health": d["min_health"],
            "health_end": d["health_end"],
            "waypoints_collected_plant": d["waypoints_collected_plant"],
            "waypoints_collected_observer": d["waypoints_collected_observer"],
            "final_collection_delta": (d["collection_deltas"] or [None])[-1],
        })
    comparison.sort(key=lambda row: row["name"])
    return {
        "runs": [s if isinstance(s, dict) else s.as_dict() for s in summaries],
        "comparison": comparison,
    }


def collect_summaries(directory):
    """Load every <run>/summary.json under a directory."""
    summaries = []
    for entry in sorted(os.listdir(directory)):
        candidate = os.path.join(directory, entry, "summary.json")
        if os.path.isfile(candidate):
            with open(candidate, "r", encoding="utf-8") as f:
                summaries.append(json.load(f))
    return summaries
