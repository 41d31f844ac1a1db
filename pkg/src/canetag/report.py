"""Walk-report rendering: figures plus a delimited read log.

Turns a simulation trace into reviewable artifacts in an output
directory: the raw JSONL trace, a CSV of reads joined with their
messages, and three matplotlib figures (walk timeline, battery drain,
road layout).
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .cane_sim import PowerState, SimConfig, TraceEvent, WalkScript, trace_to_jsonl
from .street_map import Side, StreetMap

__all__ = ["write_report", "walk_figure", "battery_figure", "road_figure"]


def walk_figure(trace: list[TraceEvent], script: WalkScript, path: Path) -> None:
    """Position-vs-time path with a marker per tag read."""
    fig, ax = plt.subplots(figsize=(7, 4))
    times = [t for t, _ in script.waypoints]
    positions = [p for _, p in script.waypoints]
    ax.plot(times, positions, color="steelblue", lw=1.5, label="pedestrian")
    reads = [e for e in trace if e.kind == "TagRead"]
    if reads:
        ax.scatter([e.time for e in reads],
                   [e.payload["position_m"] for e in reads],
                   color="crimson", zorder=3, label="tag read")
        for e in reads:
            ax.annotate(f"s{e.payload['serial']}",
                        (e.time, e.payload["position_m"]),
                        textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("position (m)")
    ax.set_title("Walk timeline")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def battery_figure(trace: list[TraceEvent], power: PowerState,
                   config: SimConfig, path: Path) -> None:
    """Reconstructed LIB charge per read-display cycle."""
    cycles = [e.time for e in trace if e.kind == "Message"]
    charge = [power.capacity]
    level = power.capacity
    on_lib = True
    for _ in cycles:
        if on_lib:
            level = max(0, level - config.draw_per_cycle)
            if level <= power.low_threshold:
                on_lib = False
        charge.append(level)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.step(range(len(charge)), charge, where="post", color="seagreen")
    ax.axhline(power.low_threshold, color="crimson", ls="--", lw=1,
               label=f"low threshold ({power.low_threshold})")
    alarms = [e for e in trace if e.kind == "LowBatteryAlarm"]
    if alarms:
        ax.annotate("alarm + switch to solar", (len(cycles), charge[-1]),
                    textcoords="offset points", xytext=(-10, 12), fontsize=8,
                    color="crimson")
    ax.set_xlabel("read-display cycle")
    ax.set_ylabel("LIB charge")
    ax.set_title("Battery drain")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def road_figure(street_map: StreetMap, script: WalkScript, path: Path) -> None:
    """1-D road diagram: tags on the line, buildings and features offset."""
    road = street_map.road(script.road)
    placements = street_map.placements_for(script.road)
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.hlines(0, 0, road.length_m, color="gray", lw=2)
    ax.scatter([p.position_m for p in placements], [0] * len(placements),
               marker="s", color="black", zorder=3, label="tag")
    for p in placements:
        ax.annotate(str(p.fields.serial), (p.position_m, 0),
                    textcoords="offset points", xytext=(0, -14),
                    ha="center", fontsize=8)
    for b in road.buildings:
        y = 0.5 if b.side is Side.RIGHT else -0.5
        ax.scatter([b.position_m], [y], marker="^", color="steelblue", zorder=3)
        ax.annotate(f"{b.name} No {b.number}", (b.position_m, y),
                    textcoords="offset points", xytext=(0, 6),
                    ha="center", fontsize=8)
    condition_names = {code: name for name, code in street_map.conditions.items()}
    for f in road.features:
        ax.scatter([f.position_m], [0.2], marker="x", color="crimson", zorder=3)
        ax.annotate(condition_names.get(f.condition, str(f.condition)).lower(),
                    (f.position_m, 0.2), textcoords="offset points",
                    xytext=(0, 6), ha="center", fontsize=7, color="crimson")
    ax.set_ylim(-1, 1)
    ax.set_yticks([])
    ax.set_xlabel("position (m)")
    title = road.name or f"road {road.id.main}.{road.id.sub}.{road.id.path}"
    ax.set_title(f"Tag layout: {title}")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def reads_csv(trace: list[TraceEvent], path: Path) -> None:
    """Delimited read log: each read joined with the message it produced."""
    rows = []
    current: dict | None = None
    for e in trace:
        if e.kind == "TagRead":
            current = {"time": e.time, "position_m": e.payload["position_m"],
                       "serial": e.payload["serial"], "hex": e.payload["hex"],
                       "line1": "", "line2": "", "confidence": "", "heading": ""}
            rows.append(current)
        elif e.kind == "Message" and current is not None:
            current.update({k: e.payload[k]
                            for k in ("line1", "line2", "confidence", "heading")})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "time", "position_m", "serial", "hex",
            "line1", "line2", "confidence", "heading"])
        writer.writeheader()
        writer.writerows(rows)


def write_report(street_map: StreetMap, script: WalkScript, trace: list[TraceEvent],
                 power: PowerState, config: SimConfig, out_dir: str | Path) -> list[Path]:
    """Write trace, CSV and figures into out_dir; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    trace_path = out / "trace.jsonl"
    trace_path.write_text(trace_to_jsonl(trace), encoding="utf-8")
    written.append(trace_path)

    csv_path = out / "reads.csv"
    reads_csv(trace, csv_path)
    written.append(csv_path)

    figures = [
        ("walk_timeline.png", lambda p: walk_figure(trace, script, p)),
        ("battery.png", lambda p: battery_figure(trace, power, config, p)),
        ("road_layout.png", lambda p: road_figure(street_map, script, p)),
    ]
    for name, render in figures:
        fig_path = out / name
        render(fig_path)
        written.append(fig_path)
    return written
