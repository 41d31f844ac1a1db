"""Deterministic walk simulator producing a replayable event trace.

A pedestrian moves along one road by linear interpolation between
scripted waypoints at a fixed tick.  Each tick the nearest not-yet-read
tag inside the read radius triggers a read; the read runs through the
analysis protocol, Braille rendering and pin scheduling, and draws one
unit from the power source.  A tag re-arms only after leaving its
radius, so standing still does not spam reads.

The trace serializes to JSON Lines, one event per line with keys
``time``, ``kind`` and ``payload``.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from . import braille
from .reader_protocol import ReaderState, ingest
from .street_map import RoadId, StreetMap

__all__ = [
    "PowerSource",
    "PowerState",
    "PowerEvent",
    "WalkScript",
    "TraceEvent",
    "SimConfig",
    "UnknownRoad",
    "step_power",
    "simulate",
    "trace_to_jsonl",
    "load_script",
    "script_from_doc",
]

MAX_READ_RADIUS_M = 10.0  # passive tag read range ceiling

EVENT_KINDS = ("TagRead", "Message", "Frame", "PinCommands",
               "LowBatteryAlarm", "SourceSwitch")


class UnknownRoad(KeyError):
    """The walk script references a road the map does not contain."""


class PowerSource(Enum):
    LIB = "LIB"
    SOLAR_CELL = "SolarCell"


@dataclass(frozen=True)
class PowerState:
    """Lithium-ion battery with a solar-cell fallback.

    When the charge first reaches the low threshold, a low-battery alarm
    fires and the source switches to the solar cell, which is treated as
    an inexhaustible standby supply.
    """

    capacity: int = 100
    low_threshold: int = 10
    lib_charge: int = -1
    source: PowerSource = PowerSource.LIB
    alarm_emitted: bool = False

    def __post_init__(self):
        if self.lib_charge < 0:
            object.__setattr__(self, "lib_charge", self.capacity)


@dataclass(frozen=True)
class PowerEvent:
    kind: str
    payload: dict


def step_power(state: PowerState, draw: int) -> tuple[PowerState, list[PowerEvent]]:
    """Apply one draw; emits alarm + source switch on threshold crossing."""
    if draw < 0:
        raise ValueError("draw must be >= 0")
    if draw == 0 or state.source is PowerSource.SOLAR_CELL:
        return state, []
    new_state = replace(state, lib_charge=max(0, state.lib_charge - draw))
    events: list[PowerEvent] = []
    if not state.alarm_emitted and new_state.lib_charge <= state.low_threshold:
        events = [
            PowerEvent("LowBatteryAlarm", {
                "lib_charge": new_state.lib_charge,
                "low_threshold": state.low_threshold,
            }),
            PowerEvent("SourceSwitch", {
                "from": PowerSource.LIB.value,
                "to": PowerSource.SOLAR_CELL.value,
            }),
        ]
        new_state = replace(new_state, source=PowerSource.SOLAR_CELL, alarm_emitted=True)
    return new_state, events


@dataclass(frozen=True)
class WalkScript:
    """One road, timed waypoints, and the reader's radius."""

    road: RoadId
    waypoints: tuple[tuple[float, float], ...]
    read_radius_m: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "road", RoadId(*self.road))
        object.__setattr__(self, "waypoints",
                           tuple((float(t), float(p)) for t, p in self.waypoints))
        if len(self.waypoints) < 1:
            raise ValueError("walk script needs at least one waypoint")
        times = [t for t, _ in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")
        if not 0 < self.read_radius_m <= MAX_READ_RADIUS_M:
            raise ValueError(f"read_radius_m must be in (0, {MAX_READ_RADIUS_M}]")

    def position_at(self, t: float) -> float:
        times = [wt for wt, _ in self.waypoints]
        if t <= times[0]:
            return self.waypoints[0][1]
        if t >= times[-1]:
            return self.waypoints[-1][1]
        i = bisect_right(times, t)
        t0, p0 = self.waypoints[i - 1]
        t1, p1 = self.waypoints[i]
        return p0 + (p1 - p0) * (t - t0) / (t1 - t0)


@dataclass(frozen=True)
class TraceEvent:
    time: float
    kind: str
    payload: dict

    def as_dict(self) -> dict:
        return {"time": self.time, "kind": self.kind, "payload": self.payload}


@dataclass(frozen=True)
class SimConfig:
    tick_s: float = 0.5
    draw_per_cycle: int = 1
    fifo_capacity: int = 8


def simulate(street_map: StreetMap, script: WalkScript,
             power: PowerState | None = None,
             config: SimConfig = SimConfig()) -> list[TraceEvent]:
    """Run the walk; returns the full event trace in time order."""
    try:
        placements = street_map.placements_for(script.road)
    except KeyError:
        raise UnknownRoad(script.road) from None
    power = power if power is not None else PowerState()
    state = ReaderState(capacity=config.fifo_capacity)
    prev_frame = braille.BLANK_FRAME
    latched: set[int] = set()
    trace: list[TraceEvent] = []

    t0 = script.waypoints[0][0]
    t_end = script.waypoints[-1][0]
    k = 0
    while (t := t0 + k * config.tick_s) <= t_end + 1e-9:
        pos = script.position_at(t)
        in_range = {
            i for i, p in enumerate(placements)
            if abs(p.position_m - pos) <= script.read_radius_m
        }
        latched &= in_range  # leaving the radius re-arms a tag
        candidates = sorted(
            in_range - latched,
            key=lambda i: (abs(placements[i].position_m - pos), placements[i].position_m),
        )
        if candidates:
            i = candidates[0]
            tag = placements[i]
            latched.add(i)
            trace.append(TraceEvent(t, "TagRead", {
                "position_m": tag.position_m,
                "hex": tag.word.hex,
                "serial": tag.fields.serial,
                "road": {"main": tag.fields.main_road,
                         "sub": tag.fields.sub_road,
                         "path": tag.fields.path},
            }))
            state, message = ingest(state, tag.fields, street_map)
            if message is not None:
                trace.append(TraceEvent(t, "Message", {
                    "line1": message.line1,
                    "line2": message.line2,
                    "confidence": message.confidence.value,
                    "heading": state.heading.value,
                }))
                frame = braille.render_frame(message)
                trace.append(TraceEvent(t, "Frame", {
                    "lines": frame_lines(frame),
                }))
                commands = braille.pin_schedule(prev_frame, frame)
                trace.append(TraceEvent(t, "PinCommands", {
                    "commands": [c.as_dict() for c in commands],
                }))
                prev_frame = frame
                power, power_events = step_power(power, config.draw_per_cycle)
                trace.extend(TraceEvent(t, e.kind, e.payload) for e in power_events)
        k += 1
    return trace


def frame_lines(frame: braille.BrailleFrame) -> list[str]:
    return braille.frame_to_unicode(frame).split("\n")


def trace_to_jsonl(trace: list[TraceEvent]) -> str:
    lines = [
        json.dumps(e.as_dict(), sort_keys=True, separators=(",", ":"))
        for e in trace
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def script_from_doc(doc: dict) -> WalkScript:
    rid = doc.get("road", {})
    return WalkScript(
        road=RoadId(int(rid.get("main", 0)), int(rid.get("sub", 0)),
                    int(rid.get("path", 0))),
        waypoints=tuple((float(t), float(p)) for t, p in doc["waypoints"]),
        read_radius_m=float(doc.get("read_radius_m", 2.0)),
    )


def load_script(path: str | Path) -> WalkScript:
    return script_from_doc(json.loads(Path(path).read_text(encoding="utf-8")))
