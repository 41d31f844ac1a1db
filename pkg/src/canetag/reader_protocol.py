"""Cane-side tag analysis: FIFO buffering, heading inference, messages.

Serial numbers increase along each road's positive direction, so the
sign of the delta between the last two distinct serials on the current
road gives the pedestrian's heading.  Walking against the serials, both
direction codes in a tag are inverted (a 2-bit NOT) before the message
is composed, so "entrance on the right" correctly becomes "entrance on
the left" for a pedestrian coming the other way.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Protocol

from .sgln_codec import DirectionCode, TagFields, flip_direction

__all__ = [
    "Heading",
    "Confidence",
    "ReaderState",
    "PedestrianMessage",
    "UnknownCode",
    "ingest",
    "infer_heading",
    "resolve_directions",
    "compose_message",
]

DEFAULT_FIFO_CAPACITY = 8


class UnknownCode(LookupError):
    """A tag code has no entry in the resolving registry."""


class Heading(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"


class Confidence(Enum):
    VERIFIED = "verified"
    UNVERIFIED = "unverified"


class NameCatalog(Protocol):
    """Resolves tag codes to display names (street_map.StreetMap does)."""

    def company_name(self, code: int) -> str: ...
    def condition_name(self, code: int) -> str: ...
    def road_label(self, road_id) -> str: ...


@dataclass(frozen=True)
class PedestrianMessage:
    line1: str
    line2: str
    confidence: Confidence


@dataclass(frozen=True)
class ReaderState:
    """FIFO of recent reads plus the inferred heading; a pure value."""

    reads: tuple[TagFields, ...] = ()
    heading: Heading = Heading.UNKNOWN
    road: tuple[int, int, int] | None = None
    capacity: int = DEFAULT_FIFO_CAPACITY


def infer_heading(prev_serial: int, cur_serial: int) -> Heading:
    """Heading from two serials on the same road; equal means duplicate."""
    if cur_serial > prev_serial:
        return Heading.POSITIVE
    if cur_serial < prev_serial:
        return Heading.NEGATIVE
    return Heading.UNKNOWN


def resolve_directions(fields: TagFields, heading: Heading) -> tuple[DirectionCode, DirectionCode]:
    """Both direction codes, NOT-ed when walking against the serials."""
    if heading is Heading.NEGATIVE:
        return flip_direction(fields.tag_direction), flip_direction(fields.feature_direction)
    return fields.tag_direction, fields.feature_direction


def compose_message(fields: TagFields, heading: Heading,
                    catalog: NameCatalog) -> PedestrianMessage:
    """Two display lines: location identity, then feature + direction.

    Directions are resolved against the heading first.  Messages made
    before the heading is known carry unflipped directions and are
    marked unverified.
    """
    _, feature_dir = resolve_directions(fields, heading)
    try:
        company = catalog.company_name(fields.company_code)
    except KeyError:
        raise UnknownCode(f"company code {fields.company_code}") from None
    label = catalog.road_label(fields.road)
    parts = [company.upper()] if company else []
    if fields.building_number:
        parts.append(str(fields.building_number))
    if label:
        parts.append(label)
    line1 = " ".join(parts)

    if fields.road_condition:
        try:
            condition = catalog.condition_name(fields.road_condition)
        except KeyError:
            raise UnknownCode(f"condition code {fields.road_condition}") from None
        line2 = f"{condition.replace('_', ' ').upper()} {feature_dir.name}"
    else:
        line2 = ""
    confidence = Confidence.UNVERIFIED if heading is Heading.UNKNOWN else Confidence.VERIFIED
    return PedestrianMessage(line1, line2, confidence)


def ingest(state: ReaderState, fields: TagFields,
           catalog: NameCatalog | None = None) -> tuple[ReaderState, PedestrianMessage | None]:
    """Feed one decoded tag through the analysis protocol.

    Consecutive reads of the same serial on the same road are duplicate
    re-reads: dropped with no message and no state change.  A road
    change resets the heading (cross-road serial deltas mean nothing).
    A message is composed for every non-duplicate read when a catalog is
    supplied.
    """
    prev = state.reads[-1] if state.reads else None
    if prev is not None and state.road == fields.road and prev.serial == fields.serial:
        return state, None

    if prev is not None and state.road == fields.road:
        heading = infer_heading(prev.serial, fields.serial)
    else:
        heading = Heading.UNKNOWN

    reads = (state.reads + (fields,))[-state.capacity:]
    new_state = replace(state, reads=reads, heading=heading, road=fields.road)
    message = compose_message(fields, heading, catalog) if catalog is not None else None
    return new_state, message
