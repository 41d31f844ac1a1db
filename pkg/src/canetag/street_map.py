"""Registries and the road-side tag infrastructure planner.

A street map holds a company registry, a condition registry, and a set
of roads.  Planning a road lays tags on a fixed-spacing grid (default
8 m) plus one tag at every road feature, assigns strictly increasing
serial numbers along the walking-positive direction, and encodes each
tag into its 96-bit word.

Map file schema (JSON): top-level keys ``companies`` (name -> code),
``conditions`` (name -> code) and ``roads``; each road is
``{id: {main, sub, path}, length_m, buildings, features, spacing_m,
serial_overrides}`` with buildings ``{name, number, side, position_m}``
and features ``{condition, direction, position_m, building}``.  Planned
placements are emitted per road as ``{position_m, hex}`` pairs.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path
from typing import NamedTuple

from .sgln_codec import (
    DEFAULT_CONFIG,
    CodecConfig,
    DirectionCode,
    TagFields,
    TagWord,
    decode,
    encode,
    from_hex,
)

__all__ = [
    "ConditionCode",
    "DEFAULT_CONDITIONS",
    "Side",
    "RoadId",
    "Building",
    "RoadFeature",
    "Road",
    "TagPlacement",
    "NameRegistry",
    "StreetMap",
    "Violation",
    "RegistryFull",
    "InvalidBuilding",
    "OverflowSerial",
    "PlanError",
    "plan_road",
    "validate",
    "load_map",
    "save_map",
]

MAX_SERIAL = (1 << 23) - 1


class RegistryFull(ValueError):
    """No free codes remain in a name registry."""


class InvalidBuilding(ValueError):
    """Building number parity contradicts its declared road side."""


class OverflowSerial(ValueError):
    """A planned serial number exceeds the 23-bit field."""


class PlanError(ValueError):
    """Road description is structurally unusable by the planner."""


class ConditionCode(IntEnum):
    """Built-in 5-bit road condition registry (values 6..31 reserved)."""

    NONE = 0
    ENTRANCE = 1
    STAIRS = 2
    CROSSWALK = 3
    TRAFFIC_LIGHT = 4
    TURN = 5


DEFAULT_CONDITIONS: dict[str, int] = {c.name: int(c) for c in ConditionCode}


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"

    @classmethod
    def parse(cls, value: "Side | str") -> "Side":
        if isinstance(value, Side):
            return value
        return cls(value.lower())

    @property
    def direction(self) -> DirectionCode:
        return DirectionCode.LEFT if self is Side.LEFT else DirectionCode.RIGHT


class RoadId(NamedTuple):
    """Numeric road identity; 0 is null in any position."""

    main: int = 0
    sub: int = 0
    path: int = 0


@dataclass(frozen=True)
class Building:
    name: str
    number: int
    side: Side
    position_m: float

    def __post_init__(self):
        object.__setattr__(self, "side", Side.parse(self.side))

    @property
    def parity_ok(self) -> bool:
        # odd numbers sit on the left side of the road, even on the right
        return (self.number % 2 == 1) == (self.side is Side.LEFT)


@dataclass(frozen=True)
class RoadFeature:
    condition: int
    direction: DirectionCode
    position_m: float
    building: int

    def __post_init__(self):
        object.__setattr__(self, "direction", DirectionCode.parse(self.direction))
        if self.condition == ConditionCode.NONE:
            raise PlanError("road feature condition must not be NONE")


@dataclass(frozen=True)
class Road:
    id: RoadId
    length_m: float
    buildings: tuple[Building, ...] = ()
    features: tuple[RoadFeature, ...] = ()
    spacing_m: float = 8.0
    serial_overrides: tuple[int, ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "id", RoadId(*self.id))
        object.__setattr__(self, "buildings", tuple(self.buildings))
        object.__setattr__(self, "features", tuple(self.features))
        if self.serial_overrides is not None:
            object.__setattr__(self, "serial_overrides", tuple(self.serial_overrides))
        if self.length_m <= 0:
            raise PlanError("road length_m must be > 0")
        if self.spacing_m <= 0:
            raise PlanError("road spacing_m must be > 0")


@dataclass(frozen=True)
class TagPlacement:
    position_m: float
    fields: TagFields
    word: TagWord


class NameRegistry:
    """Idempotent name -> code allocator; code 0 is reserved as null.

    Used for company names (18-bit codes) and road names alike.  The
    start offset is configurable so capacity exhaustion can be tested
    without performing 262k inserts.
    """

    def __init__(self, capacity_bits: int = 18, *, start: int = 1,
                 entries: dict[str, int] | None = None):
        self.capacity = 1 << capacity_bits
        self._codes: dict[str, int] = {}
        self._next = start
        if entries:
            for name, code in entries.items():
                self._codes[name] = code
            self._next = max(self._next, max(entries.values()) + 1)

    def register(self, name: str) -> int:
        if not name:
            raise ValueError("name must be nonempty")
        existing = self._codes.get(name)
        if existing is not None:
            return existing
        if self._next >= self.capacity:
            raise RegistryFull(f"all {self.capacity} codes exhausted")
        code = self._next
        self._codes[name] = code
        self._next += 1
        return code

    def code(self, name: str) -> int:
        return self._codes[name]

    def name(self, code: int) -> str:
        for name, c in self._codes.items():
            if c == code:
                return name
        raise KeyError(code)

    def as_dict(self) -> dict[str, int]:
        return dict(self._codes)

    def __contains__(self, name: str) -> bool:
        return name in self._codes

    def __len__(self) -> int:
        return len(self._codes)


def _grid_positions(length_m: float, spacing_m: float) -> list[float]:
    positions = []
    k = 0
    while True:
        pos = k * spacing_m
        if pos > length_m:
            break
        positions.append(pos)
        k += 1
    return positions


def plan_road(road: Road, companies: NameRegistry | dict[str, int], *,
              serial_base: int = 1,
              config: CodecConfig = DEFAULT_CONFIG) -> list[TagPlacement]:
    """Lay out and encode the tags for one road.

    Grid tags sit at 0, spacing, 2*spacing, ... up to the road length;
    every feature adds a tag at its exact position (replacing a grid tag
    it coincides with).  Serials are assigned in increasing position
    order from ``serial_base``, unless the road carries explicit
    overrides (one per tag, strictly increasing).

    Grid tags name the building whose position is the greatest one at or
    before the tag (ties to the lower number); feature tags name their
    associated building.  A tag's direction code is the side of the
    building it names.
    """
    codes = companies.as_dict() if isinstance(companies, NameRegistry) else dict(companies)
    for b in road.buildings:
        if not b.parity_ok:
            raise InvalidBuilding(
                f"building {b.number} declared on the {b.side.value} side")
        if b.position_m < 0:
            raise PlanError(f"building {b.number}: negative position")
    buildings = sorted(road.buildings, key=lambda b: (b.position_m, b.number))
    by_number = {b.number: b for b in buildings}
    positions = [b.position_m for b in buildings]

    def building_at(pos: float) -> Building | None:
        i = bisect_right(positions, pos)
        return buildings[i - 1] if i else None

    entries: list[tuple[float, RoadFeature | None]] = [
        (pos, None) for pos in _grid_positions(road.length_m, road.spacing_m)]
    for feat in road.features:
        if not 0 <= feat.position_m <= road.length_m:
            raise PlanError(f"feature at {feat.position_m} m is off the road")
        if feat.building not in by_number:
            raise PlanError(f"feature references unknown building {feat.building}")
        entries = [(p, f) for p, f in entries if not (f is None and p == feat.position_m)]
        entries.append((feat.position_m, feat))
    entries.sort(key=lambda e: e[0])

    if road.serial_overrides is not None:
        if len(road.serial_overrides) != len(entries):
            raise PlanError(
                f"serial_overrides has {len(road.serial_overrides)} entries "
                f"for {len(entries)} tags")
        serials = list(road.serial_overrides)
        if any(b <= a for a, b in zip(serials, serials[1:])):
            raise PlanError("serial_overrides must be strictly increasing")
    else:
        serials = list(range(serial_base, serial_base + len(entries)))
    if serials and serials[-1] > MAX_SERIAL:
        raise OverflowSerial(f"serial {serials[-1]} exceeds {MAX_SERIAL}")

    placements = []
    for (pos, feat), serial in zip(entries, serials):
        ref = by_number[feat.building] if feat else building_at(pos)
        if ref is not None:
            company = codes.get(ref.name)
            if company is None:
                raise PlanError(f"building name {ref.name!r} is not a registered company")
            number, tag_dir = ref.number, ref.side.direction
        else:
            company, number, tag_dir = 0, 0, DirectionCode.FORWARD
        fields = TagFields(
            company_code=company,
            tag_direction=tag_dir,
            main_road=road.id.main,
            sub_road=road.id.sub,
            path=road.id.path,
            building_number=number,
            feature_direction=feat.direction if feat else DirectionCode.FORWARD,
            road_condition=feat.condition if feat else ConditionCode.NONE,
            serial=serial,
            header=config.header,
            filter_value=config.filter_value,
            partition=config.partition,
        )
        placements.append(TagPlacement(pos, fields, encode(fields)))
    return placements


@dataclass
class StreetMap:
    """Company/condition registries, roads, and planned placements."""

    companies: NameRegistry = field(default_factory=NameRegistry)
    conditions: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_CONDITIONS))
    roads: list[Road] = field(default_factory=list)
    placements: dict[RoadId, list[TagPlacement]] = field(default_factory=dict)
    config: CodecConfig = DEFAULT_CONFIG

    def road(self, road_id: RoadId) -> Road | None:
        road_id = RoadId(*road_id)
        for road in self.roads:
            if road.id == road_id:
                return road
        return None

    def plan(self, *, serial_base: int = 1) -> "StreetMap":
        """(Re)plan every road; deterministic for identical inputs."""
        self.placements = {
            road.id: plan_road(road, self.companies, serial_base=serial_base,
                               config=self.config)
            for road in self.roads
        }
        return self

    def placements_for(self, road_id: RoadId) -> list[TagPlacement]:
        road_id = RoadId(*road_id)
        if self.road(road_id) is None:
            raise KeyError(road_id)
        if road_id not in self.placements:
            self.placements[road_id] = plan_road(
                self.road(road_id), self.companies, config=self.config)
        return self.placements[road_id]

    # -- name resolution for message composition ----------------------

    def company_name(self, code: int) -> str:
        if code == 0:
            return ""
        return self.companies.name(code)

    def condition_name(self, code: int) -> str:
        for name, c in self.conditions.items():
            if c == code:
                return name
        raise KeyError(code)

    def road_label(self, road_id: RoadId) -> str:
        road = self.road(RoadId(*road_id))
        if road is None or not road.name:
            return ""
        label = road.name.strip()
        lowered = label.lower()
        for suffix in (" main road", " sub road", " road", " path"):
            if lowered.endswith(suffix):
                label = label[: -len(suffix)]
                break
        return label.strip().upper()


@dataclass(frozen=True)
class Violation:
    kind: str  # InvalidBuilding | SerialOrder | DecodeMismatch
    road: RoadId
    detail: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "road": list(self.road), "detail": self.detail}


def validate(street_map: StreetMap) -> list[Violation]:
    """Check every map invariant; violations are data, not errors."""
    violations = []
    for road in street_map.roads:
        for b in road.buildings:
            if not b.parity_ok:
                violations.append(Violation(
                    "InvalidBuilding", road.id,
                    f"building {b.number} declared on the {b.side.value} side"))
        placed = street_map.placements.get(road.id, [])
        for p in placed:
            try:
                decoded = decode(p.word)
            except Exception as exc:
                violations.append(Violation(
                    "DecodeMismatch", road.id,
                    f"tag at {p.position_m} m does not decode: {exc}"))
                continue
            if decoded != p.fields:
                violations.append(Violation(
                    "DecodeMismatch", road.id,
                    f"tag at {p.position_m} m decodes to different fields"))
        ordered = sorted(placed, key=lambda p: p.position_m)
        for a, b in zip(ordered, ordered[1:]):
            if b.fields.serial <= a.fields.serial:
                violations.append(Violation(
                    "SerialOrder", road.id,
                    f"serial {b.fields.serial} at {b.position_m} m follows "
                    f"{a.fields.serial} at {a.position_m} m"))
    return violations


# -- JSON map document ------------------------------------------------

def _road_to_doc(road: Road, condition_names: dict[int, str]) -> dict:
    doc: dict = {
        "id": {"main": road.id.main, "sub": road.id.sub, "path": road.id.path},
        "length_m": road.length_m,
        "buildings": [
            {"name": b.name, "number": b.number, "side": b.side.value,
             "position_m": b.position_m}
            for b in road.buildings
        ],
        "features": [
            {"condition": condition_names.get(f.condition, f.condition),
             "direction": f.direction.name.lower(),
             "position_m": f.position_m, "building": f.building}
            for f in road.features
        ],
        "spacing_m": road.spacing_m,
        "serial_overrides": list(road.serial_overrides) if road.serial_overrides else None,
    }
    if road.name:
        doc["name"] = road.name
    return doc


def map_to_doc(street_map: StreetMap) -> dict:
    condition_names = {code: name for name, code in street_map.conditions.items()}
    doc = {
        "companies": street_map.companies.as_dict(),
        "conditions": dict(street_map.conditions),
        "roads": [_road_to_doc(road, condition_names) for road in street_map.roads],
    }
    if street_map.placements:
        doc["placements"] = {
            _road_key(road_id): [
                {"position_m": p.position_m, "hex": p.word.hex} for p in placed
            ]
            for road_id, placed in street_map.placements.items()
        }
    return doc


def _road_key(road_id: RoadId) -> str:
    return f"{road_id.main}.{road_id.sub}.{road_id.path}"


def _parse_condition(value, conditions: dict[str, int]) -> int:
    if isinstance(value, str):
        try:
            return conditions[value]
        except KeyError:
            raise PlanError(f"unknown condition name: {value!r}") from None
    return int(value)


def map_from_doc(doc: dict, *, config: CodecConfig = DEFAULT_CONFIG) -> StreetMap:
    conditions = {str(k): int(v) for k, v in doc.get("conditions", DEFAULT_CONDITIONS).items()}
    companies = NameRegistry(entries={str(k): int(v) for k, v in doc.get("companies", {}).items()})
    roads = []
    for rdoc in doc.get("roads", []):
        rid = rdoc["id"]
        roads.append(Road(
            id=RoadId(int(rid.get("main", 0)), int(rid.get("sub", 0)), int(rid.get("path", 0))),
            length_m=float(rdoc["length_m"]),
            buildings=tuple(
                Building(b["name"], int(b["number"]), Side.parse(b["side"]),
                         float(b["position_m"]))
                for b in rdoc.get("buildings", [])
            ),
            features=tuple(
                RoadFeature(_parse_condition(f["condition"], conditions),
                            DirectionCode.parse(f["direction"]),
                            float(f["position_m"]), int(f["building"]))
                for f in rdoc.get("features", [])
            ),
            spacing_m=float(rdoc.get("spacing_m", 8.0)),
            serial_overrides=(tuple(int(s) for s in rdoc["serial_overrides"])
                              if rdoc.get("serial_overrides") else None),
            name=str(rdoc.get("name", "")),
        ))
    street_map = StreetMap(companies=companies, conditions=conditions,
                           roads=roads, config=config)
    for key, placed in doc.get("placements", {}).items():
        main, sub, path = (int(x) for x in key.split("."))
        street_map.placements[RoadId(main, sub, path)] = [
            TagPlacement(float(p["position_m"]),
                         decode(from_hex(p["hex"])),
                         from_hex(p["hex"]))
            for p in placed
        ]
    return street_map


def save_map(street_map: StreetMap, path: str | Path) -> None:
    Path(path).write_text(dumps_map(street_map) + "\n", encoding="utf-8")


def dumps_map(street_map: StreetMap) -> str:
    return json.dumps(map_to_doc(street_map), indent=2, sort_keys=True)


def load_map(path: str | Path, *, config: CodecConfig = DEFAULT_CONFIG) -> StreetMap:
    return map_from_doc(json.loads(Path(path).read_text(encoding="utf-8")), config=config)
