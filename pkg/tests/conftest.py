"""Shared fixtures: the Figure-2/Table-2 street scene and walk scripts."""

from pathlib import Path

import pytest

from canetag.cane_sim import WalkScript
from canetag.street_map import (
    Building,
    ConditionCode,
    Road,
    RoadFeature,
    RoadId,
    StreetMap,
)

DATA_DIR = Path(__file__).parent / "data"

Y_SUB_ROAD = RoadId(0, 1, 0)

# Frozen via an independent bit-string packing oracle (see test_sgln_codec).
TABLE2_HEX = {
    "A": "3218000100020100A000001E",
    "B": "32180002000201010080003C",
    "C": "321800020002010121800046",
    "D": "321800030002010191800047",
}
TABLE2_SERIALS = (30, 60, 70, 71)


def build_table2_map() -> StreetMap:
    """One sub road: M shop No 2, N company No 4 (entrance + crosswalk),
    W office No 6 (crosswalk); sparse grid so exactly four tags come out."""
    street_map = StreetMap()
    for name in ("M shop", "N company", "W office"):
        street_map.companies.register(name)
    street_map.roads.append(Road(
        id=Y_SUB_ROAD,
        length_m=30.0,
        spacing_m=32.0,
        name="Y sub road",
        buildings=(
            Building("M shop", 2, "right", 0.0),
            Building("N company", 4, "right", 10.0),
            Building("W office", 6, "right", 25.0),
        ),
        features=(
            RoadFeature(ConditionCode.ENTRANCE, "right", 12.0, 4),
            RoadFeature(ConditionCode.CROSSWALK, "forward", 18.0, 4),
            RoadFeature(ConditionCode.CROSSWALK, "backward", 26.0, 6),
        ),
        serial_overrides=TABLE2_SERIALS,
    ))
    return street_map.plan()


@pytest.fixture
def table2_map() -> StreetMap:
    return build_table2_map()


@pytest.fixture
def forward_walk() -> WalkScript:
    return WalkScript(road=Y_SUB_ROAD, waypoints=((0.0, 0.0), (30.0, 30.0)),
                      read_radius_m=2.0)


@pytest.fixture
def reverse_walk() -> WalkScript:
    return WalkScript(road=Y_SUB_ROAD, waypoints=((0.0, 30.0), (30.0, 0.0)),
                      read_radius_m=2.0)
