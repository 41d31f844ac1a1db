import json
import random
from dataclasses import replace

import pytest

from canetag.sgln_codec import DirectionCode, TagWord, decode, encode
from canetag.street_map import (
    Building,
    ConditionCode,
    InvalidBuilding,
    NameRegistry,
    OverflowSerial,
    PlanError,
    RegistryFull,
    Road,
    RoadFeature,
    RoadId,
    Side,
    StreetMap,
    TagPlacement,
    dumps_map,
    load_map,
    map_from_doc,
    map_to_doc,
    plan_road,
    validate,
)
from conftest import DATA_DIR, TABLE2_HEX, TABLE2_SERIALS, Y_SUB_ROAD, build_table2_map


# -- registry ----------------------------------------------------------

def test_register_is_sequential_and_idempotent():
    reg = NameRegistry()
    assert reg.register("M shop") == 1
    assert reg.register("M shop") == 1
    assert reg.register("N company") == 2
    assert reg.register("W office") == 3
    assert reg.name(2) == "N company"
    assert reg.code("W office") == 3


def test_table2_names_get_distinct_codes():
    companies = NameRegistry()
    roads = NameRegistry(capacity_bits=7)
    codes = [companies.register(n) for n in ("M shop", "N company", "W office")]
    assert codes == [1, 2, 3]
    assert roads.register("Y sub road") == 1


def test_registry_full_at_capacity_boundary():
    reg = NameRegistry(start=(1 << 18) - 1)
    assert reg.register("last one") == (1 << 18) - 1
    with pytest.raises(RegistryFull):
        reg.register("one too many")


def test_register_rejects_empty_name():
    with pytest.raises(ValueError):
        NameRegistry().register("")


# -- planner -----------------------------------------------------------

def test_grid_spacing_and_sequential_serials():
    road = Road(id=RoadId(0, 1, 0), length_m=30.0, spacing_m=8.0)
    placements = plan_road(road, {})
    assert [p.position_m for p in placements] == [0.0, 8.0, 16.0, 24.0]
    assert [p.fields.serial for p in placements] == [1, 2, 3, 4]


def test_table2_scene_matches_frozen_words(table2_map):
    placements = table2_map.placements[Y_SUB_ROAD]
    assert [p.word.hex for p in placements] == [TABLE2_HEX[t] for t in "ABCD"]
    assert [p.fields.serial for p in placements] == list(TABLE2_SERIALS)
    b = placements[1].fields
    assert b.company_code == table2_map.companies.code("N company")
    assert b.tag_direction is DirectionCode.RIGHT
    assert b.feature_direction is DirectionCode.RIGHT
    assert b.road_condition == ConditionCode.ENTRANCE


def test_parity_violation_rejected_by_planner():
    road = Road(id=RoadId(0, 1, 0), length_m=10.0,
                buildings=(Building("M shop", 3, "right", 0.0),))
    with pytest.raises(InvalidBuilding):
        plan_road(road, {"M shop": 1})


def test_grid_tag_names_nearest_building_at_or_before():
    road = Road(
        id=RoadId(0, 1, 0), length_m=20.0, spacing_m=8.0,
        buildings=(Building("A co", 2, "right", 0.0),
                   Building("B co", 1, "left", 7.0)))
    placements = plan_road(road, {"A co": 1, "B co": 2})
    by_pos = {p.position_m: p.fields for p in placements}
    assert by_pos[0.0].building_number == 2
    assert by_pos[8.0].building_number == 1
    assert by_pos[8.0].tag_direction is DirectionCode.LEFT
    assert by_pos[16.0].building_number == 1


def test_tag_before_any_building_carries_null_company():
    road = Road(id=RoadId(0, 1, 0), length_m=8.0, spacing_m=8.0,
                buildings=(Building("A co", 2, "right", 5.0),))
    placements = plan_road(road, {"A co": 1})
    assert placements[0].fields.company_code == 0
    assert placements[0].fields.building_number == 0
    assert placements[1].fields.company_code == 1


def test_feature_replaces_coincident_grid_tag():
    road = Road(
        id=RoadId(0, 1, 0), length_m=16.0, spacing_m=8.0,
        buildings=(Building("A co", 2, "right", 0.0),),
        features=(RoadFeature(ConditionCode.STAIRS, "forward", 8.0, 2),))
    placements = plan_road(road, {"A co": 1})
    assert [p.position_m for p in placements] == [0.0, 8.0, 16.0]
    assert placements[1].fields.road_condition == ConditionCode.STAIRS


def test_serial_override_count_mismatch():
    road = Road(id=RoadId(0, 1, 0), length_m=30.0, spacing_m=8.0,
                serial_overrides=(1, 2))
    with pytest.raises(PlanError):
        plan_road(road, {})


def test_serial_overrides_must_increase():
    road = Road(id=RoadId(0, 1, 0), length_m=16.0, spacing_m=8.0,
                serial_overrides=(5, 3, 9))
    with pytest.raises(PlanError):
        plan_road(road, {})


def test_serial_overflow():
    road = Road(id=RoadId(0, 1, 0), length_m=10.0, spacing_m=8.0)
    with pytest.raises(OverflowSerial):
        plan_road(road, {}, serial_base=(1 << 23) - 1)


def test_feature_referencing_unknown_building():
    road = Road(id=RoadId(0, 1, 0), length_m=10.0,
                features=(RoadFeature(ConditionCode.TURN, "left", 4.0, 9),))
    with pytest.raises(PlanError):
        plan_road(road, {})


def test_feature_condition_none_rejected():
    with pytest.raises(PlanError):
        RoadFeature(ConditionCode.NONE, "left", 4.0, 2)


def test_planner_determinism():
    doc1 = dumps_map(build_table2_map())
    doc2 = dumps_map(build_table2_map())
    assert doc1 == doc2


def test_planner_serials_increase_with_position_random_roads():
    rng = random.Random(42)
    for _ in range(25):
        n_buildings = rng.randint(0, 5)
        buildings = []
        for i in range(n_buildings):
            number = rng.randint(1, 1023)
            side = Side.LEFT if number % 2 else Side.RIGHT
            buildings.append(Building(f"co {i}", number, side,
                                      round(rng.uniform(0, 90), 1)))
        features = []
        for b in buildings[: rng.randint(0, n_buildings)]:
            features.append(RoadFeature(
                rng.choice(list(ConditionCode)[1:]),
                DirectionCode(rng.randrange(4)),
                round(rng.uniform(0, 100), 1), b.number))
        road = Road(id=RoadId(1, 0, 0), length_m=100.0,
                    spacing_m=rng.choice([4.0, 8.0, 12.5]),
                    buildings=tuple(buildings), features=tuple(features))
        codes = {b.name: i + 1 for i, b in enumerate(buildings)}
        placements = plan_road(road, codes)
        ordered = sorted(placements, key=lambda p: p.position_m)
        serials = [p.fields.serial for p in ordered]
        assert serials == sorted(serials) and len(set(serials)) == len(serials)


# -- validate ----------------------------------------------------------

def test_fresh_plan_validates_clean(table2_map):
    assert validate(table2_map) == []


def test_swapped_serials_flagged(table2_map):
    placed = table2_map.placements[Y_SUB_ROAD]
    a, b = placed[1], placed[2]
    swapped_a = replace(a.fields, serial=b.fields.serial)
    swapped_b = replace(b.fields, serial=a.fields.serial)
    placed[1] = TagPlacement(a.position_m, swapped_a, encode(swapped_a))
    placed[2] = TagPlacement(b.position_m, swapped_b, encode(swapped_b))
    kinds = [v.kind for v in validate(table2_map)]
    assert kinds == ["SerialOrder"]


def test_tampered_word_bit_flagged(table2_map):
    placed = table2_map.placements[Y_SUB_ROAD]
    tag = placed[2]
    placed[2] = TagPlacement(tag.position_m, tag.fields,
                             TagWord(tag.word.bits ^ (1 << 17)))
    violations = validate(table2_map)
    assert [v.kind for v in violations] == ["DecodeMismatch"]


def test_parity_violation_reported_as_data():
    street_map = StreetMap()
    street_map.companies.register("M shop")
    street_map.roads.append(Road(
        id=RoadId(0, 1, 0), length_m=20.0,
        buildings=(Building("M shop", 3, "right", 0.0),)))
    kinds = [v.kind for v in validate(street_map)]
    assert kinds == ["InvalidBuilding"]


# -- JSON map document -------------------------------------------------

def test_map_doc_roundtrip(table2_map):
    doc = map_to_doc(table2_map)
    clone = map_from_doc(doc)
    assert dumps_map(clone) == dumps_map(table2_map)
    again = map_from_doc(json.loads(json.dumps(doc)))
    again.plan()
    assert dumps_map(again) == dumps_map(table2_map)


def test_fixture_file_plans_to_frozen_words():
    street_map = load_map(DATA_DIR / "table2_map.json").plan()
    placed = street_map.placements[Y_SUB_ROAD]
    assert [p.word.hex for p in placed] == [TABLE2_HEX[t] for t in "ABCD"]


def test_placements_survive_decode(table2_map):
    for placed in table2_map.placements.values():
        for p in placed:
            assert decode(p.word) == p.fields


def test_road_label_strips_category_suffix(table2_map):
    assert table2_map.road_label(Y_SUB_ROAD) == "Y"
    assert table2_map.road_label(RoadId(9, 9, 9)) == ""
