"""Codec tests against an independent bit-string packing oracle."""

import random

import pytest

from canetag.sgln_codec import (
    FIELD_WIDTHS,
    BadCharacter,
    BadExtensionBit,
    BadHeader,
    BadLength,
    DirectionCode,
    FieldOverflow,
    TagFields,
    TagWord,
    decode,
    encode,
    flip_direction,
    from_hex,
    to_hex,
)
from conftest import TABLE2_HEX


def oracle_hex(f: TagFields) -> str:
    """Pack by binary-string concatenation in table order (independent
    of the shift-based encoder under test)."""
    bits = (
        f"{f.header:08b}{f.filter_value:03b}{f.partition:03b}"
        f"{f.company_code:018b}{f.tag_direction:02b}"
        f"{f.main_road:06b}{f.sub_road:07b}{f.path:08b}"
        "1"
        f"{f.building_number:010b}{f.feature_direction:02b}"
        f"{f.road_condition:05b}{f.serial:023b}"
    )
    assert len(bits) == 96
    return f"{int(bits, 2):024X}"


def random_fields(rng: random.Random) -> TagFields:
    return TagFields(
        company_code=rng.randrange(1 << 18),
        tag_direction=DirectionCode(rng.randrange(4)),
        main_road=rng.randrange(1 << 6),
        sub_road=rng.randrange(1 << 7),
        path=rng.randrange(1 << 8),
        building_number=rng.randrange(1 << 10),
        feature_direction=DirectionCode(rng.randrange(4)),
        road_condition=rng.randrange(1 << 5),
        serial=rng.randrange(1 << 23),
        header=rng.randrange(1 << 8),
        filter_value=rng.randrange(1 << 3),
        partition=rng.randrange(1 << 3),
    )


def table2_fields(tag: str) -> TagFields:
    serials = {"A": 30, "B": 60, "C": 70, "D": 71}
    rows = {
        "A": dict(company_code=1, building_number=2,
                  feature_direction=DirectionCode.FORWARD, road_condition=0),
        "B": dict(company_code=2, building_number=4,
                  feature_direction=DirectionCode.RIGHT, road_condition=1),
        "C": dict(company_code=2, building_number=4,
                  feature_direction=DirectionCode.FORWARD, road_condition=3),
        "D": dict(company_code=3, building_number=6,
                  feature_direction=DirectionCode.BACKWARD, road_condition=3),
    }
    return TagFields(tag_direction=DirectionCode.RIGHT, main_road=0, sub_road=1,
                     path=0, serial=serials[tag], **rows[tag])


def test_encode_matches_oracle_on_random_fields():
    rng = random.Random(20240817)
    for _ in range(2000):
        f = random_fields(rng)
        assert encode(f).hex == oracle_hex(f)


def test_table2_words_match_frozen_oracle_values():
    for tag in "ABCD":
        assert encode(table2_fields(tag)).hex == TABLE2_HEX[tag]


def test_table2_tag_c_decodes_to_crosswalk_serial_70():
    fields = decode(from_hex(TABLE2_HEX["C"]))
    assert fields.road_condition == 3  # CROSSWALK
    assert fields.serial == 70
    assert fields.company_code == 2


def test_zero_fields_word_has_only_extension_bit_set():
    f = TagFields(0, 0, 0, 0, 0, 0, 0, 0, 0)
    word = encode(f)
    assert word.hex == "321800000000010000000000"
    # the application region (bits 81..0) carries exactly bit 40
    assert word.bits & ((1 << 82) - 1) == 1 << 40


def test_roundtrip_random_fields():
    rng = random.Random(7)
    for _ in range(1000):
        f = random_fields(rng)
        assert decode(encode(f)) == f


@pytest.mark.parametrize("name,width", FIELD_WIDTHS)
def test_field_overflow_names_the_field(name, width):
    kwargs = dict(company_code=0, tag_direction=0, main_road=0, sub_road=0,
                  path=0, building_number=0, feature_direction=0,
                  road_condition=0, serial=0)
    kwargs[name] = 1 << width
    if name in ("tag_direction", "feature_direction"):
        with pytest.raises(ValueError):
            TagFields(**kwargs)  # enum rejects out-of-range codes itself
        return
    with pytest.raises(FieldOverflow) as exc:
        TagFields(**kwargs)
    assert exc.value.field == name


def test_negative_field_overflows():
    with pytest.raises(FieldOverflow):
        TagFields(0, 0, 0, 0, 0, 0, 0, 0, serial=-1)


def test_company_code_capacity_boundary():
    with pytest.raises(FieldOverflow) as exc:
        TagFields(company_code=1 << 18, tag_direction=0, main_road=0,
                  sub_road=0, path=0, building_number=0, feature_direction=0,
                  road_condition=0, serial=0)
    assert exc.value.field == "company_code"


def test_cleared_extension_bit_rejected():
    word = from_hex(TABLE2_HEX["B"])
    with pytest.raises(BadExtensionBit):
        decode(TagWord(word.bits & ~(1 << 40)))


def test_strict_mode_rejects_foreign_header():
    f = table2_fields("A")
    foreign = TagFields(**{**_fields_dict(f), "header": 0x31})
    word = encode(foreign)
    assert decode(word).header == 0x31  # lenient accepts
    with pytest.raises(BadHeader):
        decode(word, strict=True)
    assert decode(encode(f), strict=True) == f


def _fields_dict(f: TagFields) -> dict:
    return {name: getattr(f, name) for name, _ in FIELD_WIDTHS}


def test_flip_direction_table_and_involution():
    assert flip_direction(DirectionCode.RIGHT) is DirectionCode.LEFT
    assert flip_direction(DirectionCode.LEFT) is DirectionCode.RIGHT
    assert flip_direction(DirectionCode.FORWARD) is DirectionCode.BACKWARD
    assert flip_direction(DirectionCode.BACKWARD) is DirectionCode.FORWARD
    for d in DirectionCode:
        assert flip_direction(flip_direction(d)) is d
        assert flip_direction(d) is not d


def test_direction_parse():
    assert DirectionCode.parse("Left") is DirectionCode.LEFT
    assert DirectionCode.parse(2) is DirectionCode.FORWARD
    with pytest.raises(ValueError):
        DirectionCode.parse("up")


def test_hex_zero_word():
    assert to_hex(TagWord(0)) == "0" * 24


def test_hex_roundtrip_random_words():
    rng = random.Random(99)
    for _ in range(500):
        w = TagWord(rng.getrandbits(96))
        assert from_hex(to_hex(w)) == w
        assert to_hex(w) == to_hex(w).upper()
        assert len(to_hex(w)) == 24


def test_hex_bad_length_and_character():
    with pytest.raises(BadLength):
        from_hex("0" * 23)
    with pytest.raises(BadLength):
        from_hex("0" * 25)
    with pytest.raises(BadCharacter):
        from_hex("G" + "0" * 23)


def test_field_widths_sum_to_96():
    assert sum(w for _, w in FIELD_WIDTHS) + 1 == 96  # +1 extension bit


def test_capacities_from_widths():
    widths = dict(FIELD_WIDTHS)
    assert 1 << widths["company_code"] == 262_144
    road_bits = widths["main_road"] + widths["sub_road"] + widths["path"]
    assert 1 << road_bits == 2_097_152
