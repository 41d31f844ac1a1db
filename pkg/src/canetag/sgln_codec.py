"""Bit-exact codec for the 96-bit road tag word.

The word is an SGLN-96 derivative whose payload regions are subdivided
for street navigation.  Fields are packed MSB-first in this order:

    bits    width   field
    95..88  8       header
    87..85  3       filter_value
    84..82  3       partition
    81..64  18      company_code
    63..62  2       tag_direction
    61..56  6       main_road
    55..49  7       sub_road
    48..41  8       path
    40      1       extension lead bit, always 1
    39..30  10      building_number
    29..28  2       feature_direction
    27..23  5       road_condition
    22..0   23      serial

Canonical text form is 24 uppercase hex characters, bit 95 being the
most significant bit of the first character.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

__all__ = [
    "DirectionCode",
    "CodecConfig",
    "TagFields",
    "TagWord",
    "CodecError",
    "FieldOverflow",
    "BadExtensionBit",
    "BadHeader",
    "BadLength",
    "BadCharacter",
    "encode",
    "decode",
    "flip_direction",
    "to_hex",
    "from_hex",
    "DEFAULT_CONFIG",
    "FIELD_WIDTHS",
]


class CodecError(ValueError):
    """Base class for tag word encode/decode failures."""


class FieldOverflow(CodecError):
    """A field value does not fit its allotted bit width."""

    def __init__(self, field: str, value: int, width: int):
        self.field = field
        self.value = value
        self.width = width
        super().__init__(f"{field}={value} does not fit in {width} bits")


class BadExtensionBit(CodecError):
    """The extension component's constant lead bit (bit 40) is not 1."""


class BadHeader(CodecError):
    """Strict decode found a header byte other than the configured one."""


class BadLength(CodecError):
    """Hex text is not exactly 24 characters."""


class BadCharacter(CodecError):
    """Hex text contains a non-hexadecimal character."""


class DirectionCode(IntEnum):
    """Two-bit relative direction.

    Right and left are bitwise complements (00/11), as are forward and
    backward (10/01), so reversing a pedestrian's heading is a NOT.
    """

    RIGHT = 0b00
    BACKWARD = 0b01
    FORWARD = 0b10
    LEFT = 0b11

    @classmethod
    def parse(cls, value: "DirectionCode | int | str") -> "DirectionCode":
        """Coerce an int code or a case-insensitive name to a code."""
        if isinstance(value, DirectionCode):
            return value
        if isinstance(value, str):
            try:
                return cls[value.upper()]
            except KeyError:
                raise ValueError(f"unknown direction name: {value!r}") from None
        return cls(value)


def flip_direction(d: DirectionCode) -> DirectionCode:
    """Two-bit bitwise complement: right<->left, forward<->backward."""
    return DirectionCode(d ^ 0b11)


@dataclass(frozen=True)
class CodecConfig:
    """Constants the tag application leaves fixed.

    The defaults follow the standard SGLN-96 header byte and the
    partition that splits the payload into a 20-bit company prefix and
    21-bit location reference.
    """

    header: int = 0x32
    filter_value: int = 0
    partition: int = 6


DEFAULT_CONFIG = CodecConfig()

# (field name, bit width), MSB-first packing order.  The constant
# extension lead bit sits between "path" and "building_number".
FIELD_WIDTHS: tuple[tuple[str, int], ...] = (
    ("header", 8),
    ("filter_value", 3),
    ("partition", 3),
    ("company_code", 18),
    ("tag_direction", 2),
    ("main_road", 6),
    ("sub_road", 7),
    ("path", 8),
    ("building_number", 10),
    ("feature_direction", 2),
    ("road_condition", 5),
    ("serial", 23),
)

_EXTENSION_BIT = 40  # constant 1, immediately above building_number


@dataclass(frozen=True)
class TagFields:
    """Decoded tag content: header constants plus nine application fields."""

    company_code: int
    tag_direction: DirectionCode
    main_road: int
    sub_road: int
    path: int
    building_number: int
    feature_direction: DirectionCode
    road_condition: int
    serial: int
    header: int = DEFAULT_CONFIG.header
    filter_value: int = DEFAULT_CONFIG.filter_value
    partition: int = DEFAULT_CONFIG.partition

    def __post_init__(self):
        object.__setattr__(self, "tag_direction", DirectionCode.parse(self.tag_direction))
        object.__setattr__(self, "feature_direction", DirectionCode.parse(self.feature_direction))
        for name, width in FIELD_WIDTHS:
            value = getattr(self, name)
            if not 0 <= value < (1 << width):
                raise FieldOverflow(name, value, width)

    @property
    def road(self) -> tuple[int, int, int]:
        return (self.main_road, self.sub_road, self.path)

    def resolved(self, tag_direction: DirectionCode, feature_direction: DirectionCode) -> "TagFields":
        """Copy with both direction fields replaced."""
        return replace(self, tag_direction=tag_direction, feature_direction=feature_direction)


@dataclass(frozen=True)
class TagWord:
    """A 96-bit tag word."""

    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << 96):
            raise CodecError("tag word must fit in 96 bits")

    @property
    def hex(self) -> str:
        return f"{self.bits:024X}"


def encode(fields: TagFields, config: CodecConfig | None = None) -> TagWord:
    """Pack fields MSB-first into a 96-bit word.

    The extension lead bit is forced to 1; it is never an input field.
    ``config`` is unused here (header constants travel inside ``fields``)
    but accepted for symmetry with :func:`decode`.
    """
    del config
    word = 0
    for name, width in FIELD_WIDTHS:
        word = (word << width) | int(getattr(fields, name))
        if name == "path":
            word = (word << 1) | 1
    return TagWord(word)


def decode(word: TagWord, *, strict: bool = False,
           config: CodecConfig = DEFAULT_CONFIG) -> TagFields:
    """Unpack a 96-bit word; exact inverse of :func:`encode`.

    Raises BadExtensionBit when bit 40 is clear.  With ``strict`` set,
    also raises BadHeader when the header byte differs from the
    configured constant.
    """
    if not (word.bits >> _EXTENSION_BIT) & 1:
        raise BadExtensionBit("extension lead bit (bit 40) must be 1")
    values = {}
    shift = 96
    for name, width in FIELD_WIDTHS:
        shift -= width
        if name == "building_number":
            shift -= 1  # skip the constant extension bit
        values[name] = (word.bits >> shift) & ((1 << width) - 1)
    if strict and values["header"] != config.header:
        raise BadHeader(
            f"header 0x{values['header']:02X} != configured 0x{config.header:02X}")
    values["tag_direction"] = DirectionCode(values["tag_direction"])
    values["feature_direction"] = DirectionCode(values["feature_direction"])
    return TagFields(**values)


def to_hex(word: TagWord) -> str:
    """Canonical 24-character uppercase hex form."""
    return word.hex


def from_hex(text: str) -> TagWord:
    """Parse the canonical hex form (exactly 24 hex characters)."""
    if len(text) != 24:
        raise BadLength(f"expected 24 hex characters, got {len(text)}")
    try:
        bits = int(text, 16)
    except ValueError:
        raise BadCharacter(f"not a hex string: {text!r}") from None
    return TagWord(bits)
