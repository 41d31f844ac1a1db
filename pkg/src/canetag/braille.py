"""Text to Braille cells, the 2x12 display frame, and pin scheduling.

Dot numbering follows the six-dot cell, two columns of three:

    1 4
    2 5
    3 6

A cell is a 6-bit mask, bit (n-1) for dot n, which is exactly the low
six bits of the Unicode Braille Patterns block (U+2800 + mask).  Digits
use the letter cells a-j behind a number-sign cell (dots 3,4,5,6).

The display is two lines of 12 cells.  Long lines are abbreviated with
a fixed word table, then hard-truncated; there is no scrolling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .reader_protocol import PedestrianMessage

__all__ = [
    "BrailleCell",
    "BrailleFrame",
    "PinCommand",
    "PinAction",
    "DimensionProfile",
    "PROFILES",
    "ABBREVIATIONS",
    "BLANK_CELL",
    "NUMBER_SIGN",
    "FRAME_LINES",
    "FRAME_CELLS",
    "UnsupportedCharacter",
    "MissingDimension",
    "char_to_cell",
    "text_to_cells",
    "render_frame",
    "frame_to_unicode",
    "frame_from_unicode",
    "pin_schedule",
    "apply_schedule",
    "line_width_mm",
]

FRAME_LINES = 2
FRAME_CELLS = 12

_UNICODE_BASE = 0x2800


class UnsupportedCharacter(ValueError):
    """Character outside the supported set (A-Z, 0-9, space, . ,)."""


class MissingDimension(ValueError):
    """The dimension profile lacks a value the computation needs."""


@dataclass(frozen=True)
class BrailleCell:
    """One six-dot cell as a 6-bit mask; 64 distinct values exist."""

    mask: int = 0

    def __post_init__(self):
        if not 0 <= self.mask < 64:
            raise ValueError("cell mask must fit in 6 bits")

    @classmethod
    def from_dots(cls, *dots: int) -> "BrailleCell":
        mask = 0
        for d in dots:
            if not 1 <= d <= 6:
                raise ValueError(f"dot index {d} out of range 1..6")
            mask |= 1 << (d - 1)
        return cls(mask)

    @property
    def dots(self) -> frozenset[int]:
        return frozenset(d for d in range(1, 7) if self.mask >> (d - 1) & 1)

    def has_dot(self, dot: int) -> bool:
        return bool(self.mask >> (dot - 1) & 1)


BLANK_CELL = BrailleCell(0)
NUMBER_SIGN = BrailleCell.from_dots(3, 4, 5, 6)

# Grade-1 English Braille, dots per letter.
_LETTER_DOTS = {
    "A": (1,), "B": (1, 2), "C": (1, 4), "D": (1, 4, 5), "E": (1, 5),
    "F": (1, 2, 4), "G": (1, 2, 4, 5), "H": (1, 2, 5), "I": (2, 4),
    "J": (2, 4, 5), "K": (1, 3), "L": (1, 2, 3), "M": (1, 3, 4),
    "N": (1, 3, 4, 5), "O": (1, 3, 5), "P": (1, 2, 3, 4),
    "Q": (1, 2, 3, 4, 5), "R": (1, 2, 3, 5), "S": (2, 3, 4),
    "T": (2, 3, 4, 5), "U": (1, 3, 6), "V": (1, 2, 3, 6),
    "W": (2, 4, 5, 6), "X": (1, 3, 4, 6), "Y": (1, 3, 4, 5, 6),
    "Z": (1, 3, 5, 6),
}
_PUNCT_DOTS = {" ": (), ".": (2, 5, 6), ",": (2,)}
_DIGIT_LETTER = {str(d): "ABCDEFGHIJ"[d - 1] for d in range(1, 10)} | {"0": "J"}

_CHAR_CELLS = (
    {c: BrailleCell.from_dots(*d) for c, d in _LETTER_DOTS.items()}
    | {c: BrailleCell.from_dots(*d) for c, d in _PUNCT_DOTS.items()}
    | {c: BrailleCell.from_dots(*_LETTER_DOTS[letter]) for c, letter in _DIGIT_LETTER.items()}
)

# Word abbreviations applied before truncation; multi-word entries first.
ABBREVIATIONS: dict[str, str] = {
    "TRAFFIC LIGHT": "LIGHT",
    "COMPANY": "CO",
    "ENTRANCE": "ENTR",
    "CROSSWALK": "XWALK",
    "STAIRS": "STAIR",
    "RIGHT": "R",
    "LEFT": "L",
    "FORWARD": "F",
    "BACKWARD": "B",
}


def char_to_cell(c: str) -> BrailleCell:
    """Cell for one character; digits get the a-j cell (no number sign)."""
    try:
        return _CHAR_CELLS[c.upper()]
    except KeyError:
        raise UnsupportedCharacter(f"no Braille cell for {c!r}") from None


def text_to_cells(text: str) -> list[BrailleCell]:
    """One cell per character, plus a number sign before each digit run."""
    cells = []
    in_digits = False
    for c in text.upper():
        if c.isdigit():
            if not in_digits:
                cells.append(NUMBER_SIGN)
            in_digits = True
        else:
            in_digits = False
        cells.append(char_to_cell(c))
    return cells


@dataclass(frozen=True)
class BrailleFrame:
    """Fixed 2x12 cell grid; unused trailing cells are blank."""

    lines: tuple[tuple[BrailleCell, ...], ...] = ()

    def __post_init__(self):
        rows = list(self.lines)[:FRAME_LINES]
        rows += [()] * (FRAME_LINES - len(rows))
        padded = tuple(
            (tuple(row) + (BLANK_CELL,) * FRAME_CELLS)[:FRAME_CELLS] for row in rows
        )
        object.__setattr__(self, "lines", padded)

    def cell(self, line: int, cell: int) -> BrailleCell:
        return self.lines[line][cell]


BLANK_FRAME = BrailleFrame()


def abbreviate(text: str) -> str:
    """Apply the word-abbreviation table (uppercases the text)."""
    out = text.upper()
    for word, short in ABBREVIATIONS.items():
        if " " in word:
            out = out.replace(word, short)
    words = [ABBREVIATIONS.get(w, w) for w in out.split(" ")]
    return " ".join(words)


def render_frame(msg: PedestrianMessage) -> BrailleFrame:
    """Abbreviate, convert, and hard-truncate each line to 12 cells."""
    return BrailleFrame(tuple(
        tuple(text_to_cells(abbreviate(line))[:FRAME_CELLS])
        for line in (msg.line1, msg.line2)
    ))


def frame_to_unicode(frame: BrailleFrame) -> str:
    """Two newline-separated rows of Unicode Braille Patterns characters."""
    return "\n".join(
        "".join(chr(_UNICODE_BASE + cell.mask) for cell in row) for row in frame.lines
    )


def frame_from_unicode(text: str) -> BrailleFrame:
    """Inverse of frame_to_unicode."""
    rows = []
    for line in text.split("\n"):
        row = []
        for ch in line:
            code = ord(ch) - _UNICODE_BASE
            if not 0 <= code < 64:
                raise UnsupportedCharacter(f"not a six-dot Braille character: {ch!r}")
            row.append(BrailleCell(code))
        rows.append(tuple(row))
    return BrailleFrame(tuple(rows))


class PinAction(Enum):
    RAISE = "raise"
    LOWER = "lower"


@dataclass(frozen=True)
class PinCommand:
    line: int
    cell: int
    dot: int
    action: PinAction

    def __post_init__(self):
        if not (0 <= self.line < FRAME_LINES and 0 <= self.cell < FRAME_CELLS
                and 1 <= self.dot <= 6):
            raise ValueError("pin command index out of range")

    def as_dict(self) -> dict:
        return {"line": self.line, "cell": self.cell, "dot": self.dot,
                "action": self.action.value}


def pin_schedule(prev: BrailleFrame, next_frame: BrailleFrame) -> list[PinCommand]:
    """Minimal raise/lower list turning prev into next, (line, cell, dot) order."""
    commands = []
    for li in range(FRAME_LINES):
        for ci in range(FRAME_CELLS):
            changed = prev.cell(li, ci).mask ^ next_frame.cell(li, ci).mask
            for dot in range(1, 7):
                if changed >> (dot - 1) & 1:
                    action = (PinAction.RAISE if next_frame.cell(li, ci).has_dot(dot)
                              else PinAction.LOWER)
                    commands.append(PinCommand(li, ci, dot, action))
    return commands


def apply_schedule(frame: BrailleFrame, commands: list[PinCommand]) -> BrailleFrame:
    """Replay a pin schedule onto a frame (the hardware's view)."""
    masks = [[cell.mask for cell in row] for row in frame.lines]
    for cmd in commands:
        bit = 1 << (cmd.dot - 1)
        if cmd.action is PinAction.RAISE:
            masks[cmd.line][cmd.cell] |= bit
        else:
            masks[cmd.line][cmd.cell] &= ~bit
    return BrailleFrame(tuple(
        tuple(BrailleCell(m) for m in row) for row in masks
    ))


@dataclass(frozen=True)
class DimensionProfile:
    """Physical cell geometry; absent table values stay None."""

    name: str
    horizontal_dot_to_dot_mm: float | None = None
    vertical_dot_to_dot_mm: float | None = None
    cell_to_cell_mm: float | None = None
    adjacent_gap_mm: float | None = None
    line_to_line_mm: float | None = None
    dot_base_diameter_mm: float | None = None
    dot_height_mm: float | None = None


def _scalar(value) -> float | None:
    # Ranged table entries collapse to their midpoint for arithmetic.
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        lo, hi = value
        return (lo + hi) / 2
    return float(value)


def _load_profiles() -> dict[str, DimensionProfile]:
    raw = json.loads(
        resources.files(__package__).joinpath("data/braille_profiles.json")
        .read_text(encoding="utf-8"))
    return {
        name: DimensionProfile(name=name, **{k: _scalar(v) for k, v in row.items()})
        for name, row in raw.items()
    }


PROFILES: dict[str, DimensionProfile] = _load_profiles()


def line_width_mm(profile: DimensionProfile, cells: int) -> float:
    """Width of a row of cells: cells*h + (cells-1)*g.

    h is the within-cell horizontal dot-to-dot distance; g is the blank
    gap between dots of adjacent cells, derived from the cell-to-cell
    pitch (g = pitch - h) when not given directly.
    """
    if cells < 1:
        raise ValueError("cells must be >= 1")
    h = profile.horizontal_dot_to_dot_mm
    if h is None:
        raise MissingDimension(f"{profile.name}: horizontal_dot_to_dot_mm")
    if profile.adjacent_gap_mm is not None:
        g = profile.adjacent_gap_mm
    elif profile.cell_to_cell_mm is not None:
        g = profile.cell_to_cell_mm - h
    else:
        raise MissingDimension(f"{profile.name}: cell_to_cell_mm or adjacent_gap_mm")
    return cells * h + (cells - 1) * g
