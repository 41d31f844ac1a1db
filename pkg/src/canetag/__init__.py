"""RFID wayfinding toolkit for a tactile smart cane.

Encodes street information into 96-bit road tags, plans tag layouts
along roads, infers a pedestrian's walking direction from tag serial
numbers, renders two-line Braille messages, and simulates whole walks
including the cane's battery/solar power switching.
"""

from .sgln_codec import (
    DirectionCode,
    TagFields,
    TagWord,
    decode,
    encode,
    flip_direction,
    from_hex,
    to_hex,
)
from .street_map import (
    Building,
    ConditionCode,
    NameRegistry,
    Road,
    RoadFeature,
    RoadId,
    Side,
    StreetMap,
    plan_road,
    validate,
)
from .reader_protocol import (
    Confidence,
    Heading,
    PedestrianMessage,
    ReaderState,
    compose_message,
    infer_heading,
    ingest,
    resolve_directions,
)
from .braille import (
    BrailleCell,
    BrailleFrame,
    DimensionProfile,
    PROFILES,
    char_to_cell,
    frame_to_unicode,
    line_width_mm,
    pin_schedule,
    render_frame,
    text_to_cells,
)
from .cane_sim import (
    PowerSource,
    PowerState,
    SimConfig,
    TraceEvent,
    WalkScript,
    simulate,
    step_power,
    trace_to_jsonl,
)

__version__ = "0.1.0"
