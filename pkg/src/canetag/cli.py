"""Command-line front end: encode, decode, plan, validate, walk,
braille-render, report.

Standard output carries only payload (hex words, JSON, JSONL traces,
Braille text); diagnostics go to stderr.  Exit status: 0 success,
1 validation/domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import braille
from .cane_sim import (
    PowerState,
    SimConfig,
    UnknownRoad,
    load_script,
    simulate,
    trace_to_jsonl,
)
from .reader_protocol import Confidence, PedestrianMessage, UnknownCode
from .sgln_codec import (
    DEFAULT_CONFIG,
    FIELD_WIDTHS,
    BadCharacter,
    BadLength,
    CodecConfig,
    CodecError,
    DirectionCode,
    TagFields,
    decode,
    encode,
    from_hex,
)
from .street_map import dumps_map, load_map, validate

USAGE_EXIT = 2
DOMAIN_EXIT = 1

_FIELD_NAMES = [name for name, _ in FIELD_WIDTHS]


class UsageError(Exception):
    pass


def fields_to_doc(fields: TagFields) -> dict:
    doc = {}
    for name in _FIELD_NAMES:
        value = getattr(fields, name)
        doc[name] = value.name.lower() if isinstance(value, DirectionCode) else int(value)
    return doc


def fields_from_doc(doc: dict, config: CodecConfig) -> TagFields:
    required = [n for n in _FIELD_NAMES if n not in ("header", "filter_value", "partition")]
    missing = [n for n in required if n not in doc]
    if missing:
        raise UsageError(f"missing field(s): {', '.join(missing)}")
    kwargs = dict(doc)
    kwargs.setdefault("header", config.header)
    kwargs.setdefault("filter_value", config.filter_value)
    kwargs.setdefault("partition", config.partition)
    return TagFields(**kwargs)


def _load_config(args) -> tuple[CodecConfig, SimConfig]:
    codec, sim = DEFAULT_CONFIG, SimConfig()
    path = getattr(args, "config", None)
    if path:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        codec = CodecConfig(
            header=int(doc.get("header", codec.header)),
            filter_value=int(doc.get("filter", doc.get("filter_value", codec.filter_value))),
            partition=int(doc.get("partition", codec.partition)),
        )
        sim = SimConfig(
            tick_s=float(doc.get("tick_s", sim.tick_s)),
            draw_per_cycle=int(doc.get("draw_per_cycle", sim.draw_per_cycle)),
            fifo_capacity=int(doc.get("fifo_capacity", sim.fifo_capacity)),
        )
    return codec, sim


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


# -- commands ----------------------------------------------------------


def cmd_encode(args) -> int:
    codec_config, _ = _load_config(args)
    if args.json:
        doc = json.loads(sys.stdin.read())
        fields = fields_from_doc(doc, codec_config)
    else:
        values = {
            "company_code": args.company_code,
            "tag_direction": args.tag_direction,
            "main_road": args.main_road,
            "sub_road": args.sub_road,
            "path": args.path,
            "building_number": args.building_number,
            "feature_direction": args.feature_direction,
            "road_condition": args.road_condition,
            "serial": args.serial,
            "header": args.header,
            "filter_value": args.filter,
            "partition": args.partition,
        }
        doc = {k: v for k, v in values.items() if v is not None}
        fields = fields_from_doc(doc, codec_config)
    print(encode(fields).hex)
    return 0


def cmd_decode(args) -> int:
    codec_config, _ = _load_config(args)
    try:
        word = from_hex(args.hex.strip().upper())
    except (BadLength, BadCharacter) as exc:
        raise UsageError(str(exc)) from None
    fields = decode(word, strict=args.strict, config=codec_config)
    print(json.dumps(fields_to_doc(fields), sort_keys=True))
    return 0


def cmd_plan(args) -> int:
    codec_config, _ = _load_config(args)
    from .street_map import map_from_doc

    street_map = map_from_doc(json.loads(_read_text(args.map)), config=codec_config)
    street_map.plan()
    text = dumps_map(street_map) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    codec_config, _ = _load_config(args)
    from .street_map import map_from_doc

    street_map = map_from_doc(json.loads(_read_text(args.map)), config=codec_config)
    violations = validate(street_map)
    print(json.dumps([v.as_dict() for v in violations], sort_keys=True, indent=2))
    return DOMAIN_EXIT if violations else 0


def _power_from_args(args) -> PowerState:
    return PowerState(capacity=args.capacity, low_threshold=args.threshold)


def cmd_walk(args) -> int:
    codec_config, sim_config = _load_config(args)
    street_map = load_map(args.map, config=codec_config)
    script = load_script(args.script)
    trace = simulate(street_map, script, _power_from_args(args), sim_config)
    text = trace_to_jsonl(trace)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.braille:
        for event in trace:
            if event.kind == "Frame":
                print("\n".join(event.payload["lines"]), file=sys.stderr)
                print("--", file=sys.stderr)
    return 0


def cmd_braille_render(args) -> int:
    msg = PedestrianMessage(args.line1, args.line2 or "", Confidence.VERIFIED)
    frame = braille.render_frame(msg)
    print(braille.frame_to_unicode(frame))
    return 0


def cmd_report(args) -> int:
    from .report import write_report

    codec_config, sim_config = _load_config(args)
    street_map = load_map(args.map, config=codec_config)
    script = load_script(args.script)
    power = _power_from_args(args)
    trace = simulate(street_map, script, power, sim_config)
    written = write_report(street_map, script, trace, power, sim_config, args.out_dir)
    for path in written:
        print(path)
    return 0


# -- parser ------------------------------------------------------------


def _add_config_opt(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="JSON",
                        help="config file overriding header/filter/partition, "
                             "tick_s, draw_per_cycle, fifo_capacity")


def _add_power_opts(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--capacity", type=int, default=100,
                        help="LIB capacity in draw units (default 100)")
    parser.add_argument("--threshold", type=int, default=10,
                        help="low-battery threshold (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="canetag",
        description="RFID road-tag toolkit: codec, planner, walk simulator, "
                    "Braille display")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="pack tag fields into a 24-hex-char word")
    for opt, typ in [("--company-code", int), ("--main-road", int),
                     ("--sub-road", int), ("--path", int),
                     ("--building-number", int), ("--road-condition", int),
                     ("--serial", int)]:
        p.add_argument(opt, type=typ)
    p.add_argument("--tag-direction", choices=[d.name.lower() for d in DirectionCode])
    p.add_argument("--feature-direction", choices=[d.name.lower() for d in DirectionCode])
    p.add_argument("--header", type=int)
    p.add_argument("--filter", type=int)
    p.add_argument("--partition", type=int)
    p.add_argument("--json", action="store_true",
                   help="read a fields JSON object from stdin instead of options")
    _add_config_opt(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="unpack a 24-hex-char word into JSON fields")
    p.add_argument("hex", help="24 hex characters")
    p.add_argument("--strict", action="store_true",
                   help="also reject words whose header byte is not the configured one")
    _add_config_opt(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("plan", help="plan tag placements for every road in a map")
    p.add_argument("map", help="map JSON file, or - for stdin")
    p.add_argument("--out", help="write the planned map here instead of stdout")
    _add_config_opt(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="report map invariant violations as JSON")
    p.add_argument("map", help="map JSON file, or - for stdin")
    _add_config_opt(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("walk", help="simulate a walk; emits a JSONL trace")
    p.add_argument("--map", required=True)
    p.add_argument("--script", required=True, help="walk script JSON")
    p.add_argument("--out", help="write the trace here instead of stdout")
    p.add_argument("--braille", action="store_true",
                   help="also print each display frame as Unicode Braille (stderr)")
    _add_power_opts(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("braille-render",
                       help="render one or two text lines as a 2x12 Braille frame")
    p.add_argument("line1")
    p.add_argument("line2", nargs="?", default="")
    p.set_defaults(func=cmd_braille_render)

    p = sub.add_parser("report",
                       help="simulate a walk and write trace, CSV and figures")
    p.add_argument("--map", required=True)
    p.add_argument("--script", required=True)
    p.add_argument("--out-dir", required=True)
    _add_power_opts(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (CodecError, UnknownCode, UnknownRoad, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT


if __name__ == "__main__":
    sys.exit(main())
