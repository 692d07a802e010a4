"""Encode two-valued drawing structures into the JSON animation format.

The wire object is ``{"animation": [frame, ...]}`` where each frame holds a
time index, the canvas size, and keyed elements with typed attributes.
Attribute names are the output-vocabulary names with the ``d3_`` prefix
stripped; attributes a structure leaves undefined are omitted (defaulting
is the renderer's job).  Serialization is canonical and byte-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import FunctionMap, Relation, Structure, is_two_valued
from .errors import (
    DanglingLink,
    MalformedInput,
    NotTwoValued,
    SignatureClash,
    UnknownShapeAttribute,
)
from .predefined import (
    CANVAS_FUNCTIONS,
    ELEMENT_FLAGS,
    ELEMENT_FUNCTIONS,
    SHAPE_ATTRIBUTES,
    V_OUT,
    wire_name,
)

AttrValue = Union[int, str, bool]


@dataclass
class Element:
    key: str
    type: str
    attrs: dict[str, AttrValue] = field(default_factory=dict)


@dataclass
class Frame:
    time: int
    width: int
    height: int
    elements: list[Element] = field(default_factory=list)


@dataclass
class DrawingSpec:
    frames: list[Frame] = field(default_factory=list)

    def frame_at(self, time: int) -> Optional[Frame]:
        for frame in self.frames:
            if frame.time == time:
                return frame
        return None

    @property
    def times(self) -> list[int]:
        return [f.time for f in self.frames]


def _function_graph(s: Structure, name: str) -> dict:
    interp = s.interpretation(name)
    if interp is None:
        return {}
    assert isinstance(interp, FunctionMap)
    return dict(interp.items())


def _flag_tuples(s: Structure, name: str) -> frozenset:
    interp = s.interpretation(name)
    if interp is None:
        return frozenset()
    assert isinstance(interp, Relation)
    return interp.tuples


def encode(s: Structure) -> DrawingSpec:
    """Transform a two-valued structure over the output vocabulary into the
    animation object: one element per (time, key) pair with a type, carrying
    exactly the attributes defined at that pair."""
    if not s.vocabulary.covers(V_OUT):
        raise SignatureClash(
            f"{s.vocabulary.name} does not extend the drawing output vocabulary")
    if not is_two_valued(s):
        raise NotTwoValued(f"cannot encode partial structure {s.name}")

    types = _function_graph(s, "d3_type")
    elements: dict[int, dict[str, Element]] = {}
    for (time, key), shape in types.items():
        elements.setdefault(time, {})[key] = Element(key, shape)

    for symbol in ELEMENT_FUNCTIONS:
        if symbol == "d3_type":
            continue
        attr = wire_name(symbol)
        for (time, key), value in _function_graph(s, symbol).items():
            element = elements.get(time, {}).get(key)
            if element is None:
                continue  # attribute without a type never draws; see validate_out
            if attr not in SHAPE_ATTRIBUTES[element.type]:
                raise UnknownShapeAttribute(
                    f"{attr} is not an attribute of {element.type} "
                    f"(element {key!r} at time {time})")
            element.attrs[attr] = value
    for symbol in ELEMENT_FLAGS:
        attr = wire_name(symbol)
        for (time, key) in _flag_tuples(s, symbol):
            element = elements.get(time, {}).get(key)
            if element is None:
                continue
            if attr not in SHAPE_ATTRIBUTES[element.type]:
                raise UnknownShapeAttribute(
                    f"{attr} is not an attribute of {element.type} "
                    f"(element {key!r} at time {time})")
            element.attrs[attr] = True

    widths = _function_graph(s, "d3_width")
    heights = _function_graph(s, "d3_height")
    frames = []
    for time in s.sort_values("time") or ():
        frame_elements = elements.get(time, {})
        width = widths.get((time,))
        height = heights.get((time,))
        if not frame_elements and width is None and height is None:
            continue
        for element in frame_elements.values():
            if element.type == "link":
                for endpoint in ("link_from", "link_to"):
                    target = element.attrs.get(endpoint)
                    if target is None:
                        raise DanglingLink(
                            f"link {element.key!r} at time {time} lacks {endpoint}")
                    if target not in frame_elements:
                        raise DanglingLink(
                            f"link {element.key!r} at time {time} references "
                            f"{target!r}, which has no element in this frame")
        frames.append(Frame(time, width or 0, height or 0,
                            sorted(frame_elements.values(), key=lambda e: e.key)))
    frames.sort(key=lambda f: f.time)
    return DrawingSpec(frames)


def validate_out(s: Structure) -> list[str]:
    """Pre-flight diagnostics for a (possibly partial) drawing structure.
    An empty list means clean."""
    diagnostics = []
    types = _function_graph(s, "d3_type")
    pairs_with_attrs: dict[tuple, list[str]] = {}
    for symbol in ELEMENT_FUNCTIONS:
        if symbol == "d3_type":
            continue
        for pair in _function_graph(s, symbol):
            pairs_with_attrs.setdefault(pair, []).append(wire_name(symbol))
    for symbol in ELEMENT_FLAGS:
        for pair in _flag_tuples(s, symbol):
            pairs_with_attrs.setdefault(pair, []).append(wire_name(symbol))

    for pair in sorted(pairs_with_attrs, key=lambda p: (p[0], str(p[1]))):
        attrs = pairs_with_attrs[pair]
        shape = types.get(pair)
        if shape is None:
            diagnostics.append(
                f"attributes {', '.join(sorted(attrs))} defined at {pair} "
                f"without d3_type")
            continue
        for attr in sorted(attrs):
            if attr not in SHAPE_ATTRIBUTES[shape]:
                diagnostics.append(f"{attr} does not apply to {shape} at {pair}")

    widths = _function_graph(s, "d3_width")
    heights = _function_graph(s, "d3_height")
    frames: dict[int, set[str]] = {}
    for (time, key) in types:
        frames.setdefault(time, set()).add(key)
    for time in sorted(frames):
        keys = frames[time]
        for (t, key), shape in sorted(types.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            if t != time or shape != "link":
                continue
            for endpoint in ("link_from", "link_to"):
                graph = _function_graph(s, f"d3_{endpoint}")
                target = graph.get((t, key))
                if target is None:
                    diagnostics.append(f"link {key!r} at time {t} lacks {endpoint}")
                elif target not in keys:
                    diagnostics.append(
                        f"link {key!r} at time {t} references missing key {target!r}")
        if (time,) not in widths or (time,) not in heights:
            diagnostics.append(f"canvas size undefined for non-empty frame {time}")
    return diagnostics


# --- canonical JSON --------------------------------------------------------------

def _element_json(element: Element) -> dict:
    out: dict[str, AttrValue] = {"key": element.key, "type": element.type}
    for attr in sorted(element.attrs):
        out[attr] = element.attrs[attr]
    return out


def serialize(spec: DrawingSpec) -> str:
    """Canonical JSON: fixed key order, numbers unquoted, no insignificant
    whitespace; byte-deterministic across runs and platforms."""
    payload = {"animation": [
        {
            "time": frame.time,
            "width": frame.width,
            "height": frame.height,
            "elements": [_element_json(e) for e in frame.elements],
        }
        for frame in spec.frames
    ]}
    return json.dumps(payload, separators=(",", ":"))


_INT_ATTRS = {"x", "y", "order", "rect_width", "rect_height", "circ_r",
              "text_size", "link_width", "width", "height", "time"}


def _coerce(attr: str, value):
    """Numeric attributes arrive as numbers or quoted numbers; both decode."""
    if attr in _INT_ATTRS:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise MalformedInput(f"{attr} must be an integer, got {value!r}")
        try:
            return int(value)
        except ValueError:
            raise MalformedInput(f"{attr} must be an integer, got {value!r}") from None
    return value


def deserialize(text: str) -> DrawingSpec:
    """Parse the wire format back into a DrawingSpec (tests and the replay
    tooling use this; quoted numeric values are accepted)."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or not isinstance(payload.get("animation"), list):
        raise MalformedInput("expected an object with an 'animation' array")
    frames = []
    for raw in payload["animation"]:
        if not isinstance(raw, dict):
            raise MalformedInput("frames must be objects")
        elements = []
        for e in raw.get("elements", []):
            if not isinstance(e, dict) or "key" not in e or "type" not in e:
                raise MalformedInput("elements need 'key' and 'type'")
            attrs = {k: _coerce(k, v) for k, v in e.items()
                     if k not in ("key", "type")}
            elements.append(Element(str(e["key"]), str(e["type"]), attrs))
        frames.append(Frame(_coerce("time", raw.get("time", 0)),
                            _coerce("width", raw.get("width", 0)),
                            _coerce("height", raw.get("height", 0)),
                            elements))
    return DrawingSpec(frames)
