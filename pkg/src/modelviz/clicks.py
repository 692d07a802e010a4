"""Decode click-event JSON from the UI into a structure over the input
vocabulary.

The wire shape mirrors the output format: an array of frames, each with a
time and a list of ``{"key": ..., "type": "click"}`` elements.
"""

from __future__ import annotations

import json
from typing import Iterable

from .core import Relation, SortValues, Structure
from .errors import MalformedInput, UnknownEventType
from .predefined import V_IN


def decode_clicks(text: str) -> Structure:
    """Build the click structure: time and key hold the mentioned values,
    d3_click the (time, key) pairs.  Pairs are deduplicated."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"not valid JSON: {exc}") from None
    return clicks_structure(_pairs(payload))


def _pairs(payload) -> list[tuple[int, str]]:
    if not isinstance(payload, list):
        raise MalformedInput("expected an array of frames")
    pairs = []
    for frame in payload:
        if not isinstance(frame, dict):
            raise MalformedInput("frames must be objects")
        time = frame.get("time")
        if isinstance(time, bool) or not isinstance(time, int):
            raise MalformedInput("frames need an integer 'time'")
        elements = frame.get("elements")
        if not isinstance(elements, list):
            raise MalformedInput("frames need an 'elements' array")
        for element in elements:
            if not isinstance(element, dict):
                raise MalformedInput("elements must be objects")
            if element.get("type") != "click":
                raise UnknownEventType(
                    f"unsupported event type {element.get('type')!r}")
            key = element.get("key")
            if not isinstance(key, str) or not key:
                raise MalformedInput("click elements need a non-empty 'key'")
            pairs.append((time, key))
    return pairs


def clicks_structure(pairs: Iterable[tuple[int, str]]) -> Structure:
    pairs = list(dict.fromkeys(pairs))
    interps = {"d3_click": Relation(frozenset(pairs))}
    times = sorted({t for t, _ in pairs})
    keys = sorted({k for _, k in pairs})
    if times:
        interps["time"] = SortValues(tuple(times))
    if keys:
        interps["key"] = SortValues(tuple(keys))
    return Structure("clicks", V_IN, interps)
