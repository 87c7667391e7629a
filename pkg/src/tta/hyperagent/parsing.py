"""Model-output parsing.

Responses are free text with zero or more embedded JSON objects. A scanner
walks the text once, pairing braces while ignoring any that sit inside JSON
string literals, and keeps every balanced span that json.loads accepts as an
object. Parsing is total: any input string yields a ParsedOutput, never an
exception.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

THINK_TAGS = ("<think>", "</think>")


@dataclass(frozen=True)
class ParsedOutput:
    raw: str
    reasoning: str
    json_blocks: tuple[dict, ...]
    word_count: int
    # Character offsets of the accepted blocks within raw, parallel to
    # json_blocks. Useful for debugging, not part of the stable surface.
    block_spans: tuple[tuple[int, int], ...] = field(default=(), repr=False)


def scan_json_objects(text: str) -> list[tuple[int, int, dict]]:
    """Return (start, end, parsed) for every top-level {...} span that parses
    as a JSON object. Braces inside double-quoted strings do not count toward
    nesting. A balanced span that fails json.loads is skipped and the scan
    resumes after its closing brace; an unterminated span is dropped."""
    found = []
    depth = 0
    start = -1
    in_string = False
    escaped = False
    for i, ch in enumerate(text):
        if depth == 0:
            if ch == "{":
                depth = 1
                start = i
                in_string = False
                escaped = False
            continue
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                span = text[start : i + 1]
                try:
                    doc = json.loads(span)
                except json.JSONDecodeError:
                    doc = None
                if isinstance(doc, dict):
                    found.append((start, i + 1, doc))
    return found


def strip_think_tags(text: str) -> str:
    for tag in THINK_TAGS:
        text = text.replace(tag, "")
    return text


def parse_output(text: str) -> ParsedOutput:
    """Split a model response into reasoning and JSON blocks.

    Reasoning is everything before the first accepted JSON block (the whole
    text when there is none), with chain-of-thought delimiter tags removed
    and surrounding whitespace stripped. word_count covers the full raw text,
    whitespace-delimited."""
    spans = scan_json_objects(text)
    first_start = spans[0][0] if spans else len(text)
    reasoning = strip_think_tags(text[:first_start]).strip()
    return ParsedOutput(
        raw=text,
        reasoning=reasoning,
        json_blocks=tuple(doc for _, _, doc in spans),
        word_count=len(text.split()),
        block_spans=tuple((a, b) for a, b, _ in spans),
    )
