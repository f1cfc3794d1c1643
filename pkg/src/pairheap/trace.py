"""Text trace format: one operation per line, whitespace separated.

Grammar::

    new <heap>
    insert <heap> <node> <int>
    decrease <heap> <node> <int>
    findmin <heap>
    deletemin <heap>
    meld <heapA> <heapB> <heapOut>

Lines starting with ``#`` and blank lines are ignored. Heap and node
tokens match ``[A-Za-z0-9_]+``; keys are decimal 64-bit signed integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import KEY_MAX, KEY_MIN

NEW = "new"
INSERT = "insert"
DECREASE = "decrease"
FINDMIN = "findmin"
DELETEMIN = "deletemin"
MELD = "meld"

KINDS = (NEW, INSERT, DECREASE, FINDMIN, DELETEMIN, MELD)

_TOKEN = re.compile(r"[A-Za-z0-9_]+$")


class TraceError(ValueError):
    """Malformed trace text; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class TraceEvent:
    """One recorded operation of a multi-heap sequence."""

    kind: str
    heap: str
    node: Optional[str] = None
    key: Optional[int] = None
    heap2: Optional[str] = None
    result_heap: Optional[str] = None


def _lines(source):
    if isinstance(source, str):
        return source.splitlines()
    if hasattr(source, "read"):
        return source.read().splitlines()
    return list(source)


def parse_trace(source) -> list[TraceEvent]:
    """Parse trace text into events, rejecting malformed lines by number.

    ``source`` may be a string, an open text file, or an iterable of
    lines. Node tokens introduced by ``insert`` must be unique.
    """
    events = []
    seen_nodes = set()
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind not in KINDS:
            raise TraceError(lineno, f"unknown operation {kind!r}")
        args = parts[1:]
        for tok in args if kind not in (INSERT, DECREASE) else args[:-1]:
            if not _TOKEN.match(tok):
                raise TraceError(lineno, f"bad token {tok!r}")
        if kind == NEW:
            if len(args) != 1:
                raise TraceError(lineno, "new takes exactly one heap token")
            events.append(TraceEvent(NEW, args[0]))
        elif kind in (INSERT, DECREASE):
            if len(args) != 3:
                raise TraceError(lineno, f"{kind} takes heap, node and key")
            key = _parse_key(lineno, args[2])
            if kind == INSERT:
                if args[1] in seen_nodes:
                    raise TraceError(lineno, f"node token {args[1]!r} reused")
                seen_nodes.add(args[1])
            events.append(TraceEvent(kind, args[0], node=args[1], key=key))
        elif kind in (FINDMIN, DELETEMIN):
            if len(args) != 1:
                raise TraceError(lineno, f"{kind} takes exactly one heap token")
            events.append(TraceEvent(kind, args[0]))
        else:  # MELD
            if len(args) != 3:
                raise TraceError(lineno, "meld takes two heaps and a result token")
            events.append(TraceEvent(MELD, args[0], heap2=args[1],
                                     result_heap=args[2]))
    return events


def _parse_key(lineno, text):
    try:
        key = int(text, 10)
    except ValueError:
        raise TraceError(lineno, f"bad key {text!r}") from None
    if not KEY_MIN <= key <= KEY_MAX:
        raise TraceError(lineno, f"key {key} outside 64-bit signed range")
    return key


def format_event(e: TraceEvent) -> str:
    if e.kind == NEW:
        return f"new {e.heap}"
    if e.kind == INSERT:
        return f"insert {e.heap} {e.node} {e.key}"
    if e.kind == DECREASE:
        return f"decrease {e.heap} {e.node} {e.key}"
    if e.kind == FINDMIN:
        return f"findmin {e.heap}"
    if e.kind == DELETEMIN:
        return f"deletemin {e.heap}"
    if e.kind == MELD:
        return f"meld {e.heap} {e.heap2} {e.result_heap}"
    raise ValueError(f"unknown event kind {e.kind!r}")


def format_trace(events: Iterable[TraceEvent]) -> str:
    return "".join(format_event(e) + "\n" for e in events)


def write_trace(events: Iterable[TraceEvent], sink) -> None:
    """Write events as trace text; ``sink`` is a path or text file object."""
    text = format_trace(events)
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "w") as fh:
            fh.write(text)
    else:
        sink.write(text)
