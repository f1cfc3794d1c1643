"""Trace text parsing, formatting, and error reporting."""

import io

import pytest

from pairheap.trace import (DECREASE, DELETEMIN, FINDMIN, INSERT, MELD, NEW,
                            TraceError, TraceEvent, format_trace, parse_trace,
                            write_trace)


def test_three_line_trace():
    events = parse_trace("new h1\ninsert h1 a 5\ndeletemin h1\n")
    assert [e.kind for e in events] == [NEW, INSERT, DELETEMIN]
    assert events[1].node == "a" and events[1].key == 5


def test_meld_event_tokens():
    (e,) = parse_trace("meld h1 h2 h3")
    assert e.kind == MELD
    assert (e.heap, e.heap2, e.result_heap) == ("h1", "h2", "h3")


def test_missing_key_reports_line():
    with pytest.raises(TraceError) as exc:
        parse_trace("new h1\ninsert h1 a\n")
    assert exc.value.line == 2


def test_unknown_op():
    with pytest.raises(TraceError) as exc:
        parse_trace("new h1\nshrink h1\n")
    assert exc.value.line == 2


def test_bad_token():
    with pytest.raises(TraceError):
        parse_trace("new h-1\n")


def test_bad_key():
    with pytest.raises(TraceError):
        parse_trace("new h1\ninsert h1 a 5x\n")


def test_key_range_checked():
    parse_trace(f"new h1\ninsert h1 a {-(1 << 63)}\n")
    with pytest.raises(TraceError):
        parse_trace(f"new h1\ninsert h1 a {1 << 63}\n")


def test_negative_keys_allowed():
    (e,) = parse_trace("decrease h1 a -42")
    assert e.key == -42 and e.kind == DECREASE


def test_duplicate_node_token_rejected():
    with pytest.raises(TraceError) as exc:
        parse_trace("new h1\ninsert h1 a 1\ninsert h1 a 2\n")
    assert exc.value.line == 3


def test_comments_and_blanks_skipped():
    events = parse_trace("# heading\n\nnew h1\n  # indented comment\nfindmin h1\n")
    assert [e.kind for e in events] == [NEW, FINDMIN]


def test_round_trip():
    events = [
        TraceEvent(NEW, "h1"),
        TraceEvent(INSERT, "h1", node="a", key=5),
        TraceEvent(DECREASE, "h1", node="a", key=-3),
        TraceEvent(FINDMIN, "h1"),
        TraceEvent(NEW, "h2"),
        TraceEvent(MELD, "h1", heap2="h2", result_heap="h3"),
        TraceEvent(DELETEMIN, "h3"),
    ]
    assert parse_trace(format_trace(events)) == events


def test_parse_from_file_object():
    fh = io.StringIO("new h1\ninsert h1 a 1\n")
    assert len(parse_trace(fh)) == 2


def test_write_trace_to_path(tmp_path):
    path = tmp_path / "t.tr"
    events = [TraceEvent(NEW, "h1"), TraceEvent(INSERT, "h1", node="a", key=1)]
    write_trace(events, str(path))
    assert parse_trace(path.read_text()) == events
