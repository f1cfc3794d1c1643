"""Exact cost counters and per-operation records.

Every key comparison, link, and cut performed by the heap goes through
one of these counters, so per-operation deltas are exact. Counters
belong to a single universe; nothing here is global.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from typing import Iterable, NamedTuple

FIELDS = ("comparisons", "links", "cuts", "sort_comparisons", "pool_trees", "groups")

CSV_COLUMNS = (
    "op_index",
    "op_type",
    "heap_size_before",
    "comparisons",
    "links",
    "cuts",
    "sort_comparisons",
    "pool_trees",
    "groups",
    "wall_time_ns",
)


class CostCounters:
    """Monotone counters for the work a universe performs.

    ``comparisons`` counts every key-order query, including the ones made
    while sorting clean-up groups; ``sort_comparisons`` counts only the
    latter. ``cuts`` counts subtree detachments, ``links`` counts
    parent-child attachments (with or without a comparison).
    """

    __slots__ = FIELDS

    def __init__(self, comparisons=0, links=0, cuts=0, sort_comparisons=0,
                 pool_trees=0, groups=0):
        self.comparisons = comparisons
        self.links = links
        self.cuts = cuts
        self.sort_comparisons = sort_comparisons
        self.pool_trees = pool_trees
        self.groups = groups

    def as_tuple(self):
        return (self.comparisons, self.links, self.cuts,
                self.sort_comparisons, self.pool_trees, self.groups)

    def copy(self) -> "CostCounters":
        return CostCounters(*self.as_tuple())

    def __eq__(self, other):
        if not isinstance(other, CostCounters):
            return NotImplemented
        return self.as_tuple() == other.as_tuple()

    def __repr__(self):
        body = ", ".join(f"{name}={value}" for name, value in zip(FIELDS, self.as_tuple()))
        return f"CostCounters({body})"


class Snapshot(NamedTuple):
    """Counter values captured by :func:`begin_op`, tied to their source."""

    source: CostCounters
    values: tuple
    t0_ns: int


@dataclass(eq=True)
class OpRecord:
    """One executed operation: what it was and exactly what it cost."""

    op_index: int
    op_type: str
    heap_size_before: int
    delta: CostCounters
    wall_time_ns: int


def begin_op(counters: CostCounters) -> Snapshot:
    """Capture the current counter values and a start timestamp."""
    return Snapshot(counters, counters.as_tuple(), time.perf_counter_ns())


def end_op(counters: CostCounters, snap: Snapshot, *, op_index: int,
           op_type: str, heap_size_before: int) -> OpRecord:
    """Close out an operation, returning its exact counter delta.

    Raises ValueError if ``snap`` was taken from a different counter set.
    """
    if snap.source is not counters:
        raise ValueError("snapshot was taken from a different CostCounters")
    wall = time.perf_counter_ns() - snap.t0_ns
    delta = CostCounters(*(a - b for a, b in zip(counters.as_tuple(), snap.values)))
    return OpRecord(op_index=op_index, op_type=op_type,
                    heap_size_before=heap_size_before, delta=delta,
                    wall_time_ns=wall)


def write_csv(records: Iterable[OpRecord], sink) -> None:
    """Write records as CSV (header + one row per record).

    ``sink`` may be a path or a writable text file object.
    """
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "w", newline="") as fh:
            _write_rows(records, fh)
    else:
        _write_rows(records, sink)


def _write_rows(records, fh):
    writer = csv.writer(fh)
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow((r.op_index, r.op_type, r.heap_size_before)
                        + r.delta.as_tuple() + (r.wall_time_ns,))


def read_csv(source) -> list[OpRecord]:
    """Parse a CSV produced by :func:`write_csv` back into records."""
    if isinstance(source, str) and "\n" in source:
        fh = io.StringIO(source)
        return _read_rows(fh)
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="") as fh:
            return _read_rows(fh)
    return _read_rows(source)


def _read_rows(fh):
    reader = csv.reader(fh)
    header = next(reader, None)
    if tuple(header or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header: {header!r}")
    records = []
    for row in reader:
        vals = [int(v) for v in row[2:]]
        records.append(OpRecord(op_index=int(row[0]), op_type=row[1],
                                heap_size_before=vals[0],
                                delta=CostCounters(*vals[1:7]),
                                wall_time_ns=vals[7]))
    return records
