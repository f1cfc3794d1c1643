"""Trace generators, the independent correctness oracle, and the runner.

The oracle is a deliberately naive mirror of heap semantics (per-heap
sorted lists of ``(key, token)``); it anchors correctness, not speed.
Generated traces never reference dead nodes: the random generator keys
every node uniquely so that delete-min removes the same node in every
variant, and the Dijkstra generator encodes ``(distance, vertex)`` into
one integer key for the same reason.
"""

from __future__ import annotations

import random
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Optional

from . import metrics, trace
from .core import CostCounters, Universe, VariantConfig
from .trace import (DECREASE, DELETEMIN, FINDMIN, INSERT, MELD, NEW,
                    TraceEvent)

RANDOM = "random"
SORT = "sort"
DIJKSTRA = "dijkstra"

KINDS = (RANDOM, SORT, DIJKSTRA)

# insert, decrease, deletemin, findmin, meld
DEFAULT_MIX = (0.28, 0.24, 0.28, 0.10, 0.10)

_KEY_SPACE = 1 << 40


class OracleError(ValueError):
    """An event that is invalid against the oracle's state."""


class TraceReplayError(RuntimeError):
    """A trace event that cannot be executed; carries the op index."""

    def __init__(self, op_index: int, message: str):
        super().__init__(f"op {op_index}: {message}")
        self.op_index = op_index


@dataclass
class WorkloadSpec:
    """Parameters of a generated workload.

    ``n`` means: total events for ``random``, element count for ``sort``,
    vertex count for ``dijkstra``. ``mix`` orders probabilities as
    (insert, decrease, deletemin, findmin, meld) and only applies to
    ``random``, as does ``heaps``.
    """

    kind: str
    n: int
    seed: int = 1
    mix: tuple = DEFAULT_MIX
    heaps: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown workload kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.heaps < 1:
            raise ValueError("heaps must be at least 1")
        if len(self.mix) != 5 or any(p < 0 for p in self.mix):
            raise ValueError("mix must be five non-negative probabilities")
        if abs(sum(self.mix) - 1.0) > 1e-9:
            raise ValueError(f"mix must sum to 1, got {sum(self.mix)}")


class Oracle:
    """Reference model: sorted ``(key, token)`` multiset per heap."""

    def __init__(self):
        self._heaps = {}
        self._alias = {}
        self._key_of = {}
        self._used_heaps = set()
        self._used_nodes = set()

    def resolve(self, token: str) -> str:
        r = token
        while r in self._alias:
            r = self._alias[r]
        if r not in self._heaps:
            raise OracleError(f"unknown heap token {token!r}")
        return r

    def _list(self, token):
        return self._heaps[self.resolve(token)]

    def live_keys(self, token) -> list:
        """Sorted keys of one heap (testing aid)."""
        return [k for k, _ in self._list(token)]

    def step(self, e: TraceEvent) -> Optional[int]:
        """Apply one event; returns the key for findmin/deletemin."""
        kind = e.kind
        if kind == INSERT:
            lst = self._list(e.heap)
            if e.node in self._used_nodes:
                raise OracleError(f"node token {e.node!r} reused")
            self._used_nodes.add(e.node)
            self._key_of[e.node] = e.key
            insort(lst, (e.key, e.node))
            return None
        if kind == DECREASE:
            lst = self._list(e.heap)
            old = self._key_of.get(e.node)
            if old is None:
                raise OracleError(f"unknown or dead node token {e.node!r}")
            if e.key > old:
                raise OracleError(
                    f"decrease of {e.node!r} from {old} to larger key {e.key}")
            i = bisect_left(lst, (old, e.node))
            if i >= len(lst) or lst[i] != (old, e.node):
                raise OracleError(f"node {e.node!r} is not in heap {e.heap!r}")
            lst.pop(i)
            insort(lst, (e.key, e.node))
            self._key_of[e.node] = e.key
            return None
        if kind == FINDMIN:
            lst = self._list(e.heap)
            if not lst:
                raise OracleError(f"findmin on empty heap {e.heap!r}")
            return lst[0][0]
        if kind == DELETEMIN:
            lst = self._list(e.heap)
            if not lst:
                raise OracleError(f"deletemin on empty heap {e.heap!r}")
            key, token = lst.pop(0)
            del self._key_of[token]
            return key
        if kind == NEW:
            if e.heap in self._used_heaps:
                raise OracleError(f"heap token {e.heap!r} reused")
            self._used_heaps.add(e.heap)
            self._heaps[e.heap] = []
            return None
        if kind == MELD:
            a = self.resolve(e.heap)
            b = self.resolve(e.heap2)
            if a == b:
                raise OracleError(f"meld of {e.heap!r} with itself")
            out = e.result_heap
            if out not in (a, b):
                if out in self._used_heaps:
                    raise OracleError(f"heap token {out!r} reused")
                self._used_heaps.add(out)
            merged = sorted(self._heaps.pop(a) + self._heaps.pop(b))
            self._heaps[out] = merged
            if a != out:
                self._alias[a] = out
            if b != out:
                self._alias[b] = out
            return None
        raise OracleError(f"unknown event kind {kind!r}")


def oracle_step(state: Oracle, e: TraceEvent) -> Optional[int]:
    """Functional face of :meth:`Oracle.step`."""
    return state.step(e)


class TraceRunner:
    """Executes trace events on a fresh universe, tracking token maps."""

    def __init__(self, config: Optional[VariantConfig] = None):
        self.universe = Universe(config=config)
        self.heap_ids = {}
        self.handle_of = {}
        self.token_of = {}
        self._used_heaps = set()

    def heap_id(self, token: str) -> int:
        hid = self.heap_ids.get(token)
        if hid is None:
            raise KeyError(f"unknown heap token {token!r}")
        return hid

    def execute(self, e: TraceEvent):
        """Apply one event; returns (key or None, removed node token or None)."""
        u = self.universe
        kind = e.kind
        if kind == INSERT:
            handle = u.insert(self.heap_ids[e.heap], e.key)
            self.handle_of[e.node] = handle
            self.token_of[handle.index] = e.node
            return None, None
        if kind == DECREASE:
            u.decrease_key(self.heap_ids[e.heap], self.handle_of[e.node], e.key)
            return None, None
        if kind == FINDMIN:
            _, key = u.find_min(self.heap_ids[e.heap])
            return key, None
        if kind == DELETEMIN:
            heap = u._heap(self.heap_ids[e.heap])
            key, slot = u._pop_min(heap)
            token = self.token_of.pop(slot)
            del self.handle_of[token]
            return key, token
        if kind == NEW:
            if e.heap in self._used_heaps:
                raise KeyError(f"heap token {e.heap!r} reused")
            self._used_heaps.add(e.heap)
            self.heap_ids[e.heap] = u.new_heap()
            return None, None
        if kind == MELD:
            out = e.result_heap
            if out not in (e.heap, e.heap2) and out in self._used_heaps:
                raise KeyError(f"heap token {out!r} reused")
            self._used_heaps.add(out)
            result = u.meld(self.heap_ids[e.heap], self.heap_ids[e.heap2])
            self.heap_ids[out] = result
            return None, None
        raise KeyError(f"unknown event kind {kind!r}")


@dataclass
class RunVerdict:
    """Result of replaying a trace: pass, or the first failing op."""

    ok: bool
    ops: int
    failed_op: Optional[int] = None
    message: str = ""
    counters: CostCounters = field(default_factory=CostCounters)
    universe: Optional[Universe] = None

    def __str__(self):
        if self.ok:
            return f"PASS, ops={self.ops}"
        return f"FAIL at op {self.failed_op}: {self.message}"


def run_trace(events, config: Optional[VariantConfig] = None,
              check: bool = False, *, deep_checks: Optional[bool] = None,
              collect_records: bool = True, fault_hook=None):
    """Replay events on a fresh universe.

    With ``check``, every findmin/deletemin key is compared against the
    oracle and (unless ``deep_checks=False``) the affected heap is
    structurally validated after each deletemin and meld, plus after
    every clean-up. Returns ``(records, verdict)``; the verdict names the
    first failing op, if any. ``fault_hook(op_index, universe)``, when
    given, runs before each op; it exists so tests can inject damage.
    """
    if deep_checks is None:
        deep_checks = check
    runner = TraceRunner(config=config)
    u = runner.universe
    oracle = Oracle() if check else None
    records = [] if collect_records else None
    failure = [None]

    if check and deep_checks:
        def hook(universe, heap_id):
            heap = universe.heaps[heap_id]
            if heap.decreased_list:
                failure[0] = f"decreased list not empty after clean-up of heap {heap_id}"
                return
            if heap.root != heap.min_slot:
                failure[0] = f"min pointer is not the root after clean-up of heap {heap_id}"
                return
            report = universe.validate(heap_id)
            if not report.ok:
                failure[0] = ("post-clean-up validation of heap "
                              f"{heap_id}: {report.violations[0]}")
        u.post_cleanup_hook = hook

    def fail(i, message):
        return (records if collect_records else [],
                RunVerdict(ok=False, ops=i + 1, failed_op=i, message=message,
                           counters=u.counters.copy(), universe=u))

    ops = 0
    for i, e in enumerate(events):
        ops = i + 1
        if fault_hook is not None:
            fault_hook(i, u)
        if collect_records:
            size_before = _target_size(runner, e)
            snap = metrics.begin_op(u.counters)
        try:
            key, _ = runner.execute(e)
        except Exception as exc:
            raise TraceReplayError(i, f"{e.kind}: {exc}") from exc
        if failure[0] is not None:
            return fail(i, failure[0])
        if check:
            try:
                expected = oracle.step(e)
            except OracleError as exc:
                raise TraceReplayError(i, str(exc)) from exc
            if key is not None and key != expected:
                return fail(i, f"{e.kind} returned {key}, oracle says {expected}")
            if deep_checks and e.kind in (DELETEMIN, MELD):
                token = e.result_heap if e.kind == MELD else e.heap
                report = u.validate(runner.heap_ids[token])
                if not report.ok:
                    return fail(i, f"validate after {e.kind}: {report.violations[0]}")
        if collect_records:
            records.append(metrics.end_op(
                u.counters, snap, op_index=i, op_type=e.kind,
                heap_size_before=size_before))
    return (records if collect_records else [],
            RunVerdict(ok=True, ops=ops, counters=u.counters.copy(), universe=u))


def _target_size(runner, e):
    u = runner.universe
    if e.kind == NEW:
        return 0
    try:
        size = u.heap_size(runner.heap_ids[e.heap])
        if e.kind == MELD:
            size += u.heap_size(runner.heap_ids[e.heap2])
        return size
    except Exception:
        return 0


# -- generators -------------------------------------------------------------


def generate(spec: WorkloadSpec) -> list[TraceEvent]:
    """Produce a deterministic trace for the given spec."""
    if spec.kind == SORT:
        return _sort_trace(spec)
    if spec.kind == RANDOM:
        return _random_trace(spec)
    return _dijkstra_random(spec)


def _sort_trace(spec):
    rng = random.Random(spec.seed)
    keys = list(range(1, spec.n + 1))
    rng.shuffle(keys)
    events = [TraceEvent(NEW, "h1")]
    events += [TraceEvent(INSERT, "h1", node=f"n{i + 1}", key=k)
               for i, k in enumerate(keys)]
    events += [TraceEvent(DELETEMIN, "h1") for _ in range(spec.n)]
    return events


def _random_trace(spec):
    rng = random.Random(spec.seed)
    events = []
    state = {}            # heap token -> sorted [(key, node token)]
    used_keys = set()
    heap_seq = 0
    node_seq = 0

    def fresh_heap():
        nonlocal heap_seq
        heap_seq += 1
        tok = f"h{heap_seq}"
        state[tok] = []
        events.append(TraceEvent(NEW, tok))

    def fresh_key(lo, hi):
        k = rng.randrange(lo, hi)
        while k in used_keys:
            k = rng.randrange(lo, hi)
        used_keys.add(k)
        return k

    def do_insert():
        nonlocal node_seq
        tok = rng.choice(list(state))
        node_seq += 1
        ntok = f"n{node_seq}"
        k = fresh_key(0, _KEY_SPACE)
        insort(state[tok], (k, ntok))
        events.append(TraceEvent(INSERT, tok, node=ntok, key=k))

    cum = []
    total = 0.0
    for p in spec.mix:
        total += p
        cum.append(total)

    while len(events) < spec.n:
        if len(state) < spec.heaps:
            fresh_heap()
            continue
        r = rng.random()
        nonempty = [t for t in state if state[t]]
        if r < cum[0]:
            do_insert()
        elif r < cum[1]:
            if not nonempty:
                do_insert()
                continue
            tok = rng.choice(nonempty)
            lst = state[tok]
            k0, ntok = lst[rng.randrange(len(lst))]
            if k0 <= -_KEY_SPACE + 1:
                do_insert()
                continue
            k = fresh_key(-_KEY_SPACE, k0)
            lst.pop(bisect_left(lst, (k0, ntok)))
            insort(lst, (k, ntok))
            events.append(TraceEvent(DECREASE, tok, node=ntok, key=k))
        elif r < cum[2]:
            if not nonempty:
                do_insert()
                continue
            tok = rng.choice(nonempty)
            state[tok].pop(0)
            events.append(TraceEvent(DELETEMIN, tok))
        elif r < cum[3]:
            if not nonempty:
                do_insert()
                continue
            events.append(TraceEvent(FINDMIN, rng.choice(nonempty)))
        else:
            if len(state) < 2:
                do_insert()
                continue
            a, b = rng.sample(list(state), 2)
            heap_seq += 1
            out = f"h{heap_seq}"
            merged = sorted(state.pop(a) + state.pop(b))
            state[out] = merged
            events.append(TraceEvent(MELD, a, heap2=b, result_heap=out))
    return events


def dijkstra_trace(n_vertices: int, edges, source: int = 0,
                   heap_token: str = "h1") -> list[TraceEvent]:
    """Single-source shortest paths driven by the oracle as the queue.

    Emits insert/decrease/deletemin in discovery order. Keys encode
    ``distance * n + vertex`` so every key is unique and replays remove
    the same node under every heap variant.
    """
    n = n_vertices
    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        if w < 0:
            raise ValueError("edge weights must be non-negative")
        adj[u].append((v, w))
        adj[v].append((u, w))

    events = [TraceEvent(NEW, heap_token)]
    oracle = Oracle()
    oracle.step(events[0])

    def emit(kind, vertex, key):
        e = TraceEvent(kind, heap_token, node=f"v{vertex}", key=key)
        events.append(e)
        oracle.step(e)

    dist = {source: 0}
    settled = set()
    emit(INSERT, source, source)  # distance 0 encodes to the vertex index
    while True:
        pop = TraceEvent(DELETEMIN, heap_token)
        try:
            key = oracle.step(pop)
        except OracleError:
            break
        events.append(pop)
        v = key % n
        d = key // n
        settled.add(v)
        for nb, w in adj[v]:
            if nb in settled:
                continue
            alt = d + w
            if nb not in dist:
                dist[nb] = alt
                emit(INSERT, nb, alt * n + nb)
            elif alt < dist[nb]:
                dist[nb] = alt
                emit(DECREASE, nb, alt * n + nb)
    return events


def _dijkstra_random(spec):
    rng = random.Random(spec.seed)
    n = spec.n
    edges = []
    for _ in range(2 * n):
        u = rng.randrange(n)
        v = rng.randrange(n)
        while v == u:
            v = rng.randrange(n)
        edges.append((u, v, rng.randint(1, 100)))
    return dijkstra_trace(n, edges, source=0)
