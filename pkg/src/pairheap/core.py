"""Meldable pairing heap with lazy decrease-key.

Each heap is a single heap-ordered multi-way tree in leftmost-child /
right-sibling form. decrease-key normally just lowers the key, moves the
minimum pointer if needed, and remembers the node on a per-heap list of
decreased nodes; the deferred cuts are repaired in one batch by
``clean_up`` before delete-min (and, by default, on the smaller heap
before a meld). While cuts are pending, heap order may be violated only
on the link directly above a decreased node, and the minimum is always
either the root or one of the listed nodes.

clean-up detaches every listed node (splicing the subtree of its
leftmost child into its old position), collects the detached trees into
a pool, combines the pool in groups of ~log2(n) trees by sorting each
group's root keys and chaining the trees into a path, and finally
comparison-links each combined tree with the main tree.

All nodes of all heaps live in one slot arena owned by a
:class:`Universe`. Slots are recycled with generation counters, so a
handle kept past its node's deletion is rejected deterministically.
The eager variant (``mode="eager"``) instead cuts and relinks at
decrease-key time, which reproduces the classic pairing heap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import cmp_to_key
from typing import NamedTuple, Optional

from .metrics import CostCounters

NIL = -1


class LinkOrigin(IntEnum):
    """How a node's current link to its parent was created (NONE for roots)."""

    NONE = 0
    INSERT = 1
    MELD = 2
    PAIRING = 3
    CLEANUP = 4


# Hot-path aliases; IntEnum attribute lookups are not free.
_O_NONE = int(LinkOrigin.NONE)
_O_INSERT = int(LinkOrigin.INSERT)
_O_MELD = int(LinkOrigin.MELD)
_O_PAIRING = int(LinkOrigin.PAIRING)
_O_CLEANUP = int(LinkOrigin.CLEANUP)

KEY_MIN = -(1 << 63)
KEY_MAX = (1 << 63) - 1


class HeapError(Exception):
    """Base class for heap usage errors."""


class EmptyHeapError(HeapError):
    """find-min or delete-min on an empty heap."""


class KeyIncreaseError(HeapError):
    """decrease-key called with a key larger than the current one."""


class SelfMeldError(HeapError):
    """meld where both ids resolve to the same heap."""


class BadHandleError(HeapError):
    """Handle whose generation no longer matches its arena slot."""


class UnknownHeapError(HeapError):
    """Heap id that does not resolve to a live heap."""


class NotInHeapError(HeapError):
    """Node handle used against a heap it does not belong to."""


class NodeHandle(NamedTuple):
    """Reference to an arena slot, valid from insert until deletion."""

    index: int
    generation: int


@dataclass
class VariantConfig:
    """Policy knobs for the heap.

    ``mode="eager"`` is the classic cut-and-link decrease-key; it forces
    the lazy-only options off. ``periodic_cleanup`` triggers clean-up
    from decrease-key once the list reaches ``periodic_factor * log2(n)``
    entries. ``direct_relink`` makes clean-up link each detached tree
    straight to the main tree (skipping grouping) whenever more than
    ``direct_relink_fraction`` of the heap is on the list.
    """

    mode: str = "lazy"
    cleanup_on_meld: bool = True
    periodic_cleanup: bool = False
    periodic_factor: float = 1.0
    direct_relink: bool = False
    direct_relink_fraction: float = 0.5

    def __post_init__(self):
        if self.mode not in ("lazy", "eager"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.periodic_factor <= 0:
            raise ValueError("periodic_factor must be positive")
        if not 0 < self.direct_relink_fraction <= 1:
            raise ValueError("direct_relink_fraction must be in (0, 1]")
        if self.mode == "eager":
            # The eager variant never has pending decreases.
            self.cleanup_on_meld = False
            self.periodic_cleanup = False
            self.direct_relink = False


class Heap:
    """One live heap: root, minimum pointer, size, pending decreases."""

    __slots__ = ("id", "root", "min_slot", "size", "decreased_list")

    def __init__(self, hid):
        self.id = hid
        self.root = NIL
        self.min_slot = NIL
        self.size = 0
        self.decreased_list = []


@dataclass
class ValidationReport:
    """Outcome of a structural check; empty ``violations`` means healthy."""

    heap_id: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


class Universe:
    """Arena of nodes plus the registry of live heaps sharing it.

    A universe is single-owner: operations are sequential, counters are
    per-universe, and independent universes share nothing.
    """

    def __init__(self, config: Optional[VariantConfig] = None,
                 counters: Optional[CostCounters] = None):
        self.config = config if config is not None else VariantConfig()
        self.counters = counters if counters is not None else CostCounters()
        # Arena columns, indexed by slot.
        self._key = []
        self._child = []
        self._sib = []
        self._prev = []
        self._leftmost = []
        self._dec = []
        self._origin = []
        self._gen = []
        self._home = []          # heap id at insert time; resolve through aliases
        self._free = []
        self.heaps = {}
        self._alias = {}         # melded-away heap id -> absorbing heap id
        self._next_heap_id = 1
        # Called as hook(universe, heap_id) right after every clean_up.
        self.post_cleanup_hook = None

    # -- heap registry -------------------------------------------------

    def new_heap(self) -> int:
        """Create an empty heap and return its id."""
        hid = self._next_heap_id
        self._next_heap_id += 1
        self.heaps[hid] = Heap(hid)
        return hid

    def resolve_heap(self, h: int) -> int:
        """Follow meld aliases to the canonical live heap id (idempotent)."""
        alias = self._alias
        r = h
        seen = None
        while r in alias:
            if seen is None:
                seen = [r]
            else:
                seen.append(r)
            r = alias[r]
        if r not in self.heaps:
            raise UnknownHeapError(f"heap id {h} does not resolve to a live heap")
        if seen:
            for s in seen:       # path compression
                alias[s] = r
        return r

    def _heap(self, h) -> Heap:
        heap = self.heaps.get(h)
        if heap is not None:
            return heap
        return self.heaps[self.resolve_heap(h)]

    def heap_size(self, h) -> int:
        return self._heap(h).size

    def live_heap_ids(self):
        return list(self.heaps)

    # -- handles ---------------------------------------------------------

    def _slot(self, x: NodeHandle) -> int:
        idx, gen = x
        if 0 <= idx < len(self._gen) and self._gen[idx] == gen:
            return idx
        raise BadHandleError(f"stale or invalid handle {x}")

    def handle(self, slot: int) -> NodeHandle:
        return NodeHandle(slot, self._gen[slot])

    def key_of(self, x: NodeHandle) -> int:
        return self._key[self._slot(x)]

    def _alloc(self, key, home) -> int:
        if self._free:
            s = self._free.pop()
            self._key[s] = key
            self._home[s] = home
            return s
        s = len(self._key)
        self._key.append(key)
        self._child.append(NIL)
        self._sib.append(NIL)
        self._prev.append(NIL)
        self._leftmost.append(False)
        self._dec.append(False)
        self._origin.append(_O_NONE)
        self._gen.append(0)
        self._home.append(home)
        return s

    def _release(self, s):
        self._gen[s] += 1     # invalidates every outstanding handle to s
        self._child[s] = NIL
        self._sib[s] = NIL
        self._prev[s] = NIL
        self._leftmost[s] = False
        self._dec[s] = False
        self._origin[s] = _O_NONE
        self._free.append(s)

    # -- structural primitives -------------------------------------------

    def _less(self, a, b) -> bool:
        """The single counted comparison site for key-order queries."""
        self.counters.comparisons += 1
        return a < b

    def _link_slots(self, a, b, origin) -> int:
        """Comparison-link two roots; smaller key wins, first wins ties."""
        c = self.counters
        c.comparisons += 1
        c.links += 1
        if self._key[b] < self._key[a]:
            a, b = b, a
        old = self._child[a]
        self._child[a] = b
        self._sib[b] = old
        self._prev[b] = a
        self._leftmost[b] = True
        self._origin[b] = origin
        if old != NIL:
            self._prev[old] = b
            self._leftmost[old] = False
        return a

    def _attach_leftmost(self, parent, child, origin):
        """Make ``child`` the leftmost child of ``parent``; no comparison."""
        self.counters.links += 1
        old = self._child[parent]
        self._child[parent] = child
        self._sib[child] = old
        self._prev[child] = parent
        self._leftmost[child] = True
        self._origin[child] = origin
        if old != NIL:
            self._prev[old] = child
            self._leftmost[old] = False

    def _cut_slot(self, s):
        """Detach the subtree rooted at a non-root slot, closing the gap."""
        self.counters.cuts += 1
        p = self._prev[s]
        nxt = self._sib[s]
        if self._leftmost[s]:
            self._child[p] = nxt
            if nxt != NIL:
                self._prev[nxt] = p
                self._leftmost[nxt] = True
        else:
            self._sib[p] = nxt
            if nxt != NIL:
                self._prev[nxt] = p
        self._prev[s] = NIL
        self._sib[s] = NIL
        self._leftmost[s] = False
        self._origin[s] = _O_NONE

    def link(self, r1: NodeHandle, r2: NodeHandle,
             origin: LinkOrigin = LinkOrigin.PAIRING) -> NodeHandle:
        """Comparison-link two tree roots; returns the surviving root.

        The larger-keyed root becomes the other's leftmost child (first
        argument wins ties). Exactly one comparison is counted.
        """
        a = self._slot(r1)
        b = self._slot(r2)
        if a == b:
            raise ValueError("cannot link a root with itself")
        if self._prev[a] != NIL or self._prev[b] != NIL:
            raise ValueError("link requires two roots")
        return self.handle(self._link_slots(a, b, int(origin)))

    # -- public operations -------------------------------------------------

    def insert(self, h, key) -> NodeHandle:
        """Add a key; links the new single-node tree with the main tree."""
        heap = self._heap(h)
        s = self._alloc(key, heap.id)
        heap.size += 1
        root = heap.root
        if root == NIL:
            heap.root = s
            heap.min_slot = s
        else:
            was_min_root = heap.min_slot == root
            winner = self._link_slots(root, s, _O_INSERT)
            heap.root = winner
            if was_min_root:
                heap.min_slot = winner
            elif winner == s and self._less(key, self._key[heap.min_slot]):
                # Pending decreased node holds the minimum; one extra check.
                heap.min_slot = s
        return NodeHandle(s, self._gen[s])

    def find_min(self, h):
        """Return (handle, key) of the minimum node. O(1), no comparisons."""
        heap = self._heap(h)
        m = heap.min_slot
        if m == NIL:
            raise EmptyHeapError(f"heap {heap.id} is empty")
        return NodeHandle(m, self._gen[m]), self._key[m]

    def decrease_key(self, h, x: NodeHandle, key) -> None:
        """Lower a node's key.

        Lazy mode records the node on the heap's decreased list (no cut);
        eager mode cuts its subtree and relinks it with the root.
        """
        heap = self._heap(h)
        s = self._slot(x)
        if self.heaps.get(self.resolve_heap(self._home[s])) is not heap:
            raise NotInHeapError(f"node {x} is not in heap {heap.id}")
        if self._less(self._key[s], key):
            raise KeyIncreaseError(
                f"new key {key} exceeds current key {self._key[s]}")
        self._key[s] = key
        if self.config.mode == "eager":
            if s != heap.root:
                self._cut_slot(s)
                heap.root = self._link_slots(heap.root, s, _O_CLEANUP)
            heap.min_slot = heap.root
            return
        if s != heap.min_slot and self._less(key, self._key[heap.min_slot]):
            heap.min_slot = s
        if s != heap.root and not self._dec[s]:
            self._dec[s] = True
            heap.decreased_list.append(s)
            cfg = self.config
            if (cfg.periodic_cleanup
                    and len(heap.decreased_list)
                    >= cfg.periodic_factor * math.log2(heap.size)):
                self._clean_up(heap)

    def detach_decreased(self, x: NodeHandle) -> Optional[NodeHandle]:
        """Cut a listed node out, splicing its leftmost child's subtree
        into its old position; returns the node as a detached pool root.

        A root is skipped defensively (flag cleared, returns None).
        """
        s = self._slot(x)
        if not self._dec[s]:
            raise ValueError(f"node {x} is not flagged as decreased")
        if self._prev[s] == NIL:
            self._dec[s] = False
            return None
        self._detach(s)
        return self.handle(s)

    def _detach(self, s):
        """detach_decreased on a known-flagged, known-non-root slot."""
        self._dec[s] = False
        c = self._child[s]
        if c == NIL:
            self._cut_slot(s)
        else:
            self.counters.cuts += 2
            # The remaining children (right of c) stay with s.
            rest = self._sib[c]
            self._child[s] = rest
            if rest != NIL:
                self._prev[rest] = s
                self._leftmost[rest] = True
            # c's subtree takes over s's position, link origin included.
            p = self._prev[s]
            nxt = self._sib[s]
            lm = self._leftmost[s]
            self._sib[c] = nxt
            self._prev[c] = p
            self._leftmost[c] = lm
            self._origin[c] = self._origin[s]
            if lm:
                self._child[p] = c
            else:
                self._sib[p] = c
            if nxt != NIL:
                self._prev[nxt] = c
            self._prev[s] = NIL
            self._sib[s] = NIL
            self._leftmost[s] = False
            self._origin[s] = _O_NONE
        self.counters.pool_trees += 1

    def combine_group(self, roots) -> NodeHandle:
        """Sort disjoint pool roots by key and chain them into a path.

        Each root becomes the leftmost child of the root with the next
        smaller key; returns the smallest. Sorting comparisons are counted.
        """
        slots = [self._slot(r) for r in roots]
        if not slots:
            raise ValueError("combine_group needs at least one root")
        return self.handle(self._combine_group(slots))

    def _combine_group(self, slots) -> int:
        self.counters.groups += 1
        if len(slots) > 1:
            key = self._key
            c = self.counters

            def cmp(a, b):
                # Ties broken by arena index for deterministic replay.
                c.comparisons += 1
                c.sort_comparisons += 1
                ka, kb = key[a], key[b]
                if ka < kb:
                    return -1
                if kb < ka:
                    return 1
                return -1 if a < b else 1

            slots = sorted(slots, key=cmp_to_key(cmp))
            for i in range(len(slots) - 1, 0, -1):
                self._attach_leftmost(slots[i - 1], slots[i], _O_CLEANUP)
        return slots[0]

    def clean_up(self, h) -> None:
        """Repair all pending decrease-key cuts on a heap.

        Afterwards the decreased list is empty, the minimum pointer is the
        root, and heap order holds on every link.
        """
        self._clean_up(self._heap(h))

    def _clean_up(self, heap: Heap) -> None:
        lst = heap.decreased_list
        if not lst:
            return
        cfg = self.config
        direct = (cfg.direct_relink
                  and len(lst) > cfg.direct_relink_fraction * heap.size)
        pool = []
        root = heap.root
        for s in lst:
            if not self._dec[s]:
                continue          # defensive; dedup keeps this unreachable
            if s == root:
                self._dec[s] = False
                continue
            self._detach(s)
            pool.append(s)
        heap.decreased_list = []
        if direct:
            for s in pool:
                root = self._link_slots(root, s, _O_CLEANUP)
        else:
            g = max(1, int(math.log2(heap.size)))
            for i in range(0, len(pool), g):
                combined = self._combine_group(pool[i:i + g])
                root = self._link_slots(root, combined, _O_CLEANUP)
        heap.root = root
        heap.min_slot = root
        hook = self.post_cleanup_hook
        if hook is not None:
            hook(self, heap.id)

    def two_pass_combine(self, first_child: Optional[NodeHandle]) -> Optional[NodeHandle]:
        """Recombine a removed root's children; returns the new root.

        First pass links the trees in pairs left to right (an odd trailing
        tree passes through); second pass folds the survivors right to
        left, linking each into the accumulated tree on its right.
        """
        if first_child is None:
            return None
        s = self._two_pass(self._slot(first_child))
        return self.handle(s) if s != NIL else None

    def _two_pass(self, first) -> int:
        if first == NIL:
            return NIL
        kids = []
        sib = self._sib
        prev = self._prev
        leftmost = self._leftmost
        origin = self._origin
        s = first
        while s != NIL:
            nxt = sib[s]
            sib[s] = NIL
            prev[s] = NIL
            leftmost[s] = False
            origin[s] = _O_NONE
            kids.append(s)
            s = nxt
        link = self._link_slots
        m = len(kids)
        if m == 1:
            return kids[0]
        paired = [link(kids[i], kids[i + 1], _O_PAIRING)
                  for i in range(0, m - 1, 2)]
        if m & 1:
            paired.append(kids[m - 1])
        acc = paired[-1]
        for i in range(len(paired) - 2, -1, -1):
            acc = link(paired[i], acc, _O_PAIRING)
        return acc

    def delete_min(self, h) -> int:
        """Remove the minimum node and return its key.

        Runs clean-up first (so the root is the minimum), then recombines
        the root's children with the two-pass scheme. The removed node's
        slot is recycled; stale handles to it are rejected thereafter.
        """
        key, _ = self._pop_min(self._heap(h))
        return key

    def _pop_min(self, heap: Heap):
        if heap.root == NIL:
            raise EmptyHeapError(f"heap {heap.id} is empty")
        self._clean_up(heap)
        root = heap.root
        key = self._key[root]
        new_root = self._two_pass(self._child[root])
        self._child[root] = NIL
        heap.root = new_root
        heap.min_slot = new_root
        heap.size -= 1
        self._release(root)
        return key, root

    def meld(self, h1, h2) -> int:
        """Merge two heaps; both old ids alias the surviving heap's id.

        The smaller heap (ties: the second argument) is cleaned up first
        by default and destroyed; the trees are comparison-linked.
        """
        a = self._heap(h1)
        b = self._heap(h2)
        if a is b:
            raise SelfMeldError(f"{h1} and {h2} resolve to the same heap")
        small, large = (a, b) if a.size < b.size else (b, a)
        if self.config.cleanup_on_meld:
            self._clean_up(small)
        if small.root == NIL:
            pass
        elif large.root == NIL:
            large.root = small.root
            large.min_slot = small.min_slot
        else:
            lmin, smin = large.min_slot, small.min_slot
            roots_were_min = lmin == large.root and smin == small.root
            winner = self._link_slots(large.root, small.root, _O_MELD)
            large.root = winner
            if roots_were_min:
                large.min_slot = winner
            elif self._less(self._key[smin], self._key[lmin]):
                large.min_slot = smin
            else:
                large.min_slot = lmin
        large.size += small.size
        if small.decreased_list:
            large.decreased_list.extend(small.decreased_list)
            small.decreased_list = []
        del self.heaps[small.id]
        self._alias[small.id] = large.id
        return large.id

    # -- validation ---------------------------------------------------------

    def validate(self, h) -> ValidationReport:
        """Check every structural invariant of one heap; read-only."""
        heap = self._heap(h)
        bad = []
        key = self._key
        child = self._child
        sib = self._sib
        prev = self._prev
        leftmost = self._leftmost
        dec = self._dec
        seen = set()
        count = 0
        min_seen = None
        root = heap.root
        if root != NIL:
            if prev[root] != NIL or sib[root] != NIL or leftmost[root]:
                bad.append(f"root node {root} has dangling prev/sibling links")
            if self._origin[root] != _O_NONE:
                bad.append(f"root node {root} carries a link origin")
            stack = [root]
            while stack:
                s = stack.pop()
                if s in seen:
                    bad.append(f"node {s} reachable twice (cycle or shared link)")
                    break
                seen.add(s)
                count += 1
                k = key[s]
                if min_seen is None or k < min_seen:
                    min_seen = k
                c = child[s]
                expect_leftmost = True
                left = s
                walked = 0
                while c != NIL:
                    walked += 1
                    if walked > heap.size:
                        bad.append(f"sibling chain under node {s} does not terminate")
                        break
                    if leftmost[c] != expect_leftmost:
                        bad.append(f"node {c}: is_leftmost flag inconsistent")
                    if prev[c] != left:
                        bad.append(f"node {c}: prev does not point to "
                                   f"{'parent' if expect_leftmost else 'left sibling'} {left}")
                    if not dec[c] and key[c] < k:
                        bad.append(f"node {c}: key {key[c]} below parent key {k}")
                    stack.append(c)
                    left = c
                    expect_leftmost = False
                    c = sib[c]
        if count != heap.size:
            bad.append(f"size is {heap.size} but {count} nodes are reachable")
        m = heap.min_slot
        if root == NIL:
            if m != NIL:
                bad.append("empty heap has a minimum pointer")
        else:
            if m == NIL:
                bad.append("non-empty heap lacks a minimum pointer")
            elif m not in seen:
                bad.append(f"min pointer {m} is not a node of this heap")
            else:
                if key[m] != min_seen:
                    bad.append(f"min pointer key {key[m]} != true minimum {min_seen}")
                if m != root and m not in heap.decreased_list:
                    bad.append(f"min pointer {m} is neither root nor listed as decreased")
        listed = set()
        for s in heap.decreased_list:
            if s in listed:
                bad.append(f"node {s} listed as decreased twice")
            listed.add(s)
            if s not in seen:
                bad.append(f"listed decreased node {s} not reachable")
            elif not dec[s]:
                bad.append(f"listed node {s} has no decreased flag")
            if s == root:
                bad.append("root is on the decreased list")
        for s in seen:
            if dec[s] and s not in listed:
                bad.append(f"node {s} flagged decreased but not listed")
        return ValidationReport(heap_id=heap.id, violations=bad)
