"""Offline amortized-cost auditor.

Replays a complete trace with knowledge of the future: a live node is
*white* if some later delete-min removes it, *black* if it survives the
whole trace. For every link between a node x and its parent, let w(x)
count the white nodes in x's subtree (x included if white) and w'(x)
count the white nodes in the subtrees of x's right siblings plus the
parent if it is white. The audited potential is

    phi = sum over links with w(x) > 0 of log2((w(x) + w'(x)) / w(x))

All logarithms are base 2 throughout. The checks verified here:

* leftmost-child identity: w(x) + w'(x) = w(p(x)) exactly;
* the left-spine sum from a node z telescopes to
  log2 w(z) - log2 w(d), d being the deepest spine node with w > 0
  (equal to log2 w(z) when w(d) = 1);
* the insert/meld-link potential of a tree with k whites is at most
  log2(k!);
* n * (log2 log2 (n+1) - log2 log2 n) stays below log2(e);
* structural credit counts: active runs (active node with an inactive
  right sibling) and children of active parents.

Snapshots are taken after every event and cost O(n) each; this auditor
is meant for offline use on desk-scale traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import NIL, LinkOrigin, Universe, VariantConfig
from .trace import DELETEMIN, TraceEvent, parse_trace  # noqa: F401  (re-export)
from .workload import TraceRunner

LOG2_E = math.log2(math.e)

_AUDITED_ORIGINS = (int(LinkOrigin.INSERT), int(LinkOrigin.MELD))


@dataclass
class ColorMap:
    """Which node tokens a fixed trace eventually removes.

    A live node is white at time t exactly when its removal lies in the
    future; with the trace fixed, that is simply "it gets removed at
    all", recorded here with the removing op index.
    """

    removed_at: dict

    def is_white(self, token: str) -> bool:
        return token in self.removed_at

    @property
    def white(self) -> set:
        return set(self.removed_at)


@dataclass
class SnapNode:
    token: str
    key: int
    parent: Optional[str]
    children: tuple
    origin: int


@dataclass
class ForestSnapshot:
    """All live trees after one event, by node token."""

    op_index: int
    op_type: str
    nodes: dict
    roots: list


@dataclass
class PotentialTerm:
    node: str
    w: int
    w_prime: int
    term: float
    origin: LinkOrigin


@dataclass
class PotentialReport:
    entries: list
    phi: float
    active_runs: int
    active_parent_children: int


@dataclass
class SpineCheck:
    root: str
    total: float
    expected: float
    w_root: int
    w_deepest: int
    passed: bool

    @property
    def exact_log_case(self) -> bool:
        """True when the sum equals log2 w(root) outright (w(d) = 1)."""
        return self.w_deepest == 1


@dataclass
class Lemma1Check:
    margins: list           # (root token, whites, link potential, bound)
    min_margin: float
    passed: bool


@dataclass
class PropositionCheck:
    max_value: float
    arg_max: int
    bound: float
    passed: bool


def replay_with_snapshots(events, config: Optional[VariantConfig] = None,
                          snapshots: str = "every"):
    """Replay a trace, returning (snapshots, colors).

    ``snapshots`` is "every" (one per event) or "final" (last state only).
    """
    if snapshots not in ("every", "final"):
        raise ValueError("snapshots must be 'every' or 'final'")
    runner = TraceRunner(config=config)
    shots = []
    removed_at = {}
    last = None
    for i, e in enumerate(events):
        _, removed = runner.execute(e)
        if removed is not None:
            removed_at[removed] = i
        if snapshots == "every":
            shots.append(take_snapshot(runner, i, e.kind))
        else:
            last = (i, e.kind)
    if snapshots == "final" and last is not None:
        shots.append(take_snapshot(runner, last[0], last[1]))
    return shots, ColorMap(removed_at)


def compute_colors(events) -> ColorMap:
    """Replay the trace and mark every token a delete-min removes."""
    runner = TraceRunner()
    removed_at = {}
    for i, e in enumerate(events):
        _, removed = runner.execute(e)
        if removed is not None:
            removed_at[removed] = i
    return ColorMap(removed_at)


def colors_from_removals(removal_log) -> ColorMap:
    """Rebuild a color map from (op_index, token) pairs scanned backward."""
    removed_at = {}
    for op_index, token in reversed(list(removal_log)):
        removed_at[token] = op_index
    return ColorMap(removed_at)


def take_snapshot(runner: TraceRunner, op_index: int, op_type: str) -> ForestSnapshot:
    """Capture every live tree of the runner's universe, by token."""
    u = runner.universe
    token_of = runner.token_of
    nodes = {}
    roots = []
    child = u._child
    sib = u._sib
    key = u._key
    origin = u._origin
    for heap in u.heaps.values():
        if heap.root == NIL:
            continue
        root_tok = token_of[heap.root]
        roots.append(root_tok)
        stack = [(heap.root, None)]
        while stack:
            s, parent = stack.pop()
            kids = []
            c = child[s]
            while c != NIL:
                kids.append(token_of[c])
                stack.append((c, token_of[s]))
                c = sib[c]
            nodes[token_of[s]] = SnapNode(token=token_of[s], key=key[s],
                                          parent=parent, children=tuple(kids),
                                          origin=origin[s])
    return ForestSnapshot(op_index=op_index, op_type=op_type,
                          nodes=nodes, roots=roots)


def _subtree_order(snap: ForestSnapshot):
    """Tokens in an order where children precede parents."""
    order = []
    stack = list(snap.roots)
    nodes = snap.nodes
    while stack:
        t = stack.pop()
        order.append(t)
        stack.extend(nodes[t].children)
    order.reverse()
    return order


def white_counts(snap: ForestSnapshot, colors: ColorMap) -> dict:
    """w(x): white descendants of x, x itself included when white."""
    nodes = snap.nodes
    is_white = colors.is_white
    w = {}
    for t in _subtree_order(snap):
        node = nodes[t]
        total = 1 if is_white(t) else 0
        for c in node.children:
            total += w[c]
        w[t] = total
    return w


def _weights(snap: ForestSnapshot, colors: ColorMap):
    """(w, w') maps; w'(x) is right-sibling whites plus a white parent."""
    nodes = snap.nodes
    w = white_counts(snap, colors)
    wp = {}
    is_white = colors.is_white
    for t, node in nodes.items():
        kids = node.children
        if not kids:
            continue
        parent_white = 1 if is_white(t) else 0
        suffix = 0
        for c in reversed(kids):
            wp[c] = suffix + parent_white
            suffix += w[c]
    return w, wp


def compute_potential(snap: ForestSnapshot, colors: ColorMap) -> PotentialReport:
    """Per-link white counts, potential terms, and credit statistics.

    Terms on links with w = 0 are reported as 0 and excluded from phi.
    Colors are total: a token the trace never removes is black.
    """
    w, wp = _weights(snap, colors)
    entries = []
    phi = 0.0
    for t, node in snap.nodes.items():
        if node.parent is None:
            continue
        wx = w[t]
        wpx = wp[t]
        if wx > 0:
            term = math.log2((wx + wpx) / wx)
            phi += term
        else:
            term = 0.0
        entries.append(PotentialTerm(node=t, w=wx, w_prime=wpx, term=term,
                                     origin=LinkOrigin(node.origin)))
    runs, apc = count_credit_stats(snap, colors, _w=w)
    return PotentialReport(entries=entries, phi=phi, active_runs=runs,
                           active_parent_children=apc)


def count_credit_stats(snap: ForestSnapshot, colors: ColorMap, _w=None):
    """(active runs, children of active parents).

    A node is active when its subtree contains any white node; an active
    run is an active node whose right sibling exists and is inactive.
    """
    w = white_counts(snap, colors) if _w is None else _w
    runs = 0
    children_of_active = 0
    for t, node in snap.nodes.items():
        kids = node.children
        if not kids:
            continue
        if w[t] > 0:
            children_of_active += len(kids)
        for left, right in zip(kids, kids[1:]):
            if w[left] > 0 and w[right] == 0:
                runs += 1
    return runs, children_of_active


def leftmost_identity_holds(snap: ForestSnapshot, colors: ColorMap) -> bool:
    """w(x) + w'(x) = w(p(x)) exactly, for every leftmost child x."""
    w, wp = _weights(snap, colors)
    for t, node in snap.nodes.items():
        if node.children:
            x = node.children[0]
            if w[x] + wp[x] != w[t]:
                return False
    return True


def check_left_spine(snap: ForestSnapshot, colors: ColorMap, z: str,
                     tol: float = 1e-9) -> SpineCheck:
    """Verify the telescoping sum of potential terms down z's left spine."""
    nodes = snap.nodes
    if z not in nodes:
        raise ValueError(f"unknown node token {z!r}")
    w, wp = _weights(snap, colors)
    if w[z] == 0:
        raise ValueError(f"node {z!r} has no white descendants")
    total = 0.0
    deepest = z
    t = z
    while nodes[t].children:
        x = nodes[t].children[0]
        if w[x] == 0:
            break
        total += math.log2((w[x] + wp[x]) / w[x])
        deepest = x
        t = x
    expected = math.log2(w[z]) - math.log2(w[deepest])
    return SpineCheck(root=z, total=total, expected=expected, w_root=w[z],
                      w_deepest=w[deepest], passed=abs(total - expected) <= tol)


def check_lemma1(snap: ForestSnapshot, colors: ColorMap,
                 tol: float = 1e-9) -> Lemma1Check:
    """Insert/meld-link potential per tree is at most log2(k!) for k whites."""
    w, wp = _weights(snap, colors)
    nodes = snap.nodes
    margins = []
    min_margin = math.inf
    for root in snap.roots:
        p_tau = 0.0
        stack = [root]
        while stack:
            t = stack.pop()
            node = nodes[t]
            stack.extend(node.children)
            if node.parent is not None and node.origin in _AUDITED_ORIGINS:
                wx = w[t]
                if wx > 0:
                    p_tau += math.log2((wx + wp[t]) / wx)
        k = w[root]
        bound = math.lgamma(k + 1) / math.log(2)
        margins.append((root, k, p_tau, bound))
        min_margin = min(min_margin, bound - p_tau)
    if not margins:
        min_margin = 0.0
    return Lemma1Check(margins=margins, min_margin=min_margin,
                       passed=min_margin >= -tol)


def check_proposition(n_values) -> PropositionCheck:
    """n * (log2 log2 (n+1) - log2 log2 n) < log2(e), for every n > 2."""
    arr = np.asarray(list(n_values), dtype=np.float64)
    if arr.size == 0:
        return PropositionCheck(max_value=0.0, arg_max=0, bound=LOG2_E, passed=True)
    if np.any(arr <= 2):
        raise ValueError("proposition check requires n > 2")
    values = arr * (np.log2(np.log2(arr + 1.0)) - np.log2(np.log2(arr)))
    i = int(np.argmax(values))
    return PropositionCheck(max_value=float(values[i]), arg_max=int(arr[i]),
                            bound=LOG2_E, passed=bool(np.all(values < LOG2_E)))


@dataclass
class SnapshotAudit:
    """All per-snapshot checks for one point of the replay."""

    op_index: int
    op_type: str
    phi: float
    identity_ok: bool
    spine: list
    lemma1: Lemma1Check
    active_runs: int
    active_parent_children: int
    live: int
    white_live: int

    @property
    def ok(self) -> bool:
        return (self.identity_ok and self.lemma1.passed
                and all(s.passed for s in self.spine))


@dataclass
class AuditReport:
    snapshots: list
    proposition: PropositionCheck

    @property
    def passed(self) -> bool:
        return self.proposition.passed and all(s.ok for s in self.snapshots)


def audit_trace(events, config: Optional[VariantConfig] = None,
                snapshots: str = "every",
                proposition_limit: int = 10 ** 6) -> AuditReport:
    """Replay a trace and run every check on every captured snapshot."""
    shots, colors = replay_with_snapshots(events, config=config,
                                          snapshots=snapshots)
    audited = []
    for snap in shots:
        report = compute_potential(snap, colors)
        w, _ = _weights(snap, colors)
        spine = [check_left_spine(snap, colors, r)
                 for r in snap.roots if w[r] > 0]
        audited.append(SnapshotAudit(
            op_index=snap.op_index, op_type=snap.op_type, phi=report.phi,
            identity_ok=leftmost_identity_holds(snap, colors),
            spine=spine, lemma1=check_lemma1(snap, colors),
            active_runs=report.active_runs,
            active_parent_children=report.active_parent_children,
            live=len(snap.nodes),
            white_live=sum(1 for t in snap.nodes if colors.is_white(t))))
    proposition = check_proposition(range(3, proposition_limit + 1))
    return AuditReport(snapshots=audited, proposition=proposition)
