"""Unit tests for the heap core: hand-checked examples and properties."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairheap.core import (BadHandleError, EmptyHeapError, KeyIncreaseError,
                           LinkOrigin, NotInHeapError, SelfMeldError,
                           Universe, VariantConfig)


def fresh(config=None):
    u = Universe(config=config)
    return u, u.new_heap()


def drain(u, h):
    out = []
    while u.heap_size(h) > 0:
        out.append(u.delete_min(h))
    return out


class TestLink:
    def test_smaller_key_wins(self):
        u = Universe()
        h1, h2 = u.new_heap(), u.new_heap()
        r3 = u.insert(h1, 3)
        r5 = u.insert(h2, 5)
        winner = u.link(r3, r5)
        assert winner == r3
        assert u._child[r3.index] == r5.index

    def test_symmetric(self):
        u = Universe()
        h1, h2 = u.new_heap(), u.new_heap()
        r5 = u.insert(h1, 5)
        r3 = u.insert(h2, 3)
        assert u.link(r5, r3) == r3
        assert u._child[r3.index] == r5.index

    def test_tie_first_argument_wins(self):
        u = Universe()
        h1, h2 = u.new_heap(), u.new_heap()
        a = u.insert(h1, 4)
        b = u.insert(h2, 4)
        assert u.link(a, b) == a

    def test_one_comparison_counted(self):
        u = Universe()
        h1, h2 = u.new_heap(), u.new_heap()
        a, b = u.insert(h1, 1), u.insert(h2, 2)
        before = u.counters.comparisons
        u.link(a, b)
        assert u.counters.comparisons - before == 1

    def test_self_link_rejected(self):
        u, h = fresh()
        a = u.insert(h, 1)
        with pytest.raises(ValueError):
            u.link(a, a)


class TestInsert:
    def test_into_empty(self):
        u, h = fresh()
        u.insert(h, 5)
        handle, key = u.find_min(h)
        assert key == 5
        assert u.heap_size(h) == 1

    def test_linking_rule(self):
        u, h = fresh()
        a = u.insert(h, 3)
        b = u.insert(h, 7)
        assert u.find_min(h) == (a, 3)
        assert u._child[a.index] == b.index

    def test_min_tracks_decreased_node(self):
        # insert 3, insert 5, decrease 5 -> 1, insert 2: min stays on the 1
        u, h = fresh()
        u.insert(h, 3)
        n5 = u.insert(h, 5)
        u.decrease_key(h, n5, 1)
        u.insert(h, 2)
        handle, key = u.find_min(h)
        assert key == 1
        assert handle == n5

    def test_one_comparison_on_clean_heap(self):
        u, h = fresh()
        u.insert(h, 10)
        before = u.counters.comparisons
        u.insert(h, 4)
        assert u.counters.comparisons - before == 1

    def test_unknown_heap(self):
        u = Universe()
        from pairheap.core import UnknownHeapError
        with pytest.raises(UnknownHeapError):
            u.insert(99, 1)


class TestFindMin:
    def test_basic(self):
        u, h = fresh()
        for k in (5, 3, 8):
            u.insert(h, k)
        assert u.find_min(h)[1] == 3

    def test_empty(self):
        u, h = fresh()
        with pytest.raises(EmptyHeapError):
            u.find_min(h)

    def test_min_on_non_root(self):
        u, h = fresh()
        u.insert(h, 5)
        n = u.insert(h, 3)
        # wait: 3 becomes the root; decrease the non-root 5 instead
        u, h = fresh()
        r = u.insert(h, 3)
        n = u.insert(h, 5)
        u.decrease_key(h, n, 2)
        handle, key = u.find_min(h)
        assert key == 2 and handle == n
        assert u.heaps[h].root == r.index

    def test_no_comparisons(self):
        u, h = fresh()
        u.insert(h, 1)
        before = u.counters.comparisons
        u.find_min(h)
        assert u.counters.comparisons == before


class TestDecreaseKey:
    def test_root_not_listed(self):
        u, h = fresh()
        r = u.insert(h, 3)
        u.decrease_key(h, r, 1)
        assert u.find_min(h)[1] == 1
        assert u.heaps[h].decreased_list == []

    def test_non_root_listed_and_min_updated(self):
        u, h = fresh()
        u.insert(h, 3)
        n8 = u.insert(h, 8)
        u.decrease_key(h, n8, 2)
        assert u.find_min(h) == (n8, 2)
        assert len(u.heaps[h].decreased_list) == 1

    def test_double_decrease_single_entry(self):
        u, h = fresh()
        u.insert(h, 3)
        n = u.insert(h, 9)
        u.decrease_key(h, n, 7)
        u.decrease_key(h, n, 5)
        assert len(u.heaps[h].decreased_list) == 1
        assert u.key_of(n) == 5

    def test_key_increase_rejected(self):
        u, h = fresh()
        n = u.insert(h, 4)
        with pytest.raises(KeyIncreaseError):
            u.decrease_key(h, n, 6)

    def test_wrong_heap_rejected(self):
        u = Universe()
        h1, h2 = u.new_heap(), u.new_heap()
        n = u.insert(h1, 5)
        u.insert(h2, 1)
        with pytest.raises(NotInHeapError):
            u.decrease_key(h2, n, 2)

    def test_equal_key_allowed(self):
        u, h = fresh()
        u.insert(h, 1)
        n = u.insert(h, 4)
        u.decrease_key(h, n, 4)
        assert u.key_of(n) == 4

    def test_periodic_cleanup_triggers(self):
        cfg = VariantConfig(periodic_cleanup=True, periodic_factor=1.0)
        u, h = fresh(cfg)
        u.insert(h, 0)
        nodes = [u.insert(h, 10 + i) for i in range(15)]
        # threshold is log2(16) = 4 pending decreases
        for i, n in enumerate(nodes[:3]):
            u.decrease_key(h, n, 5 + i)
        assert len(u.heaps[h].decreased_list) == 3
        u.decrease_key(h, nodes[3], 9)
        assert u.heaps[h].decreased_list == []
        assert u.validate(h).ok


class TestEagerMode:
    def test_list_always_empty(self):
        u, h = fresh(VariantConfig(mode="eager"))
        nodes = [u.insert(h, 10 * (i + 1)) for i in range(6)]
        for n in nodes[2:]:
            u.decrease_key(h, n, u.key_of(n) - 15)
        assert u.heaps[h].decreased_list == []
        assert u.validate(h).ok
        assert u.heaps[h].min_slot == u.heaps[h].root

    def test_forces_lazy_options_off(self):
        cfg = VariantConfig(mode="eager", cleanup_on_meld=True,
                            periodic_cleanup=True, direct_relink=True)
        assert not cfg.cleanup_on_meld
        assert not cfg.periodic_cleanup
        assert not cfg.direct_relink

    def test_matches_lazy_outputs(self):
        ops = [5, 3, 9, 1, 7, 12, 2]
        out = {}
        for mode in ("lazy", "eager"):
            u, h = fresh(VariantConfig(mode=mode))
            handles = [u.insert(h, k) for k in ops]
            u.decrease_key(h, handles[2], 0)
            u.decrease_key(h, handles[5], 4)
            out[mode] = drain(u, h)
        assert out["lazy"] == out["eager"] == sorted([5, 3, 0, 1, 7, 4, 2])


class TestDetachDecreased:
    def _flag(self, u, handle):
        u._dec[handle.index] = True

    def build_node(self, u, key):
        return u.insert(u.new_heap(), key)

    def test_leftmost_child_replaces_node(self):
        # root 1 -> x=4 with children [6-subtree, 7, 8]; detach x:
        # 6's subtree takes x's place, pool tree is 4 with [7, 8]
        u = Universe()
        n1 = self.build_node(u, 1)
        x = self.build_node(u, 4)
        n6 = self.build_node(u, 6)
        n60 = self.build_node(u, 60)   # 6's own child
        n7 = self.build_node(u, 7)
        n8 = self.build_node(u, 8)
        u.link(n6, n60)
        u.link(x, n8)
        u.link(x, n7)
        u.link(x, n6)
        u.link(n1, x, origin=LinkOrigin.INSERT)
        self._flag(u, x)
        pool = u.detach_decreased(x)
        assert pool == x
        assert u._child[n1.index] == n6.index
        # the glued subtree inherits x's position and link origin
        assert u._origin[n6.index] == int(LinkOrigin.INSERT)
        assert u._leftmost[n6.index]
        kids = []
        c = u._child[x.index]
        while c != -1:
            kids.append(u._key[c])
            c = u._sib[c]
        assert kids == [7, 8]
        assert u._prev[x.index] == -1 and not u._dec[x.index]

    def test_leaf_detaches_alone(self):
        u = Universe()
        n1 = self.build_node(u, 1)
        x = self.build_node(u, 2)
        u.link(n1, x)
        self._flag(u, x)
        pool = u.detach_decreased(x)
        assert pool == x
        assert u._child[n1.index] == -1
        assert u._child[x.index] == -1

    def test_single_child_takes_slot(self):
        u = Universe()
        n1 = self.build_node(u, 1)
        x = self.build_node(u, 5)
        c = self.build_node(u, 6)
        u.link(x, c)
        u.link(n1, x)
        self._flag(u, x)
        pool = u.detach_decreased(x)
        assert pool == x
        assert u._child[n1.index] == c.index
        assert u._child[x.index] == -1

    def test_unflagged_rejected(self):
        u = Universe()
        n1 = self.build_node(u, 1)
        x = self.build_node(u, 2)
        u.link(n1, x)
        with pytest.raises(ValueError):
            u.detach_decreased(x)

    def test_root_skipped(self):
        u = Universe()
        n1 = self.build_node(u, 1)
        self._flag(u, n1)
        assert u.detach_decreased(n1) is None
        assert not u._dec[n1.index]


class TestCombineGroup:
    def test_path_rule(self):
        u = Universe()
        roots = {k: u.insert(u.new_heap(), k) for k in (9, 4, 7)}
        smallest = u.combine_group([roots[9], roots[4], roots[7]])
        assert smallest == roots[4]
        assert u._child[roots[4].index] == roots[7].index
        assert u._child[roots[7].index] == roots[9].index
        assert u._origin[roots[7].index] == int(LinkOrigin.CLEANUP)

    def test_single_root(self):
        u = Universe()
        r = u.insert(u.new_heap(), 6)
        before = u.counters.comparisons
        assert u.combine_group([r]) == r
        assert u.counters.comparisons == before

    def test_equal_keys_arena_order(self):
        u = Universe()
        rs = [u.insert(u.new_heap(), 5) for _ in range(3)]
        smallest = u.combine_group(list(reversed(rs)))
        assert smallest == rs[0]        # lowest arena index wins ties
        assert u.key_of(smallest) == 5

    def test_empty_rejected(self):
        u = Universe()
        with pytest.raises(ValueError):
            u.combine_group([])

    def test_sort_comparisons_counted(self):
        u = Universe()
        rs = [u.insert(u.new_heap(), k) for k in (3, 1, 2, 9, 4)]
        u.combine_group(rs)
        assert u.counters.sort_comparisons > 0
        assert u.counters.groups == 1


class TestCleanUp:
    def test_empty_list_noop(self):
        u, h = fresh()
        for k in (4, 2, 9):
            u.insert(h, k)
        before = u.counters.as_tuple()
        u.clean_up(h)
        assert u.counters.as_tuple() == before

    def test_size8_three_decreases_one_group(self):
        u, h = fresh()
        u.insert(h, 0)
        nodes = [u.insert(h, 10 + i) for i in range(7)]
        before_groups = u.counters.groups
        for n in nodes[:3]:
            u.decrease_key(h, n, u.key_of(n) - 5)
        links_before = u.counters.links
        u.clean_up(h)
        assert u.counters.groups - before_groups == 1   # g = log2(8) = 3
        assert u.counters.pool_trees == 3
        assert u.validate(h).ok
        assert u.heaps[h].decreased_list == []
        assert u.heaps[h].min_slot == u.heaps[h].root

    def test_decreased_below_root_becomes_root(self):
        u, h = fresh()
        u.insert(h, 5)
        n = u.insert(h, 9)
        u.decrease_key(h, n, 1)
        u.clean_up(h)
        assert u.find_min(h) == (n, 1)
        assert u.heaps[h].root == n.index

    def test_direct_relink_mode(self):
        cfg = VariantConfig(direct_relink=True, direct_relink_fraction=0.25)
        u, h = fresh(cfg)
        u.insert(h, 0)
        nodes = [u.insert(h, 100 + i) for i in range(7)]
        for n in nodes[:4]:                 # 4 > 0.25 * 8
            u.decrease_key(h, n, u.key_of(n) - 50)
        groups_before = u.counters.groups
        u.clean_up(h)
        assert u.counters.groups == groups_before    # no grouping happened
        assert u.counters.pool_trees == 4
        assert u.validate(h).ok

    def test_post_cleanup_hook_runs(self):
        u, h = fresh()
        calls = []
        u.post_cleanup_hook = lambda universe, hid: calls.append(hid)
        u.insert(h, 1)
        n = u.insert(h, 5)
        u.decrease_key(h, n, 2)
        u.clean_up(h)
        assert calls == [h]


class TestTwoPass:
    def build_children(self, u, h, keys):
        u.insert(h, -1000)
        return [u.insert(h, k) for k in keys]

    def test_even_children(self):
        # children [5,3,9,7]: (5,3)->3, (9,7)->7; link(3,7) -> 3
        u, h = fresh()
        self.build_children(u, h, [7, 9, 3, 5])   # leftmost-first reversal
        before = u.counters.comparisons
        assert u.delete_min(h) == -1000
        assert u.counters.comparisons - before == 3
        assert u.find_min(h)[1] == 3

    def test_odd_children(self):
        u, h = fresh()
        self.build_children(u, h, [8, 2, 5])
        before = u.counters.comparisons
        assert u.delete_min(h) == -1000
        assert u.counters.comparisons - before == 2
        assert u.find_min(h)[1] == 2

    def test_single_child(self):
        u, h = fresh()
        self.build_children(u, h, [4])
        before = u.counters.comparisons
        u.delete_min(h)
        assert u.counters.comparisons - before == 0
        assert u.find_min(h)[1] == 4

    def test_empty_input(self):
        u = Universe()
        assert u.two_pass_combine(None) is None

    @given(st.lists(st.integers(min_value=-100, max_value=100),
                    min_size=1, max_size=40))
    @settings(max_examples=60, deadline=None)
    def test_comparison_count_formula(self, keys):
        u, h = fresh()
        self.build_children(u, h, list(reversed(keys)))
        before = u.counters.comparisons
        u.delete_min(h)
        m = len(keys)
        assert u.counters.comparisons - before == m // 2 + ((m + 1) // 2 - 1)
        assert u.find_min(h)[1] == min(keys)


class TestDeleteMin:
    def test_basic(self):
        u, h = fresh()
        for k in (5, 3, 8):
            u.insert(h, k)
        assert u.delete_min(h) == 3
        assert u.find_min(h)[1] == 5

    def test_single_node(self):
        u, h = fresh()
        n = u.insert(h, 5)
        u.decrease_key(h, n, 4)
        assert u.delete_min(h) == 4
        assert u.heap_size(h) == 0
        with pytest.raises(EmptyHeapError):
            u.delete_min(h)

    def test_cleanup_promotes_decreased(self):
        u, h = fresh()
        for k in (7, 4):
            u.insert(h, k)
        n9 = u.insert(h, 9)
        u.decrease_key(h, n9, 1)
        assert u.delete_min(h) == 1
        assert sorted(drain(u, h)) == [4, 7]

    def test_stale_handle_rejected(self):
        u, h = fresh()
        n = u.insert(h, 2)
        u.insert(h, 5)
        u.delete_min(h)
        with pytest.raises(BadHandleError):
            u.decrease_key(h, n, 1)
        with pytest.raises(BadHandleError):
            u.key_of(n)

    def test_slot_reuse_changes_generation(self):
        u, h = fresh()
        n = u.insert(h, 2)
        u.delete_min(h)
        n2 = u.insert(h, 3)
        assert n2.index == n.index
        assert n2.generation == n.generation + 1
        with pytest.raises(BadHandleError):
            u.key_of(n)


class TestMeld:
    def test_cleanup_on_smaller(self):
        u = Universe()
        ha, hb = u.new_heap(), u.new_heap()
        u.insert(ha, 3)
        u.insert(ha, 7)
        u.insert(hb, 5)
        hm = u.meld(ha, hb)
        assert u.heap_size(hm) == 3
        assert u.find_min(hm)[1] == 3

    def test_empty_side_no_comparison(self):
        u = Universe()
        ha, hb = u.new_heap(), u.new_heap()
        u.insert(hb, 4)
        before = u.counters.comparisons
        hm = u.meld(ha, hb)
        assert u.counters.comparisons == before
        assert u.find_min(hm)[1] == 4

    def test_pending_decrease_on_larger_side(self):
        u = Universe()
        ha, hb = u.new_heap(), u.new_heap()
        for k in (10, 20, 30):
            last = u.insert(ha, k)
        u.decrease_key(ha, last, 5)     # larger side pending min = 5
        u.insert(hb, 7)
        hm = u.meld(ha, hb)
        assert u.find_min(hm)[1] == 5
        assert u.validate(hm).ok

    def test_self_meld_rejected(self):
        u = Universe()
        ha, hb = u.new_heap(), u.new_heap()
        hm = u.meld(ha, hb)
        with pytest.raises(SelfMeldError):
            u.meld(ha, hb)              # both alias the same heap now

    def test_aliases_resolve_idempotently(self):
        u = Universe()
        ha, hb = u.new_heap(), u.new_heap()
        u.insert(ha, 1)
        u.insert(hb, 2)
        hm = u.meld(ha, hb)
        assert u.resolve_heap(ha) == hm
        assert u.resolve_heap(hb) == hm
        assert u.resolve_heap(hm) == hm
        hc = u.new_heap()
        u.insert(hc, 0)
        hm2 = u.meld(hc, ha)            # stale id still usable
        assert u.resolve_heap(ha) == hm2
        assert u.find_min(hb)[1] == 0

    def test_size_tie_cleans_second(self):
        u = Universe()
        ha, hb = u.new_heap(), u.new_heap()
        u.insert(ha, 1)
        a2 = u.insert(ha, 9)
        u.insert(hb, 2)
        b2 = u.insert(hb, 8)
        u.decrease_key(ha, a2, 5)
        u.decrease_key(hb, b2, 4)
        u.meld(ha, hb)
        # second argument's list was cleaned; first's concatenated over
        heap = u.heaps[u.resolve_heap(ha)]
        assert [u._key[s] for s in heap.decreased_list] == [5]

    def test_no_meld_cleanup_concatenates(self):
        cfg = VariantConfig(cleanup_on_meld=False)
        u = Universe(cfg)
        ha, hb = u.new_heap(), u.new_heap()
        u.insert(ha, 1)
        a2 = u.insert(ha, 9)
        u.insert(hb, 2)
        b2 = u.insert(hb, 8)
        u.insert(hb, 3)
        u.decrease_key(ha, a2, 5)
        u.decrease_key(hb, b2, 4)
        hm = u.meld(ha, hb)
        heap = u.heaps[hm]
        assert sorted(u._key[s] for s in heap.decreased_list) == [4, 5]
        assert u.find_min(hm)[1] == 1
        assert u.validate(hm).ok

    def test_sizes_summed(self):
        u = Universe()
        ha, hb = u.new_heap(), u.new_heap()
        for k in range(5):
            u.insert(ha, k)
        for k in range(3):
            u.insert(hb, 100 + k)
        assert u.heap_size(u.meld(ha, hb)) == 8


class TestValidate:
    def test_fresh_heap_clean(self):
        u, h = fresh()
        for k in (5, 1, 3, 2, 4):
            u.insert(h, k)
        u.delete_min(h)
        assert u.validate(h).ok

    def test_detects_corrupted_sibling(self):
        u, h = fresh()
        a = u.insert(h, 1)
        b = u.insert(h, 2)
        c = u.insert(h, 3)
        u.delete_min(h)
        root = u.heaps[h].root
        child = u._child[root]
        u._prev[child] = 77                 # corrupt
        report = u.validate(h)
        assert not report.ok
        assert any(str(child) in v for v in report.violations)

    def test_detects_size_mismatch(self):
        u, h = fresh()
        u.insert(h, 1)
        u.heaps[h].size = 7
        assert not u.validate(h).ok

    def test_post_cleanup_assertions(self):
        u, h = fresh()
        u.insert(h, 4)
        nodes = [u.insert(h, 10 + i) for i in range(6)]
        for n in nodes[:3]:
            u.decrease_key(h, n, u.key_of(n) - 9)
        u.clean_up(h)
        heap = u.heaps[h]
        assert heap.decreased_list == []
        assert heap.min_slot == heap.root
        assert u.validate(h).ok


class TestConfigValidation:
    def test_bad_mode(self):
        with pytest.raises(ValueError):
            VariantConfig(mode="bogus")

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            VariantConfig(direct_relink_fraction=0.0)

    def test_bad_factor(self):
        with pytest.raises(ValueError):
            VariantConfig(periodic_factor=-1.0)


@given(st.lists(st.integers(min_value=-50, max_value=50), min_size=1,
                max_size=80),
       st.randoms(use_true_random=False))
@settings(max_examples=80, deadline=None)
def test_heapsort_with_random_decreases(keys, rnd):
    """Insert everything, decrease a few nodes, drain: sorted output."""
    u, h = fresh()
    handles = {}
    for i, k in enumerate(keys):
        handles[i] = (u.insert(h, k), k)
    expected = list(keys)
    for i in sorted(rnd.sample(range(len(keys)), len(keys) // 3)):
        handle, k = handles[i]
        nk = k - rnd.randint(0, 40)
        u.decrease_key(h, handle, nk)
        expected[i] = nk
    assert drain(u, h) == sorted(expected)
    assert u.validate(h).ok
