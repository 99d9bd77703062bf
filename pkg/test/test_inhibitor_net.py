#!/usr/bin/env python3
"""
Test inhibitor nets: step firing, reachability, states, safety and equivalence
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import logging

import pytest

from errors import InvalidNetError, NotEnabledError, UnknownNameError, UnsafeNetError
from fixture_library import load_net
from inhibitor_net import (
    EquivalenceVerdict, InhibitorNet, Multiset, SafetyVerdict, default_depth, distinguishing_states,
    enabled_steps, explain_disabled, explore_states, find_isomorphism, fire, is_acyclic, is_safe,
    net_equiv, reachable_markings, sorted_multisets, states, step_enabled,
)

N1_MARKINGS = [
    Multiset(["s1", "s2", "s3"]),
    Multiset(["s1", "s2", "s6"]),
    Multiset(["s2", "s3", "s4"]),
    Multiset(["s2", "s4", "s6"]),
    Multiset(["s4", "s5"]),
]


@pytest.fixture
def intro():
    return load_net("inhibitor_intro.net").net


def loop_net():
    """Two transitions moving one token back and forth"""
    return InhibitorNet(["p", "q"], ["go", "back"],
                        [("p", "go"), ("go", "q"), ("q", "back"), ("back", "p")], marking=["p"])


class TestMultiset:
    """Multisets used for markings, steps and states"""

    def test_arithmetic(self):
        m = Multiset(["a", "b"]) + Multiset({"b": 1})
        assert m["b"] == 2 and m["z"] == 0
        assert m.size() == 3
        assert not m.is_set()
        assert m - Multiset(["b"]) == Multiset(["a", "b"])
        assert Multiset(["a"]) <= m

    def test_cannot_go_negative(self):
        with pytest.raises(ValueError):
            Multiset(["a"]) - Multiset(["b"])

    def test_repr_and_lists(self):
        m = Multiset(["~b", "b", "b"])
        assert repr(m) == "{b*2,~b}"
        assert m.to_list() == ["b", "b", "~b"]
        assert repr(Multiset()) == "{}"

    def test_canonical_order(self):
        items = [Multiset(["b"]), Multiset(["a", "b"]), Multiset(), Multiset(["a"])]
        assert sorted_multisets(items) == [Multiset(), Multiset(["a"]), Multiset(["b"]), Multiset(["a", "b"])]


class TestStructure:
    """Net construction checks"""

    def test_transition_needs_input(self):
        with pytest.raises(InvalidNetError):
            InhibitorNet(["p"], ["t"], [("t", "p")])

    def test_arc_between_places(self):
        with pytest.raises(InvalidNetError):
            InhibitorNet(["p", "q"], ["t"], [("p", "q"), ("p", "t")])

    def test_marking_on_unknown_place(self):
        with pytest.raises(InvalidNetError):
            InhibitorNet(["p"], ["t"], [("p", "t")], marking=["z"])

    def test_pre_post_inhib_sets(self, intro):
        assert intro.preset("b") == {"s2", "s3"}
        assert intro.postset("b") == {"s5"}
        assert intro.inhibset("b") == {"s1"}
        assert intro.inhibited_by("s1") == {"b"}
        assert intro.consumers("s3") == {"b", "c"}

    def test_unknown_node(self, intro):
        with pytest.raises(UnknownNameError):
            intro.preset("zz")


class TestFiring:
    """Step enabling and firing"""

    def test_firing_sequence(self, intro):
        m1 = fire(intro, intro.initial_marking, ["a"])
        assert m1 == Multiset(["s2", "s3", "s4"])
        assert fire(intro, m1, ["b"]) == Multiset(["s4", "s5"])
        assert fire(intro, Multiset(["s2", "s3", "s4"]), ["c"]) == Multiset(["s2", "s4", "s6"])

    def test_inhibitor_blocks(self, intro):
        assert not step_enabled(intro, intro.initial_marking, ["b"])
        assert explain_disabled(intro, intro.initial_marking, ["b"]) == ("inhibitor place marked", ["s1"])
        with pytest.raises(NotEnabledError) as excinfo:
            fire(intro, intro.initial_marking, ["b"])
        assert excinfo.value.clause == "inhibitor place marked"
        assert excinfo.value.places == ["s1"]

    def test_missing_tokens(self, intro):
        after = fire(intro, intro.initial_marking, ["c"])
        assert explain_disabled(intro, after, ["c"]) == ("missing tokens", ["s3"])

    def test_empty_step(self, intro):
        assert step_enabled(intro, intro.initial_marking, [])
        assert fire(intro, intro.initial_marking, []) == intro.initial_marking

    def test_concurrent_step(self, intro):
        assert fire(intro, intro.initial_marking, ["a", "c"]) == Multiset(["s2", "s4", "s6"])
        assert Multiset(["a", "c"]).support() in enabled_steps(intro, intro.initial_marking, 2)

    def test_step_filling_an_inhibitor_place(self):
        net = InhibitorNet(["p", "q", "r", "s"], ["t", "u"],
                           [("p", "t"), ("t", "r"), ("q", "u"), ("u", "s")], [("r", "u")], ["p", "q"])
        assert step_enabled(net, net.initial_marking, ["t"])
        assert step_enabled(net, net.initial_marking, ["u"])
        assert explain_disabled(net, net.initial_marking, ["t", "u"]) == \
            ("inhibitor place filled by the step", ["r"])

    def test_reverser_may_refill_its_own_inhibitor_place(self):
        net = load_net("concurrent_undo.net").net
        after = fire(net, net.initial_marking, ["b"])
        assert step_enabled(net, after, ["~b"])
        assert fire(net, after, ["~b"]) == net.initial_marking


class TestReachability:
    """Reachable markings, states and safety"""

    def test_intro_markings(self, intro):
        assert sorted_multisets(reachable_markings(intro)) == N1_MARKINGS

    def test_steps_interleave(self, intro):
        for name in ("inhibitor_intro.net", "precausal.net", "concurrent_undo.net", "shared_memory_read_guarded.net"):
            net = load_net(name).net
            assert reachable_markings(net, max_step_size=3) == reachable_markings(net)

    def test_intro_states(self, intro):
        found = sorted_multisets(states(intro))
        assert [s.to_list() for s in found] == [[], ["a"], ["c"], ["a", "b"], ["a", "c"]]
        assert explore_states(intro).exhaustive

    def test_reversible_states_bounded(self, caplog):
        net = load_net("concurrent_undo.net").net
        with caplog.at_level(logging.WARNING):
            exploration = explore_states(net)
        assert exploration.depth == default_depth(net) == 14
        assert "bounding state search" in caplog.text
        assert Multiset(["b", "b", "~b"]) in states(net, depth=3)

    def test_states_grow_with_depth(self):
        net = load_net("concurrent_undo.net").net
        assert states(net, 2) <= states(net, 3)

    def test_negative_depth(self, intro):
        with pytest.raises(ValueError):
            states(intro, -1)

    def test_safety(self, intro):
        assert is_safe(intro) == SafetyVerdict.SAFE
        doubled = InhibitorNet(["p", "q", "r"], ["t", "u"], [("p", "t"), ("t", "r"), ("q", "u"), ("u", "r")],
                               marking=["p", "q"])
        assert is_safe(doubled) == SafetyVerdict.UNSAFE
        with pytest.raises(UnsafeNetError):
            reachable_markings(doubled)

    def test_safety_bound(self):
        assert is_safe(loop_net(), bound=1) == SafetyVerdict.INCONCLUSIVE

    def test_acyclic(self, intro):
        assert is_acyclic(intro)
        assert not is_acyclic(loop_net())


class TestEquivalence:
    """State equivalence and isomorphism"""

    def test_net_equal_to_itself(self, intro):
        assert net_equiv(intro, intro) == EquivalenceVerdict.EQUAL

    def test_inhibitor_changes_states(self):
        plain = load_net("shared_memory_read_guarded.net").net
        unguarded = InhibitorNet(plain.places, plain.transitions, plain.flow,
                                 plain.inhibit - {("(x1,*)", "a0")}, plain.initial_marking)
        assert net_equiv(plain, unguarded) == EquivalenceVerdict.EQUAL
        after = fire(plain, fire(plain, plain.initial_marking, ["x0"]), ["x1"])
        assert not step_enabled(plain, after, ["a0"])
        assert step_enabled(unguarded, after, ["a0"])
        assert step_enabled(plain, after, ["a1"])

    def test_different_nets(self, intro):
        free = InhibitorNet(intro.places, intro.transitions, intro.flow, (), intro.initial_marking)
        assert net_equiv(intro, free) == EquivalenceVerdict.DIFFERENT
        assert distinguishing_states(intro, free) == [Multiset(["b"])]

    def test_bounded_equivalence_inconclusive(self):
        assert net_equiv(loop_net(), loop_net()) == EquivalenceVerdict.INCONCLUSIVE
        assert distinguishing_states(loop_net(), loop_net()) == []

    def test_isomorphism(self):
        small = load_net("small_causal.net").net
        renamed = InhibitorNet(
            ["x" + p[1:] for p in small.places], small.transitions,
            [(("x" + a[1:]) if a.startswith("s") else a, ("x" + b[1:]) if b.startswith("s") else b)
             for a, b in small.flow],
            [("x" + p[1:], t) for p, t in small.inhibit],
            ["x" + p[1:] for p in small.initial_marking])
        mapping = find_isomorphism(small, renamed)
        assert mapping is not None
        assert mapping["s2"] == "x2"
        assert find_isomorphism(small, load_net("inhibitor_intro.net").net) is None


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
