#!/usr/bin/env python3
"""
Test the translations between event structures and nets
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

import net_encodings
from errors import ClassMismatchError
from event_structure import configurations_ppes, configurations_rpes, equiv_rpes, hereditary_closure, is_pes
from fixture_library import load_net, load_structure
from inhibitor_net import EquivalenceVerdict, find_isomorphism, net_equiv
from net_classes import configurations_net, is_cn, is_occurrence_net, is_pcn, is_rcn, lessdot
from net_encodings import (
    CONVERSIONS, forward_pes, forward_structure, occurrence_event_structure, on_to_cn, pcn_to_on, pcn_to_ppes,
    ppes_to_pcn, rcn_to_rpes, rpes_to_rcn,
)

REVERSIBLE_FIXTURES = ["causal_undo.es", "concurrent_undo.es", "out_of_order_undo.es", "order_saga.es"]


class TestPrecausalEncoding:
    """pPES to pre-causal net and back"""

    def test_non_hereditary_encoding(self):
        structure = load_structure("non_hereditary.es")
        net = ppes_to_pcn(structure)
        assert net == load_net("precausal.net").net
        assert is_pcn(net).member
        assert pcn_to_ppes(net) == structure

    def test_pes_encoding_is_causal(self):
        structure = hereditary_closure(load_structure("non_hereditary.es"))
        net = ppes_to_pcn(structure)
        assert net == load_net("causal.net").net
        assert is_cn(net).member
        assert is_pes(pcn_to_ppes(net))

    def test_inhibitors_follow_transitive_causality(self):
        structure = load_structure("shared_memory_read.es")
        net = ppes_to_pcn(structure)
        assert ("(*,x0)", "a1") in net.inhibit
        assert lessdot(net).pairs() == structure.transitive_causality.pairs()

    def test_configurations_preserved(self):
        for name in ("non_hereditary.es", "shared_memory_read.es"):
            structure = load_structure(name)
            assert configurations_net(ppes_to_pcn(structure), "pcn") == configurations_ppes(structure)

    def test_causal_net_to_pes(self):
        structure = pcn_to_ppes(load_net("small_causal.net").net)
        assert structure.causality_pairs() == [("b", "c")]
        assert structure.conflict_pairs() == [("a", "c")]


class TestReversibleEncoding:
    """rPES to reversible causal net and back"""

    def test_causal_undo_encoding(self):
        net, partition = rpes_to_rcn(load_structure("causal_undo.es"))
        assert net == load_net("causal_undo_rcn.net").net
        assert sorted(partition.backward) == ["~b", "~c"]
        assert partition.reverses == {"~b": "b", "~c": "c"}
        assert is_rcn(net, partition).member

    def test_reading_back_the_simple_rcn(self):
        parsed = load_net("concurrent_undo.net")
        assert rcn_to_rpes(parsed.net, parsed.partition()) == load_structure("concurrent_undo.es")
        assert rcn_to_rpes(parsed.net) == load_structure("concurrent_undo.es")

    @pytest.mark.parametrize("name", ["causal_undo.es", "concurrent_undo.es", "out_of_order_undo.es"])
    def test_round_trip_is_identity(self, name):
        structure = load_structure(name)
        assert rcn_to_rpes(*rpes_to_rcn(structure)) == structure

    @pytest.mark.parametrize("name", REVERSIBLE_FIXTURES)
    def test_configurations_preserved(self, name):
        structure = load_structure(name)
        net, partition = rpes_to_rcn(structure)
        assert configurations_net(net, "rcn", partition) == configurations_rpes(structure)
        assert equiv_rpes(rcn_to_rpes(net, partition), structure)

    def test_out_of_order_configuration_in_net(self):
        net, partition = rpes_to_rcn(load_structure("out_of_order_undo.es"))
        assert {"a", "c"} in configurations_net(net, "rcn", partition)


class TestOccurrenceEncoding:
    """Occurrence nets and causal nets"""

    def test_occurrence_to_causal(self):
        occurrence = load_net("occurrence.net").net
        causal = on_to_cn(occurrence)
        assert is_cn(causal).member
        assert net_equiv(occurrence, causal) == EquivalenceVerdict.EQUAL
        structure = occurrence_event_structure(occurrence)
        assert structure.causality_pairs() == [("b", "c")]
        assert structure.conflict_pairs() == [("a", "b"), ("a", "c")]

    def test_immediate_causality_flag(self, monkeypatch):
        monkeypatch.setattr(net_encodings, "ON_TO_CN_TRANSITIVE_CAUSALITY", False)
        occurrence = load_net("occurrence.net").net
        assert net_equiv(occurrence, on_to_cn(occurrence)) == EquivalenceVerdict.EQUAL

    def test_causal_to_occurrence(self):
        causal = load_net("small_causal.net").net
        occurrence = pcn_to_on(causal)
        assert is_occurrence_net(occurrence).member
        assert "(b,c)" in occurrence.places
        assert not occurrence.inhibit
        assert net_equiv(causal, occurrence) == EquivalenceVerdict.EQUAL

    def test_round_trip_up_to_isomorphism(self):
        causal = load_net("small_causal.net").net
        assert find_isomorphism(causal, on_to_cn(pcn_to_on(causal))) is not None

    @pytest.mark.parametrize("name", ["shared_memory_read.es", "non_hereditary.es"])
    def test_pes_round_trip_is_exact(self, name):
        net = ppes_to_pcn(hereditary_closure(load_structure(name)))
        assert on_to_cn(pcn_to_on(net)) == net

    def test_pes_configurations_in_occurrence_net(self):
        structure = load_structure("shared_memory_read.es")
        occurrence = pcn_to_on(ppes_to_pcn(structure))
        assert configurations_net(occurrence, "on") == configurations_ppes(structure)


def test_conversion_table():
    assert CONVERSIONS[("pes", "cn")] is ppes_to_pcn
    assert CONVERSIONS[("rcn", "rpes")] is rcn_to_rpes
    assert {dst for src, dst in CONVERSIONS if src == "pcn"} == {"ppes", "on"}
    assert {dst for src, dst in CONVERSIONS if src == "rpes"} == {"rcn", "ppes", "pes"}


def test_forward_part():
    causal_undo = load_structure("causal_undo.es")
    assert forward_structure(causal_undo) is causal_undo.core
    assert is_pes(forward_pes(causal_undo))
    out_of_order = load_structure("out_of_order_undo.es")
    assert forward_structure(out_of_order).conflict_pairs() == [("a", "b")]
    with pytest.raises(ClassMismatchError, match="not a pes"):
        forward_pes(out_of_order)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
