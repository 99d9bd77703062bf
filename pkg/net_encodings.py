"""
Encodings Module
Translations between event structures and nets in both directions
"""

from typing import Iterable, List, Optional, Set, Tuple
import logging

from errors import ClassMismatchError
from event_structure import EventStructureCore, ReversiblePes
from inhibitor_net import InhibitorNet
from naming import conflict_place, dependency_place, post_place, pre_place, reverser_name
from net_classes import (
    BackwardPartition, direct_conflict, infer_backward_partition, lessdot, occurrence_causality,
    occurrence_conflict,
)

logger = logging.getLogger(__name__)

# Inhibitors of on_to_cn follow the transitive causal order of the occurrence net
# when True, and only its immediate (one-condition) dependencies when False.
ON_TO_CN_TRANSITIVE_CAUSALITY = True


def _causal_net(events: Iterable[str], causality: Iterable[Tuple[str, str]],
                conflict: Iterable[Tuple[str, str]]) -> InhibitorNet:
    """Net with a not-yet and a done place per event, a shared place per conflict and
    an inhibitor arc from the not-yet place of every listed cause"""
    events = sorted(set(events))
    places: List[str] = []
    flow: Set[Tuple[str, str]] = set()
    marking: List[str] = []
    for event in events:
        places += [pre_place(event), post_place(event)]
        flow |= {(pre_place(event), event), (event, post_place(event))}
        marking.append(pre_place(event))
    for first, second in sorted({tuple(sorted(pair)) for pair in conflict}):
        place = conflict_place(first, second)
        places.append(place)
        flow |= {(place, first), (place, second)}
        marking.append(place)
    inhibit = {(pre_place(cause), effect) for cause, effect in causality if cause != effect}
    return InhibitorNet(places, events, flow, inhibit, marking)


def ppes_to_pcn(structure: EventStructureCore) -> InhibitorNet:
    """
    Encode a pPES as a pre-causal net

    Every event e gets places (*,e) and (e,*), each conflict a shared place
    ({e,e'},#), and each cause e' of e an inhibitor arc from (*,e') to e.
    """
    net = _causal_net(structure.events, structure.transitive_causality.pairs(), structure.conflict)
    logger.info(f"pPES -> pCN: {len(net.places)} places, {len(net.transitions)} transitions")
    return net


def pcn_to_ppes(net: InhibitorNet) -> EventStructureCore:
    """Read a pPES off a pre-causal net: inhibitor-induced causality and shared-input conflict"""
    causality = [(a, b) for a, b in lessdot(net).pairs() if a != b]
    return EventStructureCore(net.transitions, causality, direct_conflict(net).unordered_pairs())


def rpes_to_rcn(structure: ReversiblePes) -> Tuple[InhibitorNet, BackwardPartition]:
    """
    Encode a reversible PES as a reversible causal net

    The forward part is the pPES encoding. Each undoable u adds ~u, which swaps
    u's pre- and postset and is inhibited by (*,e) for every e needed to undo u
    and by (e,*) for every e that prevents it.

    Returns:
        The net and its forward/backward partition
    """
    base = ppes_to_pcn(structure.forward_core())
    flow = set(base.flow)
    inhibit = set(base.inhibit)
    reverses = {}
    for undoable in sorted(structure.undoable):
        reverser = reverser_name(undoable)
        reverses[reverser] = undoable
        flow |= {(place, reverser) for place in base.postset(undoable)}
        flow |= {(reverser, place) for place in base.preset(undoable)}
        inhibit |= {(pre_place(e), reverser) for e in structure.reverse_causes(undoable)}
        inhibit |= {(post_place(e), reverser) for e in structure.preventers(undoable)}
    net = InhibitorNet(base.places, list(base.transitions) + list(reverses), flow, inhibit, base.initial_marking)
    partition = BackwardPartition(structure.events, reverses.keys(), reverses)
    logger.info(f"rPES -> rCN: {len(reverses)} reversing transitions")
    return net, partition


def rcn_to_rpes(net: InhibitorNet, partition: Optional[BackwardPartition] = None) -> ReversiblePes:
    """
    Read a reversible PES off a reversible causal net

    Forward transitions become events; a transition is undoable when some
    backward transition reverses it. Input places of e that inhibit the reverser
    of u make e a reverse cause of u; output places of e that inhibit it make e
    a preventer.
    """
    if partition is None:
        partition = infer_backward_partition(net)
    causality = [(a, b) for a, b in lessdot(net, partition).pairs() if a != b]
    core = EventStructureCore(partition.forward, causality, direct_conflict(net, partition).unordered_pairs())
    rev_causality, prevention = set(), set()
    for reverser, undoable in partition.reverses.items():
        guards = net.inhibset(reverser)
        for event in partition.forward:
            if net.preset(event) & guards:
                rev_causality.add((event, undoable))
            if net.postset(event) & guards:
                prevention.add((event, undoable))
    return ReversiblePes(core, partition.reverses.values(), rev_causality, prevention)


def occurrence_event_structure(net: InhibitorNet) -> EventStructureCore:
    """Events of an occurrence net with their causal order and conflict"""
    if ON_TO_CN_TRANSITIVE_CAUSALITY:
        causality = occurrence_causality(net).pairs()
    else:
        causality = sorted({(producer, consumer) for place in net.places
                            for producer in net.producers(place) for consumer in net.consumers(place)})
    return EventStructureCore(net.transitions, causality, occurrence_conflict(net).unordered_pairs())


def on_to_cn(net: InhibitorNet) -> InhibitorNet:
    """Encode an occurrence net as a conflict-saturated causal net"""
    structure = occurrence_event_structure(net)
    return _causal_net(structure.events, structure.causality, structure.conflict)


def pcn_to_on(net: InhibitorNet) -> InhibitorNet:
    """
    Turn a pre-causal net into an occurrence net

    Each inhibitor-induced dependency t before t' becomes a condition (t,t')
    produced by t and consumed by t'; inhibitor arcs are dropped.
    """
    places = list(net.places)
    flow = set(net.flow)
    for cause, effect in lessdot(net).pairs():
        if cause == effect:
            continue
        place = dependency_place(cause, effect)
        places.append(place)
        flow |= {(cause, place), (place, effect)}
    return InhibitorNet(places, net.transitions, flow, (), net.initial_marking)


def forward_structure(structure: ReversiblePes) -> EventStructureCore:
    """Drop reversal, keeping the underlying pPES"""
    return structure.forward_core()


def forward_pes(structure: ReversiblePes) -> EventStructureCore:
    """
    Drop reversal from a structure whose forward part is a PES

    Raises:
        ClassMismatchError: If conflict is not inherited along causality in the forward part
    """
    if not structure.underlying_is_pes():
        raise ClassMismatchError("The forward part is not a pes: conflict is not inherited along causality")
    return structure.forward_core()


CONVERSIONS = {
    ("ppes", "pcn"): ppes_to_pcn,
    ("pes", "cn"): ppes_to_pcn,
    ("pcn", "ppes"): pcn_to_ppes,
    ("cn", "pes"): pcn_to_ppes,
    ("rpes", "rcn"): rpes_to_rcn,
    ("rcn", "rpes"): rcn_to_rpes,
    ("rpes", "ppes"): forward_structure,
    ("rpes", "pes"): forward_pes,
    ("on", "cn"): on_to_cn,
    ("pcn", "on"): pcn_to_on,
    ("cn", "on"): pcn_to_on,
}
