"""
Net Classes Module
Occurrence nets, pre-causal and causal nets, reversible causal nets: their
derived relations, recognizers and configuration semantics
"""

from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple
import logging

import numpy as np

from errors import AmbiguousPartitionError, ClassMismatchError, NotAConfigurationError, UnknownNameError
from event_structure import ConfigurationSet
from inhibitor_net import (
    InhibitorNet, Marking, Multiset, SafetyVerdict, flow_relation, is_acyclic, is_safe, reachable_markings,
)
from naming import conflict_place
from relation_matrix import RelationMatrix
from reports import NetClassReport

logger = logging.getLogger(__name__)

NET_CLASSES = ("ipt", "pcn", "cn", "on", "rcn")


class BackwardPartition:
    """
    Split of the transitions into forward and backward ones

    reverses maps each backward transition to the forward transition it undoes.
    """

    def __init__(self, forward: Iterable[str], backward: Iterable[str] = (),
                 reverses: Optional[Mapping[str, str]] = None):
        self.forward: FrozenSet[str] = frozenset(forward)
        self.backward: FrozenSet[str] = frozenset(backward)
        self.reverses: Dict[str, str] = dict(sorted((reverses or {}).items()))
        if self.forward & self.backward:
            raise ValueError(f"Transitions both forward and backward: {sorted(self.forward & self.backward)}")

    @classmethod
    def forward_only(cls, net: InhibitorNet) -> "BackwardPartition":
        return cls(net.transitions)

    @classmethod
    def from_backward(cls, net: InhibitorNet, backward: Iterable[str]) -> "BackwardPartition":
        """
        Build a partition from declared backward transitions, pairing each with
        the forward transition whose pre- and postset it swaps

        Raises:
            UnknownNameError: If a declared name is not a transition
            AmbiguousPartitionError: If a backward transition inverts several forward ones
        """
        declared = set(backward)
        unknown = sorted(declared - set(net.transitions))
        if unknown:
            raise UnknownNameError(f"Backward transitions not in the net: {unknown}")
        forward = [t for t in net.transitions if t not in declared]
        reverses: Dict[str, str] = {}
        for reverser in sorted(declared):
            matches = [t for t in forward if _inverts(net, reverser, t)]
            if len(matches) > 1:
                raise AmbiguousPartitionError(f"{reverser} inverts several transitions: {matches}",
                                              {reverser: matches})
            if matches:
                reverses[reverser] = matches[0]
        return cls(forward, declared, reverses)

    def reverser_of(self, transition: str) -> Optional[str]:
        for reverser, target in self.reverses.items():
            if target == transition:
                return reverser
        return None

    def covers(self, net: InhibitorNet) -> bool:
        return (self.forward | self.backward) == set(net.transitions)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BackwardPartition):
            return NotImplemented
        return (self.forward, self.backward, self.reverses) == (other.forward, other.backward, other.reverses)

    def __repr__(self) -> str:
        return f"BackwardPartition(backward={sorted(self.backward)}, reverses={self.reverses})"


def _inverts(net: InhibitorNet, reverser: str, transition: str) -> bool:
    return (net.preset(reverser) == net.postset(transition)
            and net.postset(reverser) == net.preset(transition))


def _partition(net: InhibitorNet, partition: Optional[BackwardPartition]) -> BackwardPartition:
    return partition if partition is not None else BackwardPartition.forward_only(net)


def lessdot(net: InhibitorNet, partition: Optional[BackwardPartition] = None) -> RelationMatrix:
    """
    t before t' whenever a preset place of t inhibits t', over forward transitions

    Reflexive pairs are kept so that recognizers can report them.
    """
    forward = sorted(_partition(net, partition).forward)
    relation = RelationMatrix(forward)
    for cause in forward:
        for effect in forward:
            if net.preset(cause) & net.inhibset(effect):
                relation.matrix[relation.index(cause), relation.index(effect)] = True
    return relation


def direct_conflict(net: InhibitorNet, partition: Optional[BackwardPartition] = None) -> RelationMatrix:
    """Distinct forward transitions sharing a preset place"""
    forward = sorted(_partition(net, partition).forward)
    relation = RelationMatrix(forward)
    for first, second in combinations(forward, 2):
        if net.preset(first) & net.preset(second):
            i, j = relation.index(first), relation.index(second)
            relation.matrix[i, j] = relation.matrix[j, i] = True
    return relation


def sustained(net: InhibitorNet, partition: BackwardPartition) -> RelationMatrix:
    """
    Causality kept through reversal

    Starts from the transitive closure of lessdot over the forward transitions,
    then drops each pair t, t' where t has a reverser and no output place of t'
    inhibits that reverser. The result need not be transitive; is_rcn checks it.
    """
    relation = lessdot(net, partition).transitive_closure()
    for cause in relation.carrier:
        reverser = partition.reverser_of(cause)
        if reverser is None:
            continue
        guards = net.inhibset(reverser)
        for effect in relation.carrier:
            i, j = relation.index(cause), relation.index(effect)
            if relation.matrix[i, j] and not (net.postset(effect) & guards):
                relation.matrix[i, j] = False
    return relation


class CausalRelations:
    """The three relations that a causal net induces on its forward transitions"""

    def __init__(self, net: InhibitorNet, partition: Optional[BackwardPartition] = None):
        partition = _partition(net, partition)
        self.lessdot = lessdot(net, partition)
        self.direct_conflict = direct_conflict(net, partition)
        self.sustained = sustained(net, partition)

    def __repr__(self) -> str:
        return (f"CausalRelations(lessdot={self.lessdot.pairs()}, "
                f"direct_conflict={self.direct_conflict.unordered_pairs()}, sustained={self.sustained.pairs()})")


def occurrence_causality(net: InhibitorNet) -> RelationMatrix:
    """Strict causal order between transitions induced by the flow"""
    closure = flow_relation(net).transitive_closure()
    return closure.restrict(net.transitions)


def occurrence_conflict(net: InhibitorNet) -> RelationMatrix:
    """
    Conflict of an occurrence net: transitions sharing a pre-condition, inherited along causality
    """
    transitions = list(net.transitions)
    initial = RelationMatrix(transitions)
    for first, second in combinations(transitions, 2):
        if net.preset(first) & net.preset(second):
            i, j = initial.index(first), initial.index(second)
            initial.matrix[i, j] = initial.matrix[j, i] = True
    order = occurrence_causality(net).aligned(transitions) | np.eye(len(transitions), dtype=bool)
    below = order.T.astype(np.int64) @ initial.matrix.astype(np.int64) @ order.astype(np.int64)
    return RelationMatrix(transitions, below > 0)


def is_occurrence_net(net: InhibitorNet) -> NetClassReport:
    """
    Recognize occurrence nets: acyclic, safe, no inhibitor arcs, conditions with at
    most one producer, the initial marking being exactly the unproduced conditions,
    and irreflexive conflict
    """
    report = NetClassReport(net_class="on")
    arcs = sorted(net.inhibit)
    if not report.check("no-inhibitors", not arcs, list(arcs[0]) if arcs else []):
        return report
    report.check("acyclic", is_acyclic(net))
    report.check("safe", is_safe(net) == SafetyVerdict.SAFE)

    shared = [place for place in net.places if len(net.producers(place)) > 1]
    report.check("single-producer", not shared, shared[:1])

    roots = {place for place in net.places if not net.producers(place)}
    marked = set(net.initial_marking.support())
    mismatch = sorted(roots ^ marked)
    report.check("initial-unproduced", not mismatch and net.initial_marking.is_set(), mismatch[:1],
                 "the initial marking must be exactly the conditions without producers")

    closure = flow_relation(net).transitive_closure()
    ungrounded = [node for node in net.places + net.transitions
                  if node not in roots and not (closure.predecessors(node) & roots)]
    report.check("grounded", not ungrounded, ungrounded[:1])
    report.check("finite-past", True, detail="finite nets have finite causal pasts")

    conflict = occurrence_conflict(net)
    reflexive = conflict.reflexive_elements()
    report.check("conflict-irreflexive", not reflexive, reflexive[:1])
    return report


def is_pcn(net: InhibitorNet, partition: Optional[BackwardPartition] = None,
           disabled_clauses: Sequence[str] = ()) -> NetClassReport:
    """
    Recognize pre-causal nets

    Args:
        net: Net to check; when a partition is given only its forward part is checked
        partition: Optional forward/backward split
        disabled_clauses: Clause names to skip

    Returns:
        Ordered clause report; membership iff all checked clauses pass
    """
    if partition is not None and partition.backward:
        net = net.restrict_transitions(partition.forward)
    report = NetClassReport(net_class="pcn")
    skip = set(disabled_clauses)
    forward = list(net.transitions)

    def check(clause: str, passed: bool, witness: Optional[List[str]] = None, detail: str = "") -> None:
        if clause not in skip:
            report.check(clause, passed, witness, detail)

    check("safe", is_safe(net) == SafetyVerdict.SAFE)

    bad_inputs = [place for t in forward for place in sorted(net.preset(t))
                  if net.initial_marking[place] != 1 or net.producers(place)]
    check("initial-preset", not bad_inputs, bad_inputs[:1],
          "input places are initially marked and never produced")

    bad_outputs = []
    for t in forward:
        post = net.postset(t)
        if len(post) != 1:
            bad_outputs.append(t)
            continue
        place = next(iter(post))
        if net.initial_marking[place] or net.consumers(place):
            bad_outputs.append(t)
    check("single-postcondition", not bad_outputs, bad_outputs[:1],
          "each transition produces one initially empty, unconsumed place")

    private = {t: {s for s in net.preset(t) if net.consumers(s) == {t}} for t in forward}
    unprivate = [t for t in forward if not private[t]]
    check("private-place", not unprivate, unprivate[:1],
          "each transition consumes some place no other transition consumes")

    stray_sources = sorted(place for place, target in net.inhibit
                           if not any(place in private[t] for t in forward if t != target))
    check("inhibitor-source", not stray_sources, stray_sources[:1],
          "inhibitor places are private input places of another transition")

    order = lessdot(net)
    closure = order.transitive_closure()
    cyclic = closure.reflexive_elements()
    check("lessdot-order", not cyclic, cyclic[:1], "the inhibitor-induced order is acyclic")

    conflict = direct_conflict(net)
    incompatible: List[str] = []
    for t in forward:
        causes = closure.predecessors(t) - {t}
        clash = conflict.is_related_within(causes)
        if clash is not None:
            incompatible = [t, *clash]
            break
        rival = sorted(c for c in causes if net.preset(c) & net.preset(t))
        if rival:
            incompatible = [t, rival[0]]
            break
    check("causes-compatible", not incompatible, incompatible,
          "causes are pairwise compatible and share no input with their effect")
    return report


def conflict_inheritance_gaps(net: InhibitorNet, partition: Optional[BackwardPartition] = None,
                              along: Optional[RelationMatrix] = None) -> List[Tuple[str, str]]:
    """Pairs t, t'' with t in direct conflict with a cause t' of t'' but not with t''"""
    conflict = direct_conflict(net, partition)
    order = along if along is not None else lessdot(net, partition)
    inherited = conflict.compose(order).difference(conflict)
    return [(a, b) for a, b in inherited.pairs() if a != b]


def is_cn(net: InhibitorNet, partition: Optional[BackwardPartition] = None) -> NetClassReport:
    """Pre-causal nets whose direct conflicts are inherited along the causal order"""
    report = NetClassReport(net_class="cn")
    report.extend(is_pcn(net, partition))
    gaps = conflict_inheritance_gaps(net, partition)
    report.check("conflict-saturated", not gaps, list(gaps[0]) if gaps else [])
    return report


def _saturated_conflict(net: InhibitorNet) -> RelationMatrix:
    closed = direct_conflict(net)
    order = lessdot(net)
    while True:
        grown = closed.union(closed.compose(order)).symmetric()
        if grown == closed:
            return closed
        closed = grown


def saturate(net: InhibitorNet) -> InhibitorNet:
    """
    Make every inherited conflict direct by adding a marked place shared by the two transitions

    Raises:
        ClassMismatchError: If the net is not a pre-causal net
    """
    report = is_pcn(net)
    if not report.member:
        raise ClassMismatchError(f"Saturation needs a pcn: {report.summary()}")
    existing = direct_conflict(net)
    places, flow, marking = list(net.places), set(net.flow), net.initial_marking
    added = []
    for first, second in _saturated_conflict(net).unordered_pairs():
        if first == second or existing.contains(first, second):
            continue
        place = conflict_place(first, second)
        if place in places or place in net.transitions:
            raise ValueError(f"Cannot add conflict place '{place}': name already used")
        places.append(place)
        flow |= {(place, first), (place, second)}
        marking = marking + Multiset([place])
        added.append(place)
    logger.info(f"Saturation added {len(added)} conflict places")
    return InhibitorNet(places, net.transitions, flow, net.inhibit, marking)


def infer_backward_partition(net: InhibitorNet) -> BackwardPartition:
    """
    Identify reversing transitions

    A transition y reverses x when it swaps x's pre- and postset and some place
    consumed only by x inhibits y.

    Raises:
        AmbiguousPartitionError: If a transition has several candidate partners
            or two transitions reverse each other
    """
    candidates: Dict[str, List[str]] = {}
    for reverser in net.transitions:
        for target in net.transitions:
            if reverser == target or not _inverts(net, reverser, target):
                continue
            exclusive = {s for s in net.preset(target) if net.consumers(s) == {target}}
            if exclusive & net.inhibset(reverser):
                candidates.setdefault(reverser, []).append(target)

    ambiguous = {r: targets for r, targets in candidates.items() if len(targets) > 1}
    reversed_twice: Dict[str, List[str]] = {}
    for reverser, targets in candidates.items():
        for target in targets:
            reversed_twice.setdefault(target, []).append(reverser)
    ambiguous.update({t: rs for t, rs in reversed_twice.items() if len(rs) > 1})
    mutual = sorted(r for r, targets in candidates.items() if any(r in candidates.get(t, []) for t in targets))
    if mutual:
        ambiguous.update({r: candidates[r] for r in mutual})
    if ambiguous:
        raise AmbiguousPartitionError(f"Ambiguous reversing transitions: {ambiguous}", ambiguous)

    reverses = {reverser: targets[0] for reverser, targets in candidates.items()}
    backward = set(reverses)
    logger.info(f"Inferred backward transitions: {sorted(backward)}")
    return BackwardPartition([t for t in net.transitions if t not in backward], backward, reverses)


def is_rcn(net: InhibitorNet, partition: Optional[BackwardPartition] = None) -> NetClassReport:
    """
    Recognize reversible causal nets under a forward/backward partition

    Args:
        net: Net to check
        partition: The split; inferred when omitted

    Returns:
        Ordered clause report
    """
    report = NetClassReport(net_class="rcn")
    if partition is None:
        partition = infer_backward_partition(net)
    if not report.check("partition-covers-transitions", partition.covers(net),
                        sorted(set(net.transitions) ^ (partition.forward | partition.backward))):
        return report

    forward_report = is_pcn(net, partition)
    failure = forward_report.first_failure
    report.check("forward-pcn", failure is None,
                 failure.witness if failure else [], failure.clause if failure else "")

    unmatched = sorted(r for r in partition.backward
                       if r not in partition.reverses or not _inverts(net, r, partition.reverses[r]))
    targets = list(partition.reverses.values())
    repeated = sorted({t for t in targets if targets.count(t) > 1})
    report.check("reverser-inverts-forward", not unmatched and not repeated, (unmatched + repeated)[:1],
                 "each backward transition swaps the pre- and postset of exactly one forward transition")

    unguarded = []
    for reverser, target in partition.reverses.items():
        exclusive = {s for s in net.preset(target) if net.consumers(s) == {target}}
        if not exclusive & net.inhibset(reverser):
            unguarded.append(reverser)
    report.check("reverser-guarded", not unguarded, unguarded[:1],
                 "a private input place of the reversed transition inhibits the reverser")

    forward = sorted(partition.forward)
    overlapping: List[str] = []
    blocked: List[str] = []
    for reverser in sorted(partition.backward):
        guards = net.inhibset(reverser)
        required = [t for t in forward if net.preset(t) & guards]
        for first, second in combinations(required, 2):
            if net.preset(first) & net.preset(second):
                overlapping = overlapping or [reverser, first, second]
        for t in required:
            if net.postset(t) & guards:
                blocked = blocked or [reverser, t]
    report.check("reverse-causes-compatible", not overlapping, overlapping)
    report.check("reverse-causes-not-prevented", not blocked, blocked)

    order = sustained(net, partition)
    gap = order.transitivity_witness()
    report.check("sustained-transitive", gap is None, list(gap) if gap else [])

    gaps = conflict_inheritance_gaps(net, partition, along=order)
    report.check("conflict-hereditary-sustained", not gaps, list(gaps[0]) if gaps else [])
    return report


def recognize(net: InhibitorNet, net_class: str, partition: Optional[BackwardPartition] = None) -> NetClassReport:
    """Run the recognizer for a class name"""
    if net_class == "pcn":
        return is_pcn(net)
    if net_class == "cn":
        return is_cn(net)
    if net_class == "on":
        return is_occurrence_net(net)
    if net_class == "rcn":
        return is_rcn(net, partition)
    if net_class == "ipt":
        report = NetClassReport(net_class="ipt")
        report.check("safe", is_safe(net) == SafetyVerdict.SAFE)
        return report
    raise ValueError(f"Unknown net class '{net_class}'; expected one of {NET_CLASSES}")


def _require_class(net: InhibitorNet, net_class: str, partition: Optional[BackwardPartition]) -> BackwardPartition:
    if net_class not in ("pcn", "cn", "on", "rcn"):
        raise ClassMismatchError(f"Configurations are not defined for class '{net_class}'")
    if net_class == "rcn" and partition is None:
        partition = infer_backward_partition(net)
    report = recognize(net, net_class, partition)
    if not report.member:
        raise ClassMismatchError(report.summary())
    return _partition(net, partition)


def occurrence_configurations(net: InhibitorNet) -> ConfigurationSet:
    """Conflict-free sets of transitions that contain all their causes"""
    causality = occurrence_causality(net)
    conflict = occurrence_conflict(net)
    found = []
    for size in range(len(net.transitions) + 1):
        for candidate in combinations(net.transitions, size):
            members = set(candidate)
            if conflict.is_related_within(members) is not None:
                continue
            if all(causality.predecessors(t) <= members for t in members):
                found.append(members)
    return ConfigurationSet(found)


def marking_projection(net: InhibitorNet, marking: Marking, partition: BackwardPartition) -> FrozenSet[str]:
    """Forward transitions that produced some currently marked place"""
    producers: Set[str] = set()
    for place in marking.support():
        producers |= net.producers(place)
    return frozenset(producers & partition.forward)


def configurations_net(net: InhibitorNet, net_class: str,
                       partition: Optional[BackwardPartition] = None) -> ConfigurationSet:
    """
    Configurations of a net of the given class

    Causal classes project each reachable marking onto the forward transitions
    that produced its marked places; occurrence nets use conflict-free,
    causally closed sets of transitions.

    Raises:
        ClassMismatchError: If the net does not belong to the class
    """
    partition = _require_class(net, net_class, partition)
    if net_class == "on":
        return occurrence_configurations(net)
    projected = {marking_projection(net, m, partition) for m in reachable_markings(net)}
    logger.info(f"{net_class} configurations: {len(projected)} from reachable markings")
    return ConfigurationSet(projected)


def marking_of_configuration(net: InhibitorNet, configuration: Iterable[str], net_class: str = "pcn",
                             partition: Optional[BackwardPartition] = None) -> Marking:
    """
    Marking reached by executing a configuration: initial places and produced
    places, minus consumed places

    Raises:
        NotAConfigurationError: If the set is not a configuration of the net
    """
    members = frozenset(configuration)
    if members not in configurations_net(net, net_class, partition):
        raise NotAConfigurationError(f"{{{','.join(sorted(members))}}} is not a configuration")
    produced: Set[str] = set()
    consumed: Set[str] = set()
    for transition in members:
        produced |= net.postset(transition)
        consumed |= net.preset(transition)
    return Multiset((set(net.initial_marking.support()) | produced) - consumed)
