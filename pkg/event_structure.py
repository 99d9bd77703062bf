"""
Event Structure Module
Prime event structures (with and without hereditary conflict) and their
reversible extension: axioms, enabling, steps and configuration sets
"""

from collections import deque
from itertools import combinations
from typing import FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple
import logging

from errors import NotEnabledError, UnknownNameError
from naming import reverser_name
from relation_matrix import RelationMatrix
from reports import ValidationReport

logger = logging.getLogger(__name__)

EventSet = FrozenSet[str]


def _pair_key(pair: Tuple[str, str]) -> Tuple[str, str]:
    return tuple(sorted(pair))


class EventStructureCore:
    """
    Finite set of events with causality (<) and conflict (#)

    Causality pairs (e1, e2) mean e1 < e2. Conflict is unordered and stored once
    per pair; querying either orientation gives the same answer.
    """

    def __init__(self, events: Iterable[str], causality: Iterable[Tuple[str, str]] = (),
                 conflict: Iterable[Tuple[str, str]] = ()):
        self.events: Tuple[str, ...] = tuple(sorted(set(events)))
        self.causality: FrozenSet[Tuple[str, str]] = frozenset(tuple(pair) for pair in causality)
        self.conflict: FrozenSet[Tuple[str, str]] = frozenset(_pair_key(pair) for pair in conflict)
        known = set(self.events)
        for left, right in list(self.causality) + list(self.conflict):
            for name in (left, right):
                if name not in known:
                    raise UnknownNameError(f"Undeclared event '{name}'")
        self._causality_matrix = RelationMatrix.from_pairs(self.events, self.causality)
        self._conflict_matrix = RelationMatrix.from_pairs(self.events, self.conflict, symmetric=True)
        self._transitive: Optional[RelationMatrix] = None

    @property
    def causality_matrix(self) -> RelationMatrix:
        return self._causality_matrix

    @property
    def conflict_matrix(self) -> RelationMatrix:
        return self._conflict_matrix

    @property
    def transitive_causality(self) -> RelationMatrix:
        if self._transitive is None:
            self._transitive = self._causality_matrix.transitive_closure()
        return self._transitive

    def in_conflict(self, first: str, second: str) -> bool:
        return self._conflict_matrix.contains(first, second)

    def causes(self, event: str) -> Set[str]:
        """Strict causes of `event` under the transitive reading of <"""
        return self.transitive_causality.predecessors(event)

    def conflict_pairs(self) -> List[Tuple[str, str]]:
        return sorted(self.conflict)

    def causality_pairs(self) -> List[Tuple[str, str]]:
        return sorted(self.causality)

    def check_names(self, names: Iterable[str]) -> None:
        known = set(self.events)
        for name in names:
            if name not in known:
                raise UnknownNameError(f"Unknown event '{name}'")

    def with_conflict(self, conflict: Iterable[Tuple[str, str]]) -> "EventStructureCore":
        return EventStructureCore(self.events, self.causality, conflict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventStructureCore):
            return NotImplemented
        return (self.events, self.causality, self.conflict) == (other.events, other.causality, other.conflict)

    def __hash__(self) -> int:
        return hash((self.events, self.causality, self.conflict))

    def __repr__(self) -> str:
        return (f"EventStructureCore(events={list(self.events)}, causality={self.causality_pairs()}, "
                f"conflict={self.conflict_pairs()})")


class ReversiblePes:
    """
    Prime event structure extended with undoable events, reverse causality and prevention

    Pairs (e, u) in rev_causality mean e must be present to undo u; pairs (e, u) in
    prevention mean e must be absent to undo u. The undo of u is named ~u and is
    never an event of the structure.
    """

    def __init__(self, core: EventStructureCore, undoable: Iterable[str] = (),
                 rev_causality: Iterable[Tuple[str, str]] = (),
                 prevention: Iterable[Tuple[str, str]] = ()):
        self.core = core
        self.undoable: FrozenSet[str] = frozenset(undoable)
        self.rev_causality: FrozenSet[Tuple[str, str]] = frozenset(tuple(pair) for pair in rev_causality)
        self.prevention: FrozenSet[Tuple[str, str]] = frozenset(tuple(pair) for pair in prevention)
        core.check_names(self.undoable)
        for pair in list(self.rev_causality) + list(self.prevention):
            core.check_names(pair)

    @property
    def events(self) -> Tuple[str, ...]:
        return self.core.events

    def reverse_causes(self, undoable: str) -> Set[str]:
        return {e for e, u in self.rev_causality if u == undoable}

    def preventers(self, undoable: str) -> Set[str]:
        return {e for e, u in self.prevention if u == undoable}

    def reversers(self) -> List[str]:
        return [reverser_name(u) for u in sorted(self.undoable)]

    def forward_core(self) -> EventStructureCore:
        return self.core

    def underlying_is_pes(self) -> bool:
        return is_pes(self.core)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReversiblePes):
            return NotImplemented
        return (self.core, self.undoable, self.rev_causality, self.prevention) == \
            (other.core, other.undoable, other.rev_causality, other.prevention)

    def __hash__(self) -> int:
        return hash((self.core, self.undoable, self.rev_causality, self.prevention))

    def __repr__(self) -> str:
        return (f"ReversiblePes(core={self.core!r}, undoable={sorted(self.undoable)}, "
                f"rev_causality={sorted(self.rev_causality)}, prevention={sorted(self.prevention)})")


def _configuration_key(configuration: Iterable[str]) -> Tuple[int, Tuple[str, ...]]:
    items = tuple(sorted(configuration))
    return len(items), items


class ConfigurationSet:
    """
    Canonically ordered set of configurations; the empty configuration is always a member
    """

    def __init__(self, configurations: Iterable[Iterable[str]] = ()):
        members = {frozenset(configuration) for configuration in configurations}
        members.add(frozenset())
        self.configurations: FrozenSet[EventSet] = frozenset(members)

    def sorted(self) -> List[Tuple[str, ...]]:
        """Configurations ordered by size, then lexicographically"""
        return sorted((tuple(sorted(c)) for c in self.configurations), key=lambda c: (len(c), c))

    def as_lists(self) -> List[List[str]]:
        return [list(configuration) for configuration in self.sorted()]

    def symmetric_difference(self, other: "ConfigurationSet") -> List[Tuple[str, ...]]:
        """Configurations that belong to exactly one of the two sets, canonically ordered"""
        return sorted((tuple(sorted(c)) for c in self.configurations ^ other.configurations),
                      key=lambda c: (len(c), c))

    def __contains__(self, configuration: Iterable[str]) -> bool:
        return frozenset(configuration) in self.configurations

    def __iter__(self) -> Iterator[EventSet]:
        return iter(frozenset(c) for c in self.sorted())

    def __len__(self) -> int:
        return len(self.configurations)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfigurationSet):
            return NotImplemented
        return self.configurations == other.configurations

    def __repr__(self) -> str:
        return "ConfigurationSet(" + ", ".join("{" + ",".join(c) + "}" for c in self.sorted()) + ")"


def causal_history(core: EventStructureCore, event: str) -> Set[str]:
    """The history of an event: its causes together with the event itself"""
    return core.causes(event) | {event}


def is_conflict_free(core: EventStructureCore, events: Iterable[str]) -> bool:
    names = set(events)
    core.check_names(names)
    return core.conflict_matrix.is_related_within(names) is None


def validate_ppes(core: EventStructureCore) -> ValidationReport:
    """
    Check the axioms of a prime event structure without requiring hereditary conflict

    Args:
        core: Structure to check

    Returns:
        Report with one entry per clause; violations carry the offending events
    """
    report = ValidationReport(subject="ppes")
    cyclic = core.transitive_causality.reflexive_elements()
    report.check("causality-acyclic", not cyclic, cyclic,
                 "causality must be an irreflexive partial order")
    reflexive = core.conflict_matrix.reflexive_elements()
    report.check("conflict-irreflexive", not reflexive, reflexive)

    cause_conflicts = core.transitive_causality.intersection(core.conflict_matrix).pairs()
    report.check("cause-not-in-conflict", not cause_conflicts,
                 list(cause_conflicts[0]) if cause_conflicts else [],
                 "an event is in conflict with one of its causes")

    history_witness: List[str] = []
    for event in core.events:
        clash = core.conflict_matrix.is_related_within(core.causes(event))
        if clash is not None:
            history_witness = [event, *clash]
            break
    report.check("history-conflict-free", not history_witness, history_witness)
    return report


def is_pes(core: EventStructureCore) -> bool:
    """True when conflict is inherited along (transitive) causality"""
    inherited = core.conflict_matrix.compose(core.transitive_causality)
    return inherited.is_subset(core.conflict_matrix)


def hereditary_closure(core: EventStructureCore) -> EventStructureCore:
    """
    Least symmetric conflict containing # and inherited along causality

    Args:
        core: A valid pPES

    Returns:
        Structure with the same events and causality and the closed conflict
    """
    closed = core.conflict_matrix.symmetric()
    causality = core.transitive_causality
    while True:
        grown = closed.union(closed.compose(causality)).symmetric()
        if grown == closed:
            break
        closed = grown
    logger.debug(f"Hereditary closure: {len(core.conflict)} -> {len(closed.unordered_pairs())} conflicts")
    return EventStructureCore(core.events, core.causality, closed.unordered_pairs())


def enabled_forward(core: EventStructureCore, configuration: Iterable[str], step: Iterable[str]) -> bool:
    """
    Whether a set of events can happen together at a conflict-free set

    Raises:
        ValueError: If the starting set is not conflict-free
    """
    current, added = set(configuration), set(step)
    core.check_names(current | added)
    if not is_conflict_free(core, current):
        raise ValueError(f"Configuration {sorted(current)} is not conflict-free")
    if current & added:
        return False
    if not is_conflict_free(core, current | added):
        return False
    return all(core.causes(event) <= current for event in added)


def configurations_ppes(core: EventStructureCore) -> ConfigurationSet:
    """Breadth-first closure of the empty set under enabled forward events"""
    seen: Set[EventSet] = {frozenset()}
    queue = deque([frozenset()])
    while queue:
        current = queue.popleft()
        for event in core.events:
            if event in current or not enabled_forward(core, current, {event}):
                continue
            successor = current | {event}
            if successor not in seen:
                seen.add(successor)
                queue.append(successor)
    logger.info(f"pPES configurations: {len(seen)} reachable")
    return ConfigurationSet(seen)


def declarative_configurations(core: EventStructureCore) -> ConfigurationSet:
    """Conflict-free sets that contain the causes of each member"""
    found = []
    for size in range(len(core.events) + 1):
        for candidate in combinations(core.events, size):
            members = set(candidate)
            if not is_conflict_free(core, members):
                continue
            if all(core.causes(event) <= members for event in members):
                found.append(members)
    return ConfigurationSet(found)


def sustained_causation(rp: ReversiblePes) -> RelationMatrix:
    """
    Causality that cannot be dissolved by undoing: e < e' and, if e is undoable, e' prevents ~e
    """
    induced = rp.core.transitive_causality.matrix.copy()
    carrier = rp.core.events
    for i, cause in enumerate(carrier):
        if cause not in rp.undoable:
            continue
        preventers = rp.preventers(cause)
        for j, effect in enumerate(carrier):
            if induced[i, j] and effect not in preventers:
                induced[i, j] = False
    return RelationMatrix(carrier, induced)


def validate_rpes(rp: ReversiblePes) -> ValidationReport:
    """Check every axiom of a reversible prime event structure"""
    report = ValidationReport(subject="rpes")
    for result in validate_ppes(rp.core).clauses:
        report.clauses.append(result)

    missing_self = sorted(u for u in rp.undoable if (u, u) not in rp.rev_causality)
    report.check("undo-requires-presence", not missing_self, missing_self,
                 "every undoable event u must satisfy u reverse-causes ~u")

    stray = sorted({u for _, u in rp.rev_causality | rp.prevention if u not in rp.undoable})
    report.check("undo-targets-undoable", not stray, stray)

    clash_witness: List[str] = []
    for u in sorted(rp.undoable):
        clash = rp.core.conflict_matrix.is_related_within(rp.reverse_causes(u))
        if clash is not None:
            clash_witness = [reverser_name(u), *clash]
            break
    report.check("reverse-causes-conflict-free", not clash_witness, clash_witness)

    overlap = sorted(rp.rev_causality & rp.prevention)
    report.check("reverse-causality-prevention-disjoint", not overlap,
                 [f"{e}->{reverser_name(u)}" for e, u in overlap])

    sustained = sustained_causation(rp)
    gap = sustained.transitivity_witness()
    report.check("sustained-causation-transitive", gap is None, list(gap) if gap else [])

    inherited = rp.core.conflict_matrix.compose(sustained).difference(rp.core.conflict_matrix)
    missing = inherited.pairs()
    report.check("conflict-hereditary-along-sustained", not missing,
                 list(missing[0]) if missing else [],
                 "e # e' and e' sustains e'' requires e # e''")
    return report


def reversible_step_violation(rp: ReversiblePes, configuration: Iterable[str], forward: Iterable[str],
                              backward: Iterable[str]) -> Optional[str]:
    """
    Name the first enabling clause violated by a mixed step, or None when enabled

    Raises:
        ValueError: If the configuration is not conflict-free or backward events are not undoable
    """
    current, added, undone = set(configuration), set(forward), set(backward)
    rp.core.check_names(current | added | undone)
    if not is_conflict_free(rp.core, current):
        raise ValueError(f"Configuration {sorted(current)} is not conflict-free")
    if not undone <= rp.undoable:
        raise ValueError(f"Events {sorted(undone - rp.undoable)} are not undoable")

    if current & added:
        return "forward event already present"
    if not undone <= current:
        return "undone event not present"
    if not is_conflict_free(rp.core, current | added):
        return "conflict with the configuration"
    kept = current - undone
    for event in added:
        if not rp.core.causes(event) <= kept:
            return f"missing cause of {event}"
    for event in undone:
        if not rp.reverse_causes(event) <= current - (undone - {event}):
            return f"missing reverse cause of {reverser_name(event)}"
        if rp.preventers(event) & (current | added):
            return f"{reverser_name(event)} prevented"
    return None


def enabled_reversible(rp: ReversiblePes, configuration: Iterable[str], forward: Iterable[str],
                       backward: Iterable[str]) -> bool:
    return reversible_step_violation(rp, configuration, forward, backward) is None


def step_reversible(rp: ReversiblePes, configuration: Iterable[str], forward: Iterable[str],
                    backward: Iterable[str]) -> EventSet:
    """
    Perform the events in `forward` and undo those in `backward`

    Returns:
        (configuration minus backward) plus forward

    Raises:
        NotEnabledError: If the mixed step is not enabled
    """
    violation = reversible_step_violation(rp, configuration, forward, backward)
    if violation is not None:
        raise NotEnabledError(f"Step not enabled: {violation}", clause=violation)
    return frozenset((set(configuration) - set(backward)) | set(forward))


def enabled_reversible_steps(rp: ReversiblePes, configuration: Iterable[str],
                             max_step_size: Optional[int] = 1) -> List[Tuple[EventSet, EventSet]]:
    """
    Nonempty enabled (forward, backward) steps at a configuration, canonically ordered

    Every sub-step of an enabled step is itself enabled, so candidate steps are
    built only from the enabled singletons.

    Args:
        rp: The reversible structure
        configuration: Current conflict-free configuration
        max_step_size: Bound on |forward| + |backward|; None for no bound
    """
    current = frozenset(configuration)
    moves = [("do", e) for e in rp.events if e not in current and enabled_reversible(rp, current, {e}, ())]
    moves += [("undo", u) for u in sorted(rp.undoable & current) if enabled_reversible(rp, current, (), {u})]
    limit = len(moves) if max_step_size is None else min(max_step_size, len(moves))
    steps = []
    for size in range(1, limit + 1):
        for combo in combinations(moves, size):
            forward = frozenset(e for kind, e in combo if kind == "do")
            backward = frozenset(e for kind, e in combo if kind == "undo")
            if size == 1 or enabled_reversible(rp, current, forward, backward):
                steps.append((forward, backward))
    return steps


def configurations_rpes(rp: ReversiblePes, max_step_size: Optional[int] = 1) -> ConfigurationSet:
    """
    Configurations reachable from the empty set by doing and undoing events

    Singleton steps reach every configuration; a larger `max_step_size` (or None)
    explores mixed steps as well and yields the same set.
    """
    seen: Set[EventSet] = {frozenset()}
    queue = deque([frozenset()])
    while queue:
        current = queue.popleft()
        for forward, backward in enabled_reversible_steps(rp, current, max_step_size):
            successor = frozenset((current - backward) | forward)
            if successor not in seen:
                seen.add(successor)
                queue.append(successor)
    logger.info(f"rPES configurations: {len(seen)} reachable")
    return ConfigurationSet(seen)


def equiv_rpes(first: ReversiblePes, second: ReversiblePes) -> bool:
    return configurations_rpes(first) == configurations_rpes(second)


def as_reversible(core: EventStructureCore) -> ReversiblePes:
    """View a pPES as a reversible structure with nothing undoable"""
    return ReversiblePes(core)
