"""
Inhibitor Net Module
Place/transition nets with inhibitor arcs: step semantics, reachable markings,
states of executions, safety, acyclicity, equivalence and isomorphism
"""

from collections import Counter, deque
from enum import Enum
from itertools import combinations, permutations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple, Union
import logging

from errors import InvalidNetError, NotEnabledError, UnknownNameError, UnsafeNetError
from relation_matrix import RelationMatrix

logger = logging.getLogger(__name__)


class Multiset(Mapping[str, int]):
    """
    Finitely supported multiset of names, hashable and immutable

    Used for markings (over places), steps and states (over transitions).
    """

    def __init__(self, items: Union[None, Iterable[str], Mapping[str, int]] = None):
        counts: Counter = Counter()
        if isinstance(items, Mapping):
            for name, count in items.items():
                if count < 0:
                    raise ValueError(f"Negative multiplicity {count} for '{name}'")
                counts[name] += count
        elif items is not None:
            counts.update(items)
        self._counts: Dict[str, int] = {name: count for name, count in counts.items() if count > 0}
        self._hash: Optional[int] = None

    def __getitem__(self, name: str) -> int:
        return self._counts.get(name, 0)

    def __contains__(self, name: object) -> bool:
        return name in self._counts

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._counts))

    def __len__(self) -> int:
        return len(self._counts)

    def size(self) -> int:
        """Total number of elements counted with multiplicity"""
        return sum(self._counts.values())

    def support(self) -> FrozenSet[str]:
        return frozenset(self._counts)

    def is_set(self) -> bool:
        return all(count == 1 for count in self._counts.values())

    def __add__(self, other: Mapping[str, int]) -> "Multiset":
        total = Counter(self._counts)
        for name, count in other.items():
            total[name] += count
        return Multiset(dict(total))

    def __sub__(self, other: Mapping[str, int]) -> "Multiset":
        remaining = Counter(self._counts)
        for name, count in other.items():
            if remaining[name] < count:
                raise ValueError(f"Cannot remove {count} of '{name}' from {self}")
            remaining[name] -= count
        return Multiset(dict(remaining))

    def __le__(self, other: Mapping[str, int]) -> bool:
        return all(other.get(name, 0) >= count for name, count in self._counts.items())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def sort_key(self) -> Tuple[int, Tuple[Tuple[str, int], ...]]:
        return self.size(), tuple(sorted(self._counts.items()))

    def to_dict(self) -> Dict[str, int]:
        return dict(sorted(self._counts.items()))

    def to_list(self) -> List[str]:
        """Names repeated by multiplicity, sorted"""
        return [name for name in sorted(self._counts) for _ in range(self._counts[name])]

    def __repr__(self) -> str:
        parts = [name if count == 1 else f"{name}*{count}" for name, count in sorted(self._counts.items())]
        return "{" + ",".join(parts) + "}"


Marking = Multiset


class SafetyVerdict(str, Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"
    INCONCLUSIVE = "inconclusive"


class EquivalenceVerdict(str, Enum):
    EQUAL = "equal"
    DIFFERENT = "different"
    INCONCLUSIVE = "inconclusive"


class InhibitorNet:
    """
    Net with places, transitions, a flow relation, inhibitor arcs and an initial marking
    """

    def __init__(self, places: Iterable[str], transitions: Iterable[str],
                 flow: Iterable[Tuple[str, str]], inhibit: Iterable[Tuple[str, str]] = (),
                 marking: Union[None, Iterable[str], Mapping[str, int]] = None):
        self.places: Tuple[str, ...] = tuple(sorted(set(places)))
        self.transitions: Tuple[str, ...] = tuple(sorted(set(transitions)))
        self.flow: FrozenSet[Tuple[str, str]] = frozenset(tuple(arc) for arc in flow)
        self.inhibit: FrozenSet[Tuple[str, str]] = frozenset(tuple(arc) for arc in inhibit)
        self.initial_marking: Marking = Multiset(marking)
        self._validate_structure()

        self._pre: Dict[str, Set[str]] = {name: set() for name in self.places + self.transitions}
        self._post: Dict[str, Set[str]] = {name: set() for name in self.places + self.transitions}
        for source, target in self.flow:
            self._post[source].add(target)
            self._pre[target].add(source)
        self._inhib: Dict[str, Set[str]] = {t: set() for t in self.transitions}
        self._inhibits: Dict[str, Set[str]] = {s: set() for s in self.places}
        for place, transition in self.inhibit:
            self._inhib[transition].add(place)
            self._inhibits[place].add(transition)

        idle = [t for t in self.transitions if not self._pre[t]]
        if idle:
            raise InvalidNetError(f"Transitions without input places: {idle}")

    def _validate_structure(self) -> None:
        place_set, transition_set = set(self.places), set(self.transitions)
        shared = sorted(place_set & transition_set)
        if shared:
            raise InvalidNetError(f"Names used both as place and transition: {shared}")
        for source, target in self.flow:
            consumes = source in place_set and target in transition_set
            produces = source in transition_set and target in place_set
            if not (consumes or produces):
                raise InvalidNetError(f"Arc {source} -> {target} must join a place and a transition")
        for place, transition in self.inhibit:
            if place not in place_set or transition not in transition_set:
                raise InvalidNetError(f"Inhibitor arc {place} -o {transition} must go from a place to a transition")
        unknown = sorted(set(self.initial_marking.support()) - place_set)
        if unknown:
            raise InvalidNetError(f"Marking refers to unknown places: {unknown}")

    def _known(self, name: str) -> None:
        if name not in self._pre:
            raise UnknownNameError(f"'{name}' is neither a place nor a transition of the net")

    def preset(self, name: str) -> Set[str]:
        self._known(name)
        return set(self._pre[name])

    def postset(self, name: str) -> Set[str]:
        self._known(name)
        return set(self._post[name])

    def inhibset(self, name: str) -> Set[str]:
        """Inhibitor places of a transition; empty for places"""
        self._known(name)
        return set(self._inhib.get(name, set()))

    def inhibited_by(self, place: str) -> Set[str]:
        self._known(place)
        return set(self._inhibits.get(place, set()))

    def _check_step(self, step: Iterable[str]) -> List[str]:
        names = sorted(set(step))
        for name in names:
            if name not in self._inhib:
                raise UnknownNameError(f"'{name}' is not a transition of the net")
        return names

    def step_preset(self, step: Iterable[str]) -> Multiset:
        total: Counter = Counter()
        for transition in self._check_step(step):
            total.update(self._pre[transition])
        return Multiset(dict(total))

    def step_postset(self, step: Iterable[str]) -> Multiset:
        total: Counter = Counter()
        for transition in self._check_step(step):
            total.update(self._post[transition])
        return Multiset(dict(total))

    def step_inhibset(self, step: Iterable[str]) -> Set[str]:
        places: Set[str] = set()
        for transition in self._check_step(step):
            places |= self._inhib[transition]
        return places

    def producers(self, place: str) -> Set[str]:
        return self.preset(place)

    def consumers(self, place: str) -> Set[str]:
        return self.postset(place)

    def restrict_transitions(self, keep: Iterable[str]) -> "InhibitorNet":
        """Subnet with the given transitions, every place, and only the arcs incident to kept transitions"""
        kept = set(keep)
        flow = [(x, y) for x, y in self.flow if x in kept or y in kept]
        inhibit = [(s, t) for s, t in self.inhibit if t in kept]
        return InhibitorNet(self.places, kept, flow, inhibit, self.initial_marking)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InhibitorNet):
            return NotImplemented
        return (self.places, self.transitions, self.flow, self.inhibit, self.initial_marking) == \
            (other.places, other.transitions, other.flow, other.inhibit, other.initial_marking)

    def __hash__(self) -> int:
        return hash((self.places, self.transitions, self.flow, self.inhibit, self.initial_marking))

    def __repr__(self) -> str:
        return (f"InhibitorNet(places={list(self.places)}, transitions={list(self.transitions)}, "
                f"flow={sorted(self.flow)}, inhibit={sorted(self.inhibit)}, marking={self.initial_marking})")


def explain_disabled(net: InhibitorNet, marking: Mapping[str, int],
                     step: Iterable[str]) -> Optional[Tuple[str, List[str]]]:
    """
    Explain why a step is not enabled

    Returns:
        None when enabled, otherwise (clause, places) where clause is one of
        "missing tokens", "inhibitor place marked" or "inhibitor place filled by the step"
    """
    names = net._check_step(step)
    current = Multiset(marking)
    needed = net.step_preset(names)
    short = sorted(place for place in needed if needed[place] > current[place])
    if short:
        return "missing tokens", short
    occupied = sorted(place for place in net.step_inhibset(names) if current[place] > 0)
    if occupied:
        return "inhibitor place marked", occupied
    filled: Set[str] = set()
    for transition in names:
        others = net.step_postset([t for t in names if t != transition])
        filled |= {place for place in net.inhibset(transition) if others[place] > 0}
    if filled:
        return "inhibitor place filled by the step", sorted(filled)
    return None


def step_enabled(net: InhibitorNet, marking: Mapping[str, int], step: Iterable[str]) -> bool:
    """
    Whether a set of transitions can fire together at a marking

    The preset of the step must be covered by the marking, and every inhibitor
    place of a transition in the step must be empty and must not be filled by
    another transition of the same step.
    """
    return explain_disabled(net, marking, step) is None


def fire(net: InhibitorNet, marking: Mapping[str, int], step: Iterable[str]) -> Marking:
    """
    Fire a step

    Raises:
        NotEnabledError: If the step is not enabled at the marking
    """
    names = list(step)
    reason = explain_disabled(net, marking, names)
    if reason is not None:
        clause, places = reason
        raise NotEnabledError(f"Step {{{','.join(sorted(set(names)))}}} not enabled: {clause} {places}",
                              clause=clause, places=places)
    return Multiset(marking) - net.step_preset(names) + net.step_postset(names)


def enabled_steps(net: InhibitorNet, marking: Mapping[str, int], max_size: int = 1) -> List[FrozenSet[str]]:
    """
    Nonempty enabled steps of at most `max_size` transitions, ordered by size then name
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    singles = [t for t in net.transitions if step_enabled(net, marking, [t])]
    steps = [frozenset([t]) for t in singles]
    for size in range(2, min(max_size, len(singles)) + 1):
        for combo in combinations(singles, size):
            if step_enabled(net, marking, combo):
                steps.append(frozenset(combo))
    return steps


def reachable_markings(net: InhibitorNet, max_step_size: int = 1) -> Set[Marking]:
    """
    Breadth-first closure of the initial marking under enabled steps

    Raises:
        UnsafeNetError: As soon as a reachable marking holds two tokens on a place
    """
    if not net.initial_marking.is_set():
        raise UnsafeNetError(f"Initial marking {net.initial_marking} is not a set", net.initial_marking.to_dict())
    seen: Set[Marking] = {net.initial_marking}
    queue = deque([net.initial_marking])
    while queue:
        current = queue.popleft()
        for step in enabled_steps(net, current, max_step_size):
            successor = fire(net, current, step)
            if not successor.is_set():
                raise UnsafeNetError(f"Firing {sorted(step)} at {current} yields unsafe marking {successor}",
                                     successor.to_dict())
            if successor not in seen:
                seen.add(successor)
                queue.append(successor)
    logger.info(f"Reachability: {len(seen)} markings explored")
    return seen


def sorted_multisets(items: Iterable[Multiset]) -> List[Multiset]:
    return sorted(items, key=lambda item: item.sort_key())


def default_depth(net: InhibitorNet) -> int:
    return 2 * len(net.transitions) + 2


class StateExploration:
    """
    States found by exploring executions, with how the exploration ended

    exhaustive is True when no further state can be reached; depth is the bound
    used, or None when the closure ran without one.
    """

    def __init__(self, states: Set[Multiset], exhaustive: bool, depth: Optional[int]):
        self.states = frozenset(states)
        self.exhaustive = exhaustive
        self.depth = depth

    def __repr__(self) -> str:
        return f"StateExploration({len(self.states)} states, exhaustive={self.exhaustive}, depth={self.depth})"


def _explore(net: InhibitorNet, depth: Optional[int], single_execution: bool) -> Optional[StateExploration]:
    # executions are explored one transition at a time; enabled steps interleave
    start = (net.initial_marking, Multiset())
    seen = {start}
    states: Set[Multiset] = {Multiset()}
    frontier = [start]
    level = 0
    while frontier:
        if depth is not None and level == depth:
            more = any(enabled_steps(net, marking, 1) for marking, _ in frontier)
            return StateExploration(states, not more, depth)
        following = []
        for marking, state in frontier:
            for step in enabled_steps(net, marking, 1):
                grown = state + Multiset(step)
                if single_execution and not grown.is_set():
                    return None
                pair = (fire(net, marking, step), grown)
                if pair not in seen:
                    seen.add(pair)
                    states.add(grown)
                    following.append(pair)
        frontier = following
        level += 1
    return StateExploration(states, True, depth)


def explore_states(net: InhibitorNet, depth: Optional[int] = None) -> StateExploration:
    """
    Enumerate the states (transition multisets) of executions

    Args:
        net: Net to explore
        depth: Maximum execution length; None runs the exact closure when no
            transition can occur twice in an execution, and otherwise falls back
            to the default bound 2|T|+2

    Returns:
        StateExploration describing the states and whether the result is exact
    """
    if depth is not None:
        if depth < 0:
            raise ValueError("depth must be non-negative")
        return _explore(net, depth, single_execution=False)
    exact = _explore(net, None, single_execution=True)
    if exact is not None:
        logger.info(f"States: {len(exact.states)} found by exact closure")
        return exact
    bound = default_depth(net)
    logger.warning(f"A transition can repeat within an execution; bounding state search at depth {bound}")
    return _explore(net, bound, single_execution=False)


def states(net: InhibitorNet, depth: Optional[int] = None) -> FrozenSet[Multiset]:
    return explore_states(net, depth).states


def is_safe(net: InhibitorNet, bound: int = 10000) -> SafetyVerdict:
    """Explore up to `bound` distinct markings looking for a place with two tokens"""
    if not net.initial_marking.is_set():
        return SafetyVerdict.UNSAFE
    seen: Set[Marking] = {net.initial_marking}
    queue = deque([net.initial_marking])
    while queue:
        current = queue.popleft()
        for step in enabled_steps(net, current, 1):
            successor = fire(net, current, step)
            if not successor.is_set():
                logger.info(f"Unsafe marking {successor} reached from {current}")
                return SafetyVerdict.UNSAFE
            if successor not in seen:
                if len(seen) >= bound:
                    return SafetyVerdict.INCONCLUSIVE
                seen.add(successor)
                queue.append(successor)
    return SafetyVerdict.SAFE


def flow_relation(net: InhibitorNet) -> RelationMatrix:
    """Flow arcs as a relation over places and transitions"""
    return RelationMatrix.from_pairs(net.places + net.transitions, net.flow)


def is_acyclic(net: InhibitorNet) -> bool:
    return not flow_relation(net).has_cycle()


def net_equiv(first: InhibitorNet, second: InhibitorNet, depth: Optional[int] = None) -> EquivalenceVerdict:
    """
    Compare two nets by their sets of states

    Exact closures on both sides give EQUAL or DIFFERENT. When either side is
    depth-bounded a difference is still DIFFERENT, but agreement is INCONCLUSIVE.
    """
    left, right, bound = _comparable_states(first, second, depth)
    if left != right:
        return EquivalenceVerdict.DIFFERENT
    if bound is None:
        return EquivalenceVerdict.EQUAL
    logger.warning(f"State comparison bounded at depth {bound}; no difference found")
    return EquivalenceVerdict.INCONCLUSIVE


def _comparable_states(first: InhibitorNet, second: InhibitorNet,
                       depth: Optional[int]) -> Tuple[FrozenSet[Multiset], FrozenSet[Multiset], Optional[int]]:
    # bound is None when both explorations are exhaustive
    left = explore_states(first, depth)
    right = explore_states(second, depth)
    if left.exhaustive and right.exhaustive:
        return left.states, right.states, None
    bound = min(d for d in (left.depth, right.depth) if d is not None)
    return (frozenset(s for s in left.states if s.size() <= bound),
            frozenset(s for s in right.states if s.size() <= bound), bound)


def distinguishing_states(first: InhibitorNet, second: InhibitorNet,
                          depth: Optional[int] = None) -> List[Multiset]:
    """
    States of exactly one of the two nets, canonically ordered

    Bounded explorations are compared up to the shared depth, as in net_equiv.
    """
    left, right, _ = _comparable_states(first, second, depth)
    return sorted_multisets(left ^ right)


def _transition_signature(net: InhibitorNet, transition: str) -> Tuple[int, ...]:
    pre = net.preset(transition)
    return (len(pre), len(net.postset(transition)), len(net.inhibset(transition)),
            sum(net.initial_marking[p] for p in pre))


def _place_signature(net: InhibitorNet, place: str, mapping: Mapping[str, str]) -> Tuple:
    return (tuple(sorted(mapping[t] for t in net.producers(place))),
            tuple(sorted(mapping[t] for t in net.consumers(place))),
            tuple(sorted(mapping[t] for t in net.inhibited_by(place))),
            net.initial_marking[place])


def find_isomorphism(first: InhibitorNet, second: InhibitorNet) -> Optional[Dict[str, str]]:
    """
    Search for a renaming of places and transitions mapping `first` onto `second`

    The renaming must preserve flow, inhibitor arcs and the initial marking.

    Returns:
        Mapping from names of `first` to names of `second`, or None
    """
    if (len(first.places), len(first.transitions), len(first.flow), len(first.inhibit)) != \
            (len(second.places), len(second.transitions), len(second.flow), len(second.inhibit)):
        return None
    if sorted(first.initial_marking.values()) != sorted(second.initial_marking.values()):
        return None

    groups: Dict[Tuple[int, ...], List[str]] = {}
    for t in first.transitions:
        groups.setdefault(_transition_signature(first, t), []).append(t)
    targets: Dict[Tuple[int, ...], List[str]] = {}
    for t in second.transitions:
        targets.setdefault(_transition_signature(second, t), []).append(t)
    if {k: len(v) for k, v in groups.items()} != {k: len(v) for k, v in targets.items()}:
        return None

    keys = sorted(groups)
    identity = {t: t for t in second.transitions}

    def assign(index: int, mapping: Dict[str, str]) -> Optional[Dict[str, str]]:
        if index == len(keys):
            return _match_places(first, second, mapping, identity)
        key = keys[index]
        for image in permutations(targets[key]):
            extended = dict(mapping)
            extended.update(zip(groups[key], image))
            found = assign(index + 1, extended)
            if found is not None:
                return found
        return None

    return assign(0, {})


def _match_places(first: InhibitorNet, second: InhibitorNet, transitions: Dict[str, str],
                  identity: Dict[str, str]) -> Optional[Dict[str, str]]:
    buckets: Dict[Tuple, List[str]] = {}
    for place in first.places:
        buckets.setdefault(_place_signature(first, place, transitions), []).append(place)
    images: Dict[Tuple, List[str]] = {}
    for place in second.places:
        images.setdefault(_place_signature(second, place, identity), []).append(place)
    if {k: len(v) for k, v in buckets.items()} != {k: len(v) for k, v in images.items()}:
        return None
    mapping = dict(transitions)
    for key, places in buckets.items():
        mapping.update(zip(places, images[key]))
    return mapping
