"""
Theorem Analysis Module
Seeded random generators and end-to-end checks of the correspondences between
event structures and nets, on bundled fixtures and random instances
"""

import json
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from errors import InstanceMismatchError, ModelError, SamplingBudgetExceeded
from event_structure import (
    ConfigurationSet, EventStructureCore, ReversiblePes, configurations_ppes, configurations_rpes,
    hereditary_closure, is_conflict_free, is_pes, sustained_causation, validate_ppes, validate_rpes,
)
from fixture_library import load_fixture
from inhibitor_net import (
    EquivalenceVerdict, InhibitorNet, distinguishing_states, find_isomorphism, fire, net_equiv, step_enabled,
)
from model_format import ParsedEs, serialize_es, serialize_net
from net_classes import (
    BackwardPartition, configurations_net, infer_backward_partition, is_cn, is_occurrence_net,
)
from net_encodings import on_to_cn, pcn_to_on, pcn_to_ppes, ppes_to_pcn, rcn_to_rpes, rpes_to_rcn

logger = logging.getLogger(__name__)

EVENT_NAMES = "abcdefgh"

THEOREMS = (
    "ppes-pcn-configurations",
    "pes-cn-roundtrip",
    "rpes-rcn-configurations",
    "rcn-rpes-configurations",
    "rpes-rcn-roundtrip",
    "on-cn-roundtrip",
    "pes-on-configurations",
)

Instance = Union[EventStructureCore, ReversiblePes, InhibitorNet, Tuple[InhibitorNet, BackwardPartition]]


class RandomInstanceSpec(BaseModel):
    """Knobs for random structures; every density is a probability"""
    seed: int = 0
    min_events: int = Field(1, ge=0, le=8)
    max_events: int = Field(5, ge=0, le=8)
    causality_density: float = Field(0.3, ge=0.0, le=1.0)
    conflict_density: float = Field(0.2, ge=0.0, le=1.0)
    undoable_density: float = Field(0.5, ge=0.0, le=1.0)
    rev_causality_density: float = Field(0.2, ge=0.0, le=1.0)
    prevention_density: float = Field(0.3, ge=0.0, le=1.0)
    max_attempts: int = Field(1000, ge=1)

    @model_validator(mode="after")
    def check_event_range(self) -> "RandomInstanceSpec":
        if self.min_events > self.max_events:
            raise ValueError("min_events must not exceed max_events")
        return self


class Counterexample(BaseModel):
    kind: str
    model: str
    distinguishing: List[List[str]] = []


class TheoremVerdict(BaseModel):
    theorem: str
    instance: str
    passed: bool
    counterexample: Optional[Counterexample] = None
    details: Dict[str, Any] = {}

    @model_validator(mode="after")
    def failing_verdict_has_counterexample(self) -> "TheoremVerdict":
        if not self.passed and self.counterexample is None:
            raise ValueError("a failing verdict must carry a counterexample")
        return self

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.theorem} {self.instance}"


class TheoremReport(BaseModel):
    seed: int
    count: int
    max_events: int
    verdicts: List[TheoremVerdict] = []

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, indent=2) + "\n"


def _rng(spec: RandomInstanceSpec, rng: Optional[np.random.Generator]) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(spec.seed)


def _sample_ppes(spec: RandomInstanceSpec, rng: np.random.Generator) -> EventStructureCore:
    size = int(rng.integers(spec.min_events, spec.max_events + 1))
    events = list(EVENT_NAMES[:size])
    upper = np.triu(rng.random((size, size)) < spec.causality_density, k=1)
    causality = [(events[i], events[j]) for i, j in zip(*np.nonzero(upper))]
    closure = EventStructureCore(events, causality).transitive_causality.matrix | np.eye(size, dtype=bool)
    draws = rng.random((size, size))
    conflict = []
    for i in range(size):
        for j in range(i + 1, size):
            # conflicting events may share no effect, so every history stays conflict-free
            if draws[i, j] < spec.conflict_density and not (closure[i] & closure[j]).any():
                conflict.append((events[i], events[j]))
    return EventStructureCore(events, causality, conflict)


def generate_ppes(spec: RandomInstanceSpec, rng: Optional[np.random.Generator] = None) -> EventStructureCore:
    """
    Random valid pPES over at most spec.max_events events

    Raises:
        SamplingBudgetExceeded: If no valid structure was drawn within max_attempts
    """
    rng = _rng(spec, rng)
    for _ in range(spec.max_attempts):
        core = _sample_ppes(spec, rng)
        if validate_ppes(core).valid:
            return core
    raise SamplingBudgetExceeded(f"No valid pPES after {spec.max_attempts} attempts")


def generate_pes(spec: RandomInstanceSpec, rng: Optional[np.random.Generator] = None) -> EventStructureCore:
    return hereditary_closure(generate_ppes(spec, rng))


def _sample_reversibility(core: EventStructureCore, spec: RandomInstanceSpec,
                          rng: np.random.Generator) -> Optional[ReversiblePes]:
    events = core.events
    undoable = [e for e, draw in zip(events, rng.random(len(events))) if draw < spec.undoable_density]
    rev_causality, prevention = set(), set()
    for u in undoable:
        rev_causality.add((u, u))
        required = {u}
        for e, draw, prevent_draw in zip(events, rng.random(len(events)), rng.random(len(events))):
            if e == u:
                continue
            if draw < spec.rev_causality_density and is_conflict_free(core, required | {e}):
                rev_causality.add((e, u))
                required.add(e)
            elif prevent_draw < spec.prevention_density:
                prevention.add((e, u))
    structure = ReversiblePes(core, undoable, rev_causality, prevention)

    # close sustained causation under transitivity by adding preventions
    while True:
        gap = sustained_causation(structure).transitivity_witness()
        if gap is None:
            break
        cause, effect = gap
        if (effect, cause) in rev_causality:
            return None
        prevention.add((effect, cause))
        structure = ReversiblePes(core, undoable, rev_causality, prevention)

    order = sustained_causation(structure)
    conflict = core.conflict_matrix
    while True:
        grown = conflict.union(conflict.compose(order)).symmetric()
        if grown == conflict:
            break
        conflict = grown
    return ReversiblePes(core.with_conflict(conflict.unordered_pairs()), undoable, rev_causality, prevention)


def generate_rpes(spec: RandomInstanceSpec, rng: Optional[np.random.Generator] = None) -> ReversiblePes:
    """
    Random valid rPES by rejection sampling

    Args:
        spec: Size, densities and attempt budget
        rng: Generator to draw from; seeded from spec.seed when omitted

    Raises:
        SamplingBudgetExceeded: If no valid structure was drawn within max_attempts
    """
    rng = _rng(spec, rng)
    for _ in range(spec.max_attempts):
        core = _sample_ppes(spec, rng)
        if not validate_ppes(core).valid:
            continue
        structure = _sample_reversibility(core, spec, rng)
        if structure is not None and validate_rpes(structure).valid:
            return structure
    raise SamplingBudgetExceeded(f"No valid rPES after {spec.max_attempts} attempts")


def generate_pcn(spec: RandomInstanceSpec, rng: Optional[np.random.Generator] = None) -> InhibitorNet:
    return ppes_to_pcn(generate_ppes(spec, rng))


def generate_cn(spec: RandomInstanceSpec, rng: Optional[np.random.Generator] = None) -> InhibitorNet:
    return ppes_to_pcn(generate_pes(spec, rng))


def generate_on(spec: RandomInstanceSpec, rng: Optional[np.random.Generator] = None) -> InhibitorNet:
    return pcn_to_on(generate_pcn(spec, rng))


def generate_rcn(spec: RandomInstanceSpec,
                 rng: Optional[np.random.Generator] = None) -> Tuple[InhibitorNet, BackwardPartition]:
    return rpes_to_rcn(generate_rpes(spec, rng))


def _configurations_payload(left: ConfigurationSet, right: ConfigurationSet) -> List[List[str]]:
    return [list(c) for c in left.symmetric_difference(right)]


def _states_payload(first: InhibitorNet, second: InhibitorNet) -> List[List[str]]:
    return [state.to_list() for state in distinguishing_states(first, second)]


def _serialize(instance: Instance) -> Tuple[str, str]:
    if isinstance(instance, ReversiblePes):
        return "rpes", serialize_es(instance)
    if isinstance(instance, EventStructureCore):
        kind = "pes" if is_pes(instance) else "ppes"
        return kind, serialize_es(instance, kind)
    if isinstance(instance, tuple):
        net, partition = instance
        return "rcn", serialize_net(net, "rcn", sorted(partition.backward))
    return "ipt", serialize_net(instance)


def _verdict(theorem: str, label: str, instance: Instance, passed: bool,
             distinguishing: Optional[List[List[str]]] = None, **details: Any) -> TheoremVerdict:
    counterexample = None
    if not passed:
        kind, model = _serialize(instance)
        counterexample = Counterexample(kind=kind, model=model, distinguishing=distinguishing or [])
    return TheoremVerdict(theorem=theorem, instance=label, passed=passed,
                          counterexample=counterexample, details=details)


def _as_rcn(instance: Instance) -> Tuple[InhibitorNet, BackwardPartition]:
    if isinstance(instance, tuple):
        return instance
    if isinstance(instance, InhibitorNet):
        return instance, infer_backward_partition(instance)
    raise InstanceMismatchError("expected a reversible causal net")


def _check_ppes_pcn(label: str, instance: Instance) -> TheoremVerdict:
    if not isinstance(instance, EventStructureCore):
        raise InstanceMismatchError("expected a pPES")
    left = configurations_ppes(instance)
    right = configurations_net(ppes_to_pcn(instance), "pcn")
    return _verdict("ppes-pcn-configurations", label, instance, left == right,
                    _configurations_payload(left, right), configurations=len(left))


def _check_pes_cn(label: str, instance: Instance) -> TheoremVerdict:
    theorem = "pes-cn-roundtrip"
    if isinstance(instance, EventStructureCore):
        if not is_pes(instance):
            raise InstanceMismatchError("expected a PES")
        back = pcn_to_ppes(ppes_to_pcn(instance))
        left, right = configurations_ppes(instance), configurations_ppes(back)
        same_structure = back == EventStructureCore(instance.events, instance.transitive_causality.pairs(),
                                                    instance.conflict)
        return _verdict(theorem, label, instance, left == right and is_pes(back),
                        _configurations_payload(left, right), identical_up_to_closure=same_structure)
    if isinstance(instance, InhibitorNet):
        if not is_cn(instance).member:
            raise InstanceMismatchError("expected a causal net")
        rebuilt = ppes_to_pcn(pcn_to_ppes(instance))
        verdict = net_equiv(instance, rebuilt)
        return _verdict(theorem, label, instance, verdict == EquivalenceVerdict.EQUAL,
                        _states_payload(instance, rebuilt), equivalence=verdict.value,
                        isomorphic=find_isomorphism(instance, rebuilt) is not None)
    raise InstanceMismatchError("expected a PES or a causal net")


def _check_rpes_rcn(label: str, instance: Instance) -> TheoremVerdict:
    if not isinstance(instance, ReversiblePes):
        raise InstanceMismatchError("expected an rPES")
    net, partition = rpes_to_rcn(instance)
    left = configurations_rpes(instance)
    right = configurations_net(net, "rcn", partition)
    return _verdict("rpes-rcn-configurations", label, instance, left == right,
                    _configurations_payload(left, right), configurations=len(left))


def _check_rcn_rpes(label: str, instance: Instance) -> TheoremVerdict:
    net, partition = _as_rcn(instance)
    left = configurations_net(net, "rcn", partition)
    right = configurations_rpes(rcn_to_rpes(net, partition))
    return _verdict("rcn-rpes-configurations", label, (net, partition), left == right,
                    _configurations_payload(left, right), configurations=len(left))


def _check_rpes_roundtrip(label: str, instance: Instance) -> TheoremVerdict:
    theorem = "rpes-rcn-roundtrip"
    if isinstance(instance, ReversiblePes):
        structure = instance
        net, partition = rpes_to_rcn(structure)
    else:
        net, partition = _as_rcn(instance)
        structure = rcn_to_rpes(net, partition)
    back = rcn_to_rpes(*rpes_to_rcn(structure))
    es_left, es_right = configurations_rpes(structure), configurations_rpes(back)
    rebuilt, rebuilt_partition = rpes_to_rcn(rcn_to_rpes(net, partition))
    net_left = configurations_net(net, "rcn", partition)
    net_right = configurations_net(rebuilt, "rcn", rebuilt_partition)
    passed = es_left == es_right and net_left == net_right
    distinguishing = _configurations_payload(es_left, es_right) + _configurations_payload(net_left, net_right)
    return _verdict(theorem, label, instance, passed, distinguishing,
                    isomorphic=find_isomorphism(net, rebuilt) is not None)


def _check_on_cn(label: str, instance: Instance) -> TheoremVerdict:
    theorem = "on-cn-roundtrip"
    if not isinstance(instance, InhibitorNet):
        raise InstanceMismatchError("expected an occurrence net or a causal net")
    if is_occurrence_net(instance).member:
        rebuilt = pcn_to_on(on_to_cn(instance))
        verdict = net_equiv(instance, rebuilt)
        return _verdict(theorem, label, instance, verdict == EquivalenceVerdict.EQUAL,
                        _states_payload(instance, rebuilt), direction="on", equivalence=verdict.value)
    if is_cn(instance).member:
        rebuilt = on_to_cn(pcn_to_on(instance))
        verdict = net_equiv(instance, rebuilt)
        isomorphic = find_isomorphism(instance, rebuilt) is not None
        return _verdict(theorem, label, instance, isomorphic and verdict == EquivalenceVerdict.EQUAL,
                        _states_payload(instance, rebuilt), direction="cn", equivalence=verdict.value,
                        isomorphic=isomorphic)
    raise InstanceMismatchError("expected an occurrence net or a causal net")


def _check_pes_on(label: str, instance: Instance) -> TheoremVerdict:
    theorem = "pes-on-configurations"
    if isinstance(instance, EventStructureCore):
        if not is_pes(instance):
            raise InstanceMismatchError("expected a PES")
        occurrence = pcn_to_on(ppes_to_pcn(instance))
        is_on = is_occurrence_net(occurrence).member
        left = configurations_ppes(instance)
        right = configurations_net(occurrence, "on") if is_on else ConfigurationSet()
        return _verdict(theorem, label, instance, is_on and left == right,
                        _configurations_payload(left, right), occurrence_net=is_on)
    if isinstance(instance, InhibitorNet):
        if not is_occurrence_net(instance).member:
            raise InstanceMismatchError("expected an occurrence net")
        structure = pcn_to_ppes(on_to_cn(instance))
        left = configurations_net(instance, "on")
        right = configurations_ppes(structure)
        return _verdict(theorem, label, instance, is_pes(structure) and left == right,
                        _configurations_payload(left, right), pes=is_pes(structure))
    raise InstanceMismatchError("expected a PES or an occurrence net")


CHECKS: Dict[str, Callable[[str, Instance], TheoremVerdict]] = {
    "ppes-pcn-configurations": _check_ppes_pcn,
    "pes-cn-roundtrip": _check_pes_cn,
    "rpes-rcn-configurations": _check_rpes_rcn,
    "rcn-rpes-configurations": _check_rcn_rpes,
    "rpes-rcn-roundtrip": _check_rpes_roundtrip,
    "on-cn-roundtrip": _check_on_cn,
    "pes-on-configurations": _check_pes_on,
}


def check_theorem(theorem_id: str, instance: Instance, label: str = "instance") -> TheoremVerdict:
    """
    Run the full pipeline of one correspondence on one instance

    Raises:
        InstanceMismatchError: If the instance kind does not fit the theorem
        ValueError: If the theorem id is unknown
    """
    if theorem_id not in CHECKS:
        raise ValueError(f"Unknown theorem '{theorem_id}'; expected one of {', '.join(THEOREMS)}")
    try:
        return CHECKS[theorem_id](label, instance)
    except InstanceMismatchError:
        raise
    except ModelError as e:
        logger.error(f"{theorem_id} on {label}: {e}")
        return _verdict(theorem_id, label, instance, False, error=str(e))


FIXTURE_INSTANCES: Dict[str, Sequence[str]] = {
    "ppes-pcn-configurations": ("non_hereditary.es", "shared_memory_read.es", "causal_undo.es",
                                "out_of_order_undo.es", "order_saga.es"),
    "pes-cn-roundtrip": ("shared_memory_read.es", "causal.net", "small_causal.net"),
    "rpes-rcn-configurations": ("causal_undo.es", "concurrent_undo.es", "out_of_order_undo.es", "order_saga.es"),
    "rcn-rpes-configurations": ("concurrent_undo.net", "causal_undo_rcn.net"),
    "rpes-rcn-roundtrip": ("causal_undo.es", "concurrent_undo.es", "out_of_order_undo.es", "order_saga.es",
                           "concurrent_undo.net", "causal_undo_rcn.net"),
    "on-cn-roundtrip": ("occurrence.net", "small_causal.net", "causal.net"),
    "pes-on-configurations": ("shared_memory_read.es", "occurrence.net"),
}

RANDOM_GENERATORS: Dict[str, Sequence[Callable[..., Instance]]] = {
    "ppes-pcn-configurations": (generate_ppes,),
    "pes-cn-roundtrip": (generate_pes, generate_cn),
    "rpes-rcn-configurations": (generate_rpes,),
    "rcn-rpes-configurations": (generate_rcn,),
    "rpes-rcn-roundtrip": (generate_rpes, generate_rcn),
    "on-cn-roundtrip": (generate_on, generate_cn),
    "pes-on-configurations": (generate_pes, generate_on),
}


def fixture_instance(name: str, theorem: str) -> Instance:
    """Load a bundled fixture in the shape the theorem expects"""
    parsed = load_fixture(name)
    if isinstance(parsed, ParsedEs):
        structure = parsed.structure
        if theorem == "ppes-pcn-configurations" and isinstance(structure, ReversiblePes):
            return structure.core
        return structure
    if parsed.kind == "rcn":
        partition = parsed.partition() or infer_backward_partition(parsed.net)
        return parsed.net, partition
    return parsed.net


class TheoremHarness:
    """
    Runs every correspondence check on bundled fixtures and on seeded random instances
    """

    def __init__(self, seed: int = 0, count: int = 200, max_events: int = 5,
                 theorems: Sequence[str] = THEOREMS, include_fixtures: bool = True):
        unknown = [t for t in theorems if t not in CHECKS]
        if unknown:
            raise ValueError(f"Unknown theorems: {unknown}")
        self.seed = seed
        self.count = count
        self.max_events = max_events
        self.theorems = list(theorems)
        self.include_fixtures = include_fixtures
        self.report: Optional[TheoremReport] = None

    def random_instances(self, theorem: str) -> Iterator[Tuple[str, Instance]]:
        generators = RANDOM_GENERATORS[theorem]
        index = THEOREMS.index(theorem)
        for i in range(self.count):
            generator = generators[i % len(generators)]
            spec = RandomInstanceSpec(seed=self.seed, max_events=self.max_events)
            rng = np.random.default_rng([self.seed, index, i])
            yield f"random:{generator.__name__.replace('generate_', '')}:{i}", generator(spec, rng)

    def fixture_instances(self, theorem: str) -> Iterator[Tuple[str, Instance]]:
        for name in FIXTURE_INSTANCES[theorem]:
            yield f"fixture:{name}", fixture_instance(name, theorem)

    def run(self) -> TheoremReport:
        verdicts: List[TheoremVerdict] = []
        for theorem in self.theorems:
            sources = [self.random_instances(theorem)]
            if self.include_fixtures:
                sources.insert(0, self.fixture_instances(theorem))
            for source in sources:
                for label, instance in source:
                    verdict = check_theorem(theorem, instance, label)
                    if not verdict.passed:
                        logger.warning(f"{verdict.line()}")
                    verdicts.append(verdict)
            logger.info(f"{theorem}: {sum(v.theorem == theorem for v in verdicts)} instances checked")
        if self.include_fixtures:
            verdicts.append(reversible_on_counterexample())
        self.report = TheoremReport(seed=self.seed, count=self.count, max_events=self.max_events,
                                    verdicts=verdicts)
        return self.report

    def summarize(self) -> pd.DataFrame:
        """Pass and fail counts per theorem"""
        report = self.report or self.run()
        frame = pd.DataFrame([{"theorem": v.theorem, "instance": v.instance, "passed": v.passed}
                              for v in report.verdicts], columns=["theorem", "instance", "passed"])
        summary = frame.groupby("theorem", sort=True)["passed"].agg(total="count", passed="sum")
        summary["failed"] = summary["total"] - summary["passed"]
        return summary.reset_index()

    def report_json(self) -> str:
        report = self.report or self.run()
        return report.to_json()


def reversible_on_counterexample() -> TheoremVerdict:
    """
    Show that undoing a cause after its effect is impossible in an occurrence net
    with a reverser, yet possible in the reversible causal net of the same events

    In the occurrence net the reverser of b needs the condition (b,c), which c
    consumes; in the causal net nothing c does removes b's output.
    """
    causal = load_fixture("small_causal.net").net
    occurrence = pcn_to_on(causal)
    reverser = "~b"
    occurrence = InhibitorNet(
        occurrence.places, list(occurrence.transitions) + [reverser],
        set(occurrence.flow) | {(p, reverser) for p in occurrence.postset("b")}
        | {(reverser, p) for p in occurrence.preset("b")},
        occurrence.inhibit, occurrence.initial_marking)
    after_b = fire(occurrence, occurrence.initial_marking, ["b"])
    after_bc = fire(occurrence, after_b, ["c"])
    on_live_before = step_enabled(occurrence, after_b, [reverser])
    on_live_after = step_enabled(occurrence, after_bc, [reverser])

    structure = ReversiblePes(pcn_to_ppes(causal), ["b"], [("b", "b")])
    net, partition = rpes_to_rcn(structure)
    rcn_after_b = fire(net, net.initial_marking, ["b"])
    rcn_after_bc = fire(net, rcn_after_b, ["c"])
    rcn_live_before = step_enabled(net, rcn_after_b, [reverser])
    rcn_live_after = step_enabled(net, rcn_after_bc, [reverser])

    passed = on_live_before and not on_live_after and rcn_live_before and rcn_live_after
    return _verdict("out-of-order-reversal", "fixture:small_causal.net", (net, partition), passed,
                    occurrence_reverser_enabled_after_b=on_live_before,
                    occurrence_reverser_enabled_after_bc=on_live_after,
                    rcn_reverser_enabled_after_b=rcn_live_before,
                    rcn_reverser_enabled_after_bc=rcn_live_after)
