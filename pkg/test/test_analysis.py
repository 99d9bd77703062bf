#!/usr/bin/env python3
"""
Test random instance generators and the theorem harness
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from types import SimpleNamespace

import numpy as np
import pytest
from pydantic import ValidationError

import analysis
from analysis import (
    FIXTURE_INSTANCES, THEOREMS, RandomInstanceSpec, TheoremHarness, TheoremVerdict, check_theorem,
    fixture_instance, generate_cn, generate_on, generate_pcn, generate_ppes, generate_rcn, generate_rpes,
    reversible_on_counterexample,
)
from errors import ClassMismatchError, InstanceMismatchError, SamplingBudgetExceeded
from event_structure import validate_ppes, validate_rpes
from fixture_library import load_net
from net_classes import is_cn, is_occurrence_net, is_pcn, is_rcn


class TestGenerators:
    """Seeded random structures and nets"""

    def test_same_seed_same_structure(self):
        spec = RandomInstanceSpec(seed=7, max_events=6)
        assert generate_ppes(spec) == generate_ppes(spec)
        assert generate_rpes(spec) == generate_rpes(spec)

    def test_explicit_generator(self):
        spec = RandomInstanceSpec(max_events=6)
        first = generate_rpes(spec, np.random.default_rng([1, 2]))
        second = generate_rpes(spec, np.random.default_rng([1, 2]))
        assert first == second

    @pytest.mark.parametrize("seed", range(5))
    def test_generated_instances_are_valid(self, seed):
        spec = RandomInstanceSpec(seed=seed, max_events=5)
        structure = generate_ppes(spec)
        assert validate_ppes(structure).valid
        assert len(structure.events) <= 5
        assert validate_rpes(generate_rpes(spec)).valid
        assert is_pcn(generate_pcn(spec)).member
        assert is_cn(generate_cn(spec)).member
        assert is_occurrence_net(generate_on(spec)).member
        net, partition = generate_rcn(spec)
        assert is_rcn(net, partition).member

    def test_zero_density_has_no_relations(self):
        spec = RandomInstanceSpec(min_events=4, max_events=4, causality_density=0.0, conflict_density=0.0)
        structure = generate_ppes(spec)
        assert structure.events == ("a", "b", "c", "d")
        assert structure.causality_pairs() == []
        assert structure.conflict_pairs() == []

    def test_spec_bounds(self):
        with pytest.raises(ValidationError):
            RandomInstanceSpec(min_events=5, max_events=2)
        with pytest.raises(ValidationError):
            RandomInstanceSpec(max_events=9)
        with pytest.raises(ValidationError):
            RandomInstanceSpec(conflict_density=1.5)

    def test_sampling_budget(self, monkeypatch):
        monkeypatch.setattr(analysis, "validate_ppes", lambda core: SimpleNamespace(valid=False))
        with pytest.raises(SamplingBudgetExceeded):
            generate_ppes(RandomInstanceSpec(max_attempts=3))


class TestTheoremChecks:
    """Single checks on bundled fixtures"""

    @pytest.mark.parametrize("theorem,name", [(t, n) for t, names in FIXTURE_INSTANCES.items() for n in names])
    def test_fixture_passes(self, theorem, name):
        verdict = check_theorem(theorem, fixture_instance(name, theorem), f"fixture:{name}")
        assert verdict.passed, verdict.details
        assert verdict.counterexample is None

    def test_out_of_order_reversal(self):
        verdict = reversible_on_counterexample()
        assert verdict.passed
        assert verdict.details == {
            "occurrence_reverser_enabled_after_b": True,
            "occurrence_reverser_enabled_after_bc": False,
            "rcn_reverser_enabled_after_b": True,
            "rcn_reverser_enabled_after_bc": True,
        }

    def test_wrong_instance_kind(self):
        with pytest.raises(InstanceMismatchError):
            check_theorem("ppes-pcn-configurations", load_net("causal.net").net)
        with pytest.raises(InstanceMismatchError):
            check_theorem("pes-on-configurations", load_net("inhibitor_intro.net").net)

    def test_unknown_theorem(self):
        with pytest.raises(ValueError, match="Unknown theorem"):
            check_theorem("no-such-theorem", load_net("causal.net").net)

    def test_model_error_becomes_failing_verdict(self, monkeypatch):
        def broken(*args, **kwargs):
            raise ClassMismatchError("not a pcn")

        monkeypatch.setattr(analysis, "configurations_net", broken)
        structure = fixture_instance("non_hereditary.es", "ppes-pcn-configurations")
        verdict = check_theorem("ppes-pcn-configurations", structure, "fixture:non_hereditary.es")
        assert not verdict.passed
        assert verdict.details["error"] == "not a pcn"
        assert verdict.counterexample.kind == "ppes"
        assert verdict.counterexample.model.startswith("kind: ppes\n")

    def test_failing_verdict_needs_counterexample(self):
        with pytest.raises(ValidationError):
            TheoremVerdict(theorem="pes-cn-roundtrip", instance="random:pes:0", passed=False)
        assert TheoremVerdict(theorem="pes-cn-roundtrip", instance="random:pes:0", passed=True).line() == \
            "PASS pes-cn-roundtrip random:pes:0"


class TestHarness:
    """Seeded runs over fixtures and random instances"""

    def test_small_run(self):
        harness = TheoremHarness(seed=3, count=2, max_events=3, theorems=["ppes-pcn-configurations"])
        report = harness.run()
        assert report.passed
        labels = [v.instance for v in report.verdicts]
        assert labels[:5] == [f"fixture:{name}" for name in FIXTURE_INSTANCES["ppes-pcn-configurations"]]
        assert labels[5:7] == ["random:ppes:0", "random:ppes:1"]
        assert report.verdicts[-1].theorem == "out-of-order-reversal"

    def test_random_only(self):
        harness = TheoremHarness(seed=1, count=4, max_events=4, theorems=["pes-cn-roundtrip"],
                                 include_fixtures=False)
        report = harness.run()
        assert [v.instance for v in report.verdicts] == \
            ["random:pes:0", "random:cn:1", "random:pes:2", "random:cn:3"]
        assert report.passed

    def test_report_is_deterministic(self):
        def run():
            return TheoremHarness(seed=11, count=3, max_events=4).report_json()
        assert run() == run()

    def test_summary_frame(self):
        harness = TheoremHarness(seed=0, count=2, max_events=3, theorems=["ppes-pcn-configurations"])
        summary = harness.summarize()
        assert list(summary.columns) == ["theorem", "total", "passed", "failed"]
        rows = summary.set_index("theorem")
        assert rows.loc["ppes-pcn-configurations", "total"] == 7
        assert rows.loc["ppes-pcn-configurations", "failed"] == 0
        assert rows.loc["out-of-order-reversal", "total"] == 1

    def test_every_theorem_runs(self):
        report = TheoremHarness(seed=5, count=2, max_events=4).run()
        assert {v.theorem for v in report.verdicts} == set(THEOREMS) | {"out-of-order-reversal"}
        assert report.passed

    def test_full_seeded_run(self):
        harness = TheoremHarness(seed=0, count=200, max_events=5)
        report = harness.run()
        assert report.passed, [v.line() for v in report.verdicts if not v.passed]
        summary = harness.summarize().set_index("theorem")
        for theorem in THEOREMS:
            assert summary.loc[theorem, "total"] >= 200
            assert summary.loc[theorem, "failed"] == 0

    def test_unknown_theorem(self):
        with pytest.raises(ValueError):
            TheoremHarness(theorems=["pes-cn-roundtrip", "bogus"])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
