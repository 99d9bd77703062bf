"""
Reversible Nets CLI
Validate, convert, enumerate, fire, compare and render event structures and
inhibitor nets, and run the seeded theorem harness
"""

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union
import logging

from dotenv import load_dotenv

from analysis import THEOREMS, TheoremHarness
from dot_export import es_to_dot, net_to_dot
from errors import (
    AmbiguousPartitionError, ClassMismatchError, InvalidNetError, ModelError, ModelParseError,
    NotEnabledError, SamplingBudgetExceeded, UnknownNameError,
)
from event_structure import (
    ConfigurationSet, EventStructureCore, ReversiblePes, configurations_ppes, configurations_rpes, is_pes,
    validate_ppes, validate_rpes,
)
from inhibitor_net import (
    EquivalenceVerdict, Marking, distinguishing_states, enabled_steps, explain_disabled, explore_states, fire,
    net_equiv, reachable_markings, sorted_multisets,
)
from model_format import ParsedEs, ParsedNet, load_model, serialize_es, serialize_net
from net_classes import BackwardPartition, configurations_net, infer_backward_partition, recognize
from net_encodings import CONVERSIONS
from reports import ValidationReport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_NOT_ENABLED = 3
EXIT_THEOREM = 4

Parsed = Union[ParsedEs, ParsedNet]


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    if verbose:
        level = "DEBUG"
    elif quiet:
        level = "ERROR"
    else:
        level = os.getenv("REVNETS_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(format='%(levelname)s: %(message)s')
    logging.getLogger().setLevel(getattr(logging, level, logging.WARNING))


def _emit(text: str, output: Optional[str] = None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(payload) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _format_set(items: Sequence[str]) -> str:
    return "{" + ",".join(items) + "}"


def _partition_of(parsed: ParsedNet) -> Optional[BackwardPartition]:
    if parsed.kind != "rcn":
        return None
    return parsed.partition() or infer_backward_partition(parsed.net)


def _validate_es(parsed: ParsedEs) -> ValidationReport:
    structure = parsed.structure
    if isinstance(structure, ReversiblePes):
        return validate_rpes(structure)
    report = validate_ppes(structure)
    if parsed.kind == "pes":
        report.subject = "pes"
        report.check("conflict-hereditary", is_pes(structure), detail="conflict must be inherited along causality")
    return report


def _reject_invalid_es(parsed: Parsed) -> bool:
    """Print the summary of an event structure that fails validation; nets pass through"""
    if not isinstance(parsed, ParsedEs):
        return False
    report = _validate_es(parsed)
    if report.valid:
        return False
    print(report.summary(), file=sys.stderr)
    return True


def cmd_validate(args) -> int:
    parsed = load_model(args.path)
    if isinstance(parsed, ParsedEs):
        report = _validate_es(parsed)
        valid, summary = report.valid, report.summary()
    else:
        report = recognize(parsed.net, parsed.kind, _partition_of(parsed))
        valid, summary = report.member, report.summary()
    if args.json:
        _emit_json(report.model_dump())
    else:
        print(summary)
    return EXIT_OK if valid else EXIT_INVALID


def cmd_convert(args) -> int:
    parsed = load_model(args.path)
    conversion = CONVERSIONS.get((parsed.kind, args.to))
    if conversion is None:
        targets = sorted(dst for src, dst in CONVERSIONS if src == parsed.kind)
        raise ClassMismatchError(f"Cannot convert {parsed.kind} to {args.to}; "
                                 f"available targets: {', '.join(targets) or 'none'}")
    if _reject_invalid_es(parsed):
        return EXIT_INVALID
    if isinstance(parsed, ParsedEs):
        result = conversion(parsed.structure)
    else:
        partition = _partition_of(parsed)
        report = recognize(parsed.net, parsed.kind, partition)
        if not report.member:
            print(report.summary(), file=sys.stderr)
            return EXIT_INVALID
        result = conversion(parsed.net, partition) if parsed.kind == "rcn" else conversion(parsed.net)

    if isinstance(result, tuple):
        net, partition = result
        text = serialize_net(net, args.to, sorted(partition.backward))
    elif isinstance(result, (EventStructureCore, ReversiblePes)):
        text = serialize_es(result, args.to)
    else:
        text = serialize_net(result, args.to)
    _emit(text, args.output)
    return EXIT_OK


def configurations_of(parsed: Parsed) -> ConfigurationSet:
    if isinstance(parsed, ParsedEs):
        structure = parsed.structure
        if isinstance(structure, ReversiblePes):
            return configurations_rpes(structure)
        return configurations_ppes(structure)
    return configurations_net(parsed.net, parsed.kind, _partition_of(parsed))


def cmd_configs(args) -> int:
    parsed = load_model(args.path)
    if _reject_invalid_es(parsed):
        return EXIT_INVALID
    configurations = configurations_of(parsed)
    if args.json:
        _emit_json(configurations.as_lists())
    else:
        for configuration in configurations.sorted():
            print(_format_set(configuration))
    return EXIT_OK


def _load_net(path: str) -> ParsedNet:
    parsed = load_model(path)
    if not isinstance(parsed, ParsedNet):
        raise ClassMismatchError(f"{path} holds an event structure; this command needs a net")
    return parsed


def cmd_states(args) -> int:
    exploration = explore_states(_load_net(args.path).net, args.depth)
    found = sorted_multisets(exploration.states)
    if args.json:
        _emit_json({"exhaustive": exploration.exhaustive, "depth": exploration.depth,
                    "states": [state.to_list() for state in found]})
    else:
        for state in found:
            print(repr(state))
        if not exploration.exhaustive:
            print(f"# bounded at depth {exploration.depth}", file=sys.stderr)
    return EXIT_OK


def cmd_reach(args) -> int:
    markings = sorted_multisets(reachable_markings(_load_net(args.path).net, args.steps))
    if args.json:
        _emit_json([marking.to_list() for marking in markings])
    else:
        for marking in markings:
            print(repr(marking))
    return EXIT_OK


def parse_step(text: str) -> List[str]:
    """`a`, `~b` or `{a c}` (commas allowed) to a list of transition names"""
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        return text[1:-1].replace(",", " ").split()
    return [text] if text else []


def parse_script(script: str) -> List[List[str]]:
    return [parse_step(part) for part in script.split(";") if part.strip()]


def _run_script(net, steps: List[List[str]], as_json: bool) -> int:
    marking: Marking = net.initial_marking
    transcript = [{"step": [], "marking": marking.to_list()}]
    if not as_json:
        print(f"initial: {marking!r}")
    for step in steps:
        marking = fire(net, marking, step)
        transcript.append({"step": sorted(step), "marking": marking.to_list()})
        if not as_json:
            print(f"{_format_set(sorted(step))} -> {marking!r}")
    if as_json:
        _emit_json(transcript)
    return EXIT_OK


def _run_interactive(net, input_fn: Callable[[str], str]) -> int:
    marking: Marking = net.initial_marking
    while True:
        print(f"marking: {marking!r}")
        options = enabled_steps(net, marking, 1)
        if not options:
            print("no enabled transitions")
            return EXIT_OK
        for number, step in enumerate(options, start=1):
            print(f"  {number}. {_format_set(sorted(step))}")
        try:
            choice = input_fn("step (number or name, q to quit): ").strip()
        except EOFError:
            return EXIT_OK
        if choice in ("", "q", "quit"):
            return EXIT_OK
        if choice.isdigit() and 1 <= int(choice) <= len(options):
            step = sorted(options[int(choice) - 1])
        else:
            step = parse_step(choice)
        try:
            reason = explain_disabled(net, marking, step)
        except UnknownNameError as e:
            print(f"❌ {e}")
            continue
        if reason is not None:
            clause, places = reason
            print(f"❌ {_format_set(step)} not enabled: {clause} {_format_set(places)}")
            continue
        marking = fire(net, marking, step)


def cmd_fire(args, input_fn: Callable[[str], str] = input) -> int:
    parsed = _load_net(args.path)
    if parsed.kind != "ipt":
        report = recognize(parsed.net, parsed.kind, _partition_of(parsed))
        if not report.member:
            print(report.summary(), file=sys.stderr)
            return EXIT_INVALID
    if args.script is not None:
        return _run_script(parsed.net, parse_script(args.script), args.json)
    return _run_interactive(parsed.net, input_fn)


def cmd_equiv(args) -> int:
    first, second = load_model(args.first), load_model(args.second)
    if _reject_invalid_es(first) or _reject_invalid_es(second):
        return EXIT_INVALID
    if isinstance(first, ParsedNet) and isinstance(second, ParsedNet):
        verdict = net_equiv(first.net, second.net, args.depth)
        witnesses = []
        if verdict == EquivalenceVerdict.DIFFERENT:
            witnesses = [state.to_list() for state in distinguishing_states(first.net, second.net, args.depth)]
    elif isinstance(first, ParsedEs) and isinstance(second, ParsedEs):
        left, right = configurations_of(first), configurations_of(second)
        verdict = EquivalenceVerdict.EQUAL if left == right else EquivalenceVerdict.DIFFERENT
        witnesses = [list(c) for c in left.symmetric_difference(right)]
    else:
        raise ClassMismatchError("equiv compares two event structures or two nets")
    if args.json:
        _emit_json({"verdict": verdict.value, "distinguishing": witnesses})
    else:
        print(verdict.value)
        if witnesses:
            print(f"distinguishing: {_format_set(witnesses[0])}")
    return EXIT_OK if verdict == EquivalenceVerdict.EQUAL else EXIT_INVALID


def cmd_check_theorems(args) -> int:
    harness = TheoremHarness(seed=args.seed, count=args.count, max_events=args.max_events,
                             theorems=args.theorem or THEOREMS)
    report = harness.run()
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        for verdict in report.verdicts:
            print(verdict.line())
        summary = harness.summarize()
        print(summary.to_string(index=False))
    return EXIT_OK if report.passed else EXIT_THEOREM


def cmd_dot(args) -> int:
    parsed = load_model(args.path)
    if isinstance(parsed, ParsedEs):
        text = es_to_dot(parsed.structure)
    else:
        text = net_to_dot(parsed.net, _partition_of(parsed), name=Path(args.path).stem)
    if args.json and not args.output:
        _emit_json({"dot": text})
    else:
        _emit(text, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revnets",
                                     description='Reversible event structures and inhibitor nets')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='Log at DEBUG level')
    verbosity.add_argument('--quiet', action='store_true', help='Only log errors')
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", help="Check the axioms or class of a model")
    validate.add_argument("path")
    validate.add_argument("--json", action="store_true")
    validate.set_defaults(handler=cmd_validate)

    convert = commands.add_parser("convert", help="Translate a model into another kind")
    convert.add_argument("path")
    convert.add_argument("--to", required=True, help="Target kind (pcn, cn, ppes, pes, rcn, rpes, on)")
    convert.add_argument("-o", "--output", help="Output file (default: stdout)")
    convert.set_defaults(handler=cmd_convert)

    configs = commands.add_parser("configs", help="List configurations")
    configs.add_argument("path")
    configs.add_argument("--json", action="store_true")
    configs.set_defaults(handler=cmd_configs)

    states_cmd = commands.add_parser("states", help="List the states of a net")
    states_cmd.add_argument("path")
    states_cmd.add_argument("--depth", type=int, default=None,
                            help="Execution length bound (default: exact closure or 2|T|+2)")
    states_cmd.add_argument("--json", action="store_true")
    states_cmd.set_defaults(handler=cmd_states)

    reach = commands.add_parser("reach", help="List reachable markings of a net")
    reach.add_argument("path")
    reach.add_argument("--steps", type=int, default=1, help="Largest step size to explore")
    reach.add_argument("--json", action="store_true")
    reach.set_defaults(handler=cmd_reach)

    fire_cmd = commands.add_parser("fire", help="Fire steps from a script or interactively")
    fire_cmd.add_argument("path")
    fire_cmd.add_argument("--script", help="Steps separated by ';', e.g. 'a;{b c};~b'")
    fire_cmd.add_argument("--json", action="store_true")
    fire_cmd.set_defaults(handler=cmd_fire)

    equiv = commands.add_parser("equiv", help="Compare two models")
    equiv.add_argument("first")
    equiv.add_argument("second")
    equiv.add_argument("--depth", type=int, default=None)
    equiv.add_argument("--json", action="store_true")
    equiv.set_defaults(handler=cmd_equiv)

    check = commands.add_parser("check-theorems", help="Run the correspondence checks")
    check.add_argument("--seed", type=int, default=int(os.getenv("REVNETS_SEED", "0")))
    check.add_argument("--count", type=int, default=int(os.getenv("REVNETS_INSTANCE_COUNT", "200")))
    check.add_argument("--max-events", type=int, default=int(os.getenv("REVNETS_MAX_EVENTS", "5")))
    check.add_argument("--theorem", action="append", choices=THEOREMS,
                       help="Restrict to one theorem (repeatable)")
    check.add_argument("--json", action="store_true")
    check.set_defaults(handler=cmd_check_theorems)

    dot = commands.add_parser("dot", help="Render a model as Graphviz DOT")
    dot.add_argument("path")
    dot.add_argument("-o", "--output", help="Output file (default: stdout)")
    dot.add_argument("--json", action="store_true")
    dot.set_defaults(handler=cmd_dot)
    return parser


def main(argv: Optional[Sequence[str]] = None, input_fn: Callable[[str], str] = input) -> int:
    """Run one command and return its exit code"""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        if args.command == "fire":
            return cmd_fire(args, input_fn)
        return args.handler(args)
    except NotEnabledError as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_ENABLED
    except (ModelParseError, InvalidNetError, UnknownNameError, AmbiguousPartitionError, FileNotFoundError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except SamplingBudgetExceeded as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_THEOREM
    except ModelError as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        # unsupported file extension or bad option values
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
