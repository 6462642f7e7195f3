"""
Main CLI entry point for splitkit.

Provides sub-commands that load a scenario file, run one pipeline stage and
print a JSON report (or DOT text) on standard output.

Exit codes: 0 success or criterion met, 1 criterion failed or check not
passed, 2 input error.
"""
import argparse
import json
import random
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .automorphisms import dehn_twist
from .common.cli_common import (
    create_common_parser,
    emit_json,
    emit_text,
    resolve_log_level,
    resolve_settings,
    validate_args,
)
from .common.config import get_config_path, load_config, update_config
from .common.errors import NormalizationError, ScenarioError, SplitkitError
from .common.logging_common import setup_logging
from .dot_export import Overlay, export_dot, resolve_overlays
from .engine import (
    amalgam_renaming,
    amalgamate,
    chain_problems,
    check_criterion,
    mod_witness,
    rename_tuple,
)
from .graph_of_groups import eval_normal_form, find_pinch, normal_form, validate_normalized
from .minimal import blocks, minimal_subgraph, sandwich_decompose
from .scenario import Scenario, load_scenario, scenario_to_dict
from .words import parse_word, product

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def _build_parser() -> argparse.ArgumentParser:
    common = create_common_parser()
    parser = argparse.ArgumentParser(
        description="splitkit - independence over a free factor via graphs of groups",
        prog="splitkit",
    )
    subparsers = parser.add_subparsers(
        dest='command',
        help='Available commands',
        title='Commands',
        description='Choose which stage to run',
    )

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text, parents=[common])
        if name != 'config':
            sub.add_argument('scenario', type=str, help='Scenario JSON file')
        return sub

    add('validate', 'Check that the decomposition is normalized')
    add('minsub', 'Minimal subgraph of A together with a tuple').add_argument('tuple', type=str)
    add('blocks', 'Blocks of A together with a tuple').add_argument('tuple', type=str)
    for name, help_text in (('check', 'Decide the envelope-intersection criterion'),
                            ('certify', 'Build and verify a chain certificate')):
        sub = add(name, help_text)
        sub.add_argument('first', type=str, help='Name of the first tuple (b)')
        sub.add_argument('second', type=str, help='Name of the second tuple (c)')

    twist = add('twist', 'Apply a Dehn twist to a word')
    twist.add_argument('edge', type=str)
    twist.add_argument('power', type=int)
    twist.add_argument('word', type=str)

    witness = add('witness', 'Build an automorphism fixing A and c that agrees with theta on b')
    witness.add_argument('first', type=str, help='Name of the tuple b')
    witness.add_argument('second', type=str, help='Name of the tuple c')
    witness.add_argument('--twist', action='append', default=[], metavar='EDGE=POWER',
                         help='Dehn twist factor of theta (repeatable, rightmost applied first)')
    witness.add_argument('--conjugator', type=str, default='', help='Global conjugator of theta')

    add('amalgamate', 'Glue a second decomposition along the shared F_A-subgraph').add_argument(
        'other', type=str, help='Second scenario file')

    dot = add('dot', 'Render the decomposition as DOT')
    dot.add_argument('--overlay', action='append', default=[], metavar='NAME',
                     help='Highlight a tuple, blocks:TUPLE or fa (repeatable)')
    dot.add_argument('--vertex-group', type=str, help='Render the folded automaton of a vertex group instead')

    selfcheck = add('selfcheck', 'Seeded normal-form and sandwich checks on random words')
    selfcheck.add_argument('--samples', type=int, help='Number of random words')
    selfcheck.add_argument('--max-length', type=int, help='Longest random word')

    add('config', 'Write the given settings to the config file, or print the config')
    return parser


class _Context:
    """Loaded scenario plus effective settings for one invocation."""

    def __init__(self, args, config: dict):
        self.args = args
        self.config = config
        self.scenario: Optional[Scenario] = None
        if getattr(args, 'scenario', None):
            self.scenario = load_scenario(args.scenario)
        options = self.scenario.options if self.scenario else {}
        self.settings = resolve_settings(args, config, options)
        self.indent = config.get("json_indent", 2)

    @property
    def graph(self):
        return self.scenario.graph

    def gens(self, tuple_name: str) -> List[str]:
        return list(self.scenario.params) + list(self.scenario.tuple(tuple_name))

    def emit(self, data) -> None:
        emit_json(data, self.indent)

    def emit_dot(self, overlays: Sequence[Overlay]) -> None:
        emit_text(export_dot(self.graph, overlays, name=self.scenario.name or "splitkit"))


# ─── Commands ─────────────────────────────────────────────────────────────────

def _cmd_validate(ctx: _Context) -> int:
    report = validate_normalized(ctx.graph)
    ctx.emit(report.to_dict())
    return EXIT_OK if report.ok else EXIT_FAILED


def _cmd_minsub(ctx: _Context) -> int:
    subgraph = minimal_subgraph(ctx.graph, ctx.gens(ctx.args.tuple))
    if ctx.args.format == 'dot':
        ctx.emit_dot([Overlay(ctx.args.tuple, subgraph)])
    else:
        ctx.emit({"tuple": ctx.args.tuple, "subgraph": subgraph.to_dict()})
    return EXIT_OK


def _cmd_blocks(ctx: _Context) -> int:
    saturation = ctx.settings["saturation"]
    found = blocks(ctx.graph, ctx.gens(ctx.args.tuple), saturation)
    if ctx.args.format == 'dot':
        ctx.emit_dot([Overlay(block.id, block.subgraph) for block in found])
    else:
        ctx.emit({"tuple": ctx.args.tuple, "saturation": saturation,
                  "blocks": [block.to_dict() for block in found]})
    return EXIT_OK


def _criterion_inputs(ctx: _Context) -> Tuple:
    scenario = ctx.scenario
    return (ctx.graph, scenario.params, scenario.tuple(ctx.args.first), scenario.tuple(ctx.args.second),
            ctx.settings["saturation"], ctx.settings["envelope_disjointness"])


def _cmd_check(ctx: _Context) -> int:
    verdict = check_criterion(*_criterion_inputs(ctx))
    if ctx.args.format == 'dot':
        names = [f"blocks:{ctx.args.first}", f"blocks:{ctx.args.second}"]
        ctx.emit_dot(resolve_overlays(ctx.scenario, names, ctx.settings["saturation"]))
    else:
        ctx.emit(verdict.to_dict())
    return EXIT_OK if verdict.criterion_met else EXIT_FAILED


def _cmd_certify(ctx: _Context) -> int:
    verdict = check_criterion(*_criterion_inputs(ctx))
    if not verdict.criterion_met:
        ctx.emit({"status": "criterion_failed", "verdict": verdict.to_dict(), "certificate": None})
        return EXIT_FAILED
    cert = verdict.certificate
    if cert is None:
        ctx.emit({"status": "stalled", "verdict": verdict.to_dict(), "certificate": None})
        return EXIT_FAILED
    problems = chain_problems(ctx.graph, cert, ctx.settings["envelope_disjointness"])
    ctx.emit({
        "status": "certified" if not problems else "invalid",
        "verified": not problems,
        "problems": problems,
        "certificate": cert.to_dict(),
    })
    return EXIT_OK if not problems else EXIT_FAILED


def _cmd_twist(ctx: _Context) -> int:
    word = parse_word(ctx.args.word, ctx.graph.basis)
    tau = dehn_twist(ctx.graph, ctx.args.edge, ctx.args.power)
    ctx.emit({
        "edge": ctx.args.edge,
        "power": ctx.args.power,
        "word": word,
        "image": tau.apply(word),
        "automorphism": tau.to_dict(),
    })
    return EXIT_OK


def _parse_twists(items: Sequence[str]) -> List[Tuple[str, int]]:
    twists = []
    for item in items:
        edge, sep, power = item.partition('=')
        try:
            if not sep or not edge:
                raise ValueError(item)
            twists.append((edge, int(power)))
        except ValueError:
            raise ScenarioError(f"expected EDGE=POWER, got {item!r}", "--twist") from None
    return twists


def _cmd_witness(ctx: _Context) -> int:
    graph, params, b, c, saturation, mode = _criterion_inputs(ctx)
    twists = _parse_twists(ctx.args.twist)
    conjugator = parse_word(ctx.args.conjugator, graph.basis)
    alpha = mod_witness(graph, params, b, c, twists, conjugator, saturation, mode)
    report = {"twists": [{"edge": e, "power": k} for e, k in twists], "conjugator": conjugator,
              "witness": None}
    if alpha is not None:
        report["witness"] = alpha.to_dict()
        report["images"] = {"b": [alpha.apply(w) for w in b], "c": [alpha.apply(w) for w in c]}
    ctx.emit(report)
    return EXIT_OK if alpha is not None else EXIT_FAILED


def _cmd_amalgamate(ctx: _Context) -> int:
    other = load_scenario(ctx.args.other)
    first, second = ctx.scenario, other
    renaming = amalgam_renaming(first.graph, second.graph)
    graph = amalgamate(first.graph, second.graph)
    tuples = dict(first.tuples)
    for key, words in second.tuples.items():
        tuples[f"{key}'"] = tuple(rename_tuple(words, renaming))
    merged = Scenario(graph, first.params, tuples, dict(first.options), first.name)
    ctx.emit({"scenario": scenario_to_dict(merged), "renaming": renaming})
    return EXIT_OK


def _cmd_dot(ctx: _Context) -> int:
    if ctx.args.vertex_group:
        vertex = ctx.graph.vertex(ctx.args.vertex_group)
        emit_text(vertex.group.to_dot(vertex.id))
        return EXIT_OK
    ctx.emit_dot(resolve_overlays(ctx.scenario, ctx.args.overlay, ctx.settings["saturation"]))
    return EXIT_OK


def _random_word(rng: random.Random, basis: Sequence[str], max_length: int) -> str:
    letters = list(basis) + [x.upper() for x in basis]
    return product(*(rng.choice(letters) for _ in range(rng.randint(0, max_length))))


def _cmd_selfcheck(ctx: _Context) -> int:
    samples = ctx.args.samples if ctx.args.samples is not None else ctx.config.get("selfcheck_samples", 200)
    max_length = ctx.args.max_length or ctx.config.get("selfcheck_max_length", 20)
    rng = random.Random(ctx.settings["seed"])
    graph = ctx.graph
    failures = []
    for _ in range(samples):
        w = _random_word(rng, graph.basis, max_length)
        nf = normal_form(graph, w)
        if eval_normal_form(graph, nf) != w:
            failures.append({"word": w, "check": "normal_form_roundtrip"})
        if find_pinch(graph, nf) is not None:
            failures.append({"word": w, "check": "pinch_free"})
        try:
            terms = sandwich_decompose(graph, w)
        except NormalizationError as exc:
            failures.append({"word": w, "check": "sandwich", "error": str(exc)})
            continue
        if product(*(t.word for t in terms)) != w:
            failures.append({"word": w, "check": "sandwich_product"})
    ctx.emit({"seed": ctx.settings["seed"], "samples": samples, "max_length": max_length,
              "ok": not failures, "failures": failures})
    return EXIT_OK if not failures else EXIT_FAILED


def _cmd_config(ctx: _Context) -> int:
    path = ctx.args.config or get_config_path()
    args = ctx.args
    changed = update_config(
        path,
        saturation=args.saturation,
        envelope_disjointness=args.envelope_disjointness,
        seed=args.seed,
        log_level=args.log_level,
    )
    if changed:
        print(f"Config updated: {path}")
    else:
        ctx.emit({"path": path, "config": load_config(path)})
    return EXIT_OK


COMMANDS: Dict[str, Callable[[_Context], int]] = {
    'validate': _cmd_validate,
    'minsub': _cmd_minsub,
    'blocks': _cmd_blocks,
    'check': _cmd_check,
    'certify': _cmd_certify,
    'twist': _cmd_twist,
    'witness': _cmd_witness,
    'amalgamate': _cmd_amalgamate,
    'dot': _cmd_dot,
    'selfcheck': _cmd_selfcheck,
    'config': _cmd_config,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point with subcommands."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    # Show help if no command provided
    if not args.command:
        parser.print_help()
        return EXIT_INPUT
    if not validate_args(args):
        return EXIT_INPUT

    config = load_config(args.config or get_config_path())
    setup_logging(resolve_log_level(args, config))
    try:
        ctx = _Context(args, config)
        return COMMANDS[args.command](ctx)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return EXIT_FAILED
    except json.JSONDecodeError as e:
        print(f"Error: {getattr(args, 'scenario', '')}: malformed JSON: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SplitkitError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
