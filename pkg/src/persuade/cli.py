"""Operator tooling.

Exit codes are a CI contract: 0 ok/accepted, 1 validation failure,
2 environment/input error, 3 dialogue ended unpersuaded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import argmodel, corpus, topicindex
from .argmodel import GraphError, load_graph
from .contextengine import ContextBase, load_rules
from .dialogue import Close, Outcome, SystemPosit, move_to_json, render_transcript
from .persona import PersonaError, PersonaIncompleteError, load_persona, run_simulation
from .strategy import StrategyConfig

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ENV = 2
EXIT_UNPERSUADED = 3


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def cmd_validate(args) -> int:
    try:
        document = _read_bytes(args.path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    try:
        graph = load_graph(document)
    except GraphError as exc:
        if args.json:
            print(json.dumps({"ok": False, "errors": [f"{type(exc).__name__}: {exc}"]}))
        else:
            print(f"{type(exc).__name__}: {exc}")
        return EXIT_INVALID
    violations = argmodel.validate(graph)
    if args.json:
        print(json.dumps({"ok": not violations, "errors": [str(v) for v in violations]}))
    else:
        for v in violations:
            print(str(v))
        if not violations:
            print(f"OK: {len(graph.arguments)} arguments, {len(graph.arcs)} arcs")
    return EXIT_INVALID if violations else EXIT_OK


def cmd_lint(args) -> int:
    try:
        document = _read_bytes(args.path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    try:
        graph = load_graph(document)
    except GraphError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    warnings = argmodel.lint(graph)
    if args.json:
        print(json.dumps(
            [{"rule": w.rule, "subject": w.subject, "message": w.message} for w in warnings]
        ))
    else:
        for w in warnings:
            print(str(w))
        print(f"{len(warnings)} warnings")
    return EXIT_OK  # lint is advisory


def cmd_index(args) -> int:
    try:
        document = _read_bytes(args.path)
        stoplist = (
            topicindex.StopList.from_file(args.stoplist)
            if args.stoplist
            else topicindex.default_stoplist()
        )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    try:
        graph = load_graph(document)
    except GraphError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    index = topicindex.build_index(graph, stoplist)
    rows = [
        {
            "keyword": kw,
            "df": len(ids),
            "score": topicindex.discriminator_score(index, kw),
        }
        for kw, ids in index.postings.items()
    ]
    rows.sort(key=lambda r: (-r["score"], r["keyword"]))
    if args.json:
        print(json.dumps(rows))
    else:
        if rows:
            width = max(len(r["keyword"]) for r in rows)
            print(f"{'keyword'.ljust(width)}  df  score")
            for r in rows:
                print(f"{r['keyword'].ljust(width)}  {r['df']:>2}  {r['score']:.4f}")
        print(f"{len(rows)} keywords over {index.total} arguments")
    return EXIT_OK


def _resolve_graph_and_rules(source: str) -> tuple:
    """A corpus entry name, or a graph-file path with an optional sidecar
    <stem>.rules file."""
    if source in corpus.ENTRY_NAMES:
        entry = corpus.load_corpus_entry(source)
        return entry.graph, entry.rules
    graph = load_graph(_read_bytes(source))
    sidecar = Path(source).with_suffix("").with_suffix(".rules")
    if sidecar.exists():
        return graph, load_rules(sidecar)
    return graph, ContextBase()


def cmd_simulate(args) -> int:
    try:
        graph, rules = _resolve_graph_and_rules(args.graph)
        persona = load_persona(args.persona)
        config = StrategyConfig.from_text(Path(args.config).read_text("utf-8")) if args.config else StrategyConfig()
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except GraphError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        state = run_simulation(graph, rules, persona, config)
    except PersonaIncompleteError as exc:
        print(f"PersonaIncomplete: {exc}", file=sys.stderr)
        return EXIT_ENV
    except PersonaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV

    rendered = render_transcript(state.transcript)
    if args.seed_transcript_out:
        Path(args.seed_transcript_out).write_text(rendered, encoding="utf-8")
    if args.json:
        sys.stdout.write(rendered)
    else:
        for entry in state.transcript:
            move = entry.move
            if isinstance(move, SystemPosit):
                line = f'posit {move.id}: "{move.text}"'
            elif isinstance(move, Close):
                line = f"close {move.outcome.value}"
            else:
                data = move_to_json(move)
                kind = data.pop("type")
                line = f"{kind} {json.dumps(data)}"
            print(f"{entry.step:3d} {entry.actor:<4} {line}")
        print(f"outcome: {state.outcome().value}")
    return EXIT_OK if state.outcome() is Outcome.ACCEPTED else EXIT_UNPERSUADED


def cmd_serve(args) -> int:
    from . import service

    port = args.port if args.port is not None else int(os.environ.get("PERSUADE_PORT", "8087"))
    data_dir = args.data_dir or os.environ.get("PERSUADE_DATA_DIR", "./persuade-data")
    try:
        service.serve(port=port, data_dir=data_dir)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persuade", description="Argument-graph tooling and dialogue runner"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a graph file against all invariants")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("lint", help="advisory structural checks on a valid graph file")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("index", help="keyword/discriminator table for a graph file")
    p.add_argument("path")
    p.add_argument("--stoplist")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("simulate", help="run a scripted dialogue against a persona")
    p.add_argument("graph", help="corpus entry name or graph-file path")
    p.add_argument("persona", help="persona JSON file")
    p.add_argument("--config", help="strategy config (key=value lines)")
    p.add_argument("--json", action="store_true", help="emit the transcript as JSON lines")
    p.add_argument("--seed-transcript-out", help="also write the JSON-lines transcript here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--port", type=int)
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
