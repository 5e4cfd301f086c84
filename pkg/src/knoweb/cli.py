"""Command-line entry point.

Subcommands cover the pipeline: check, build, shortcuts, usability, stats,
fmt. Diagnostics go to stderr, results to stdout. Exit codes: 0 clean or
warnings only, 1 validation errors, 2 usage or I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .analysis import (
    AnalysisError,
    ShortcutPath,
    complete_inverses,
    find_shortcuts,
    graph_stats,
    strategy_usability,
    usability_closure,
)
from .model import Diagnostic, KnowledgeGraph, NodeId, has_errors, sort_diagnostics
from .parser import (
    elaborate_draft,
    load_knowledge_base,
    parse_source,
    serialize_nodes,
)
from .site import SiteError, emit_site
from .validate import run_checks


def _print_diagnostics(diagnostics) -> None:
    for diagnostic in diagnostics:
        print(diagnostic.render(), file=sys.stderr)


def _check_directory(path: str) -> Path:
    root = Path(path)
    if not root.is_dir():
        raise OSError(f"{path} is not a directory")
    return root


def _load_checked(path: str) -> tuple[KnowledgeGraph, list[Diagnostic]]:
    root = _check_directory(path)
    graph, diagnostics = load_knowledge_base(root)
    graph, more = run_checks(graph)
    return graph, sort_diagnostics(diagnostics + more)


def cmd_check(args: argparse.Namespace) -> int:
    _, diagnostics = _load_checked(args.directory)
    _print_diagnostics(diagnostics)
    return 1 if has_errors(diagnostics) else 0


def cmd_build(args: argparse.Namespace) -> int:
    graph, diagnostics = _load_checked(args.directory)
    _print_diagnostics(diagnostics)
    if has_errors(diagnostics):
        return 1
    graph, added = complete_inverses(graph)
    manifest, warnings = emit_site(
        graph, Path(args.output), base_url=args.base_url
    )
    _print_diagnostics(warnings)
    print(
        f"built {len(manifest.pages)} node pages and {len(manifest.assets)} "
        f"shared files into {args.output} ({added} inverse links completed)"
    )
    return 0


def _refuse_on_errors(args: argparse.Namespace) -> tuple[Optional[KnowledgeGraph], int]:
    graph, diagnostics = _load_checked(args.directory)
    _print_diagnostics(diagnostics)
    if has_errors(diagnostics):
        return None, 1
    return graph, 0


def format_path(path: ShortcutPath) -> str:
    parts = [str(path.node_sequence()[0])]
    for _, direction, target in path.edges:
        parts.append(f"-{direction}->")
        parts.append(str(target))
    return f"{path.classification.value} length={path.length} " + " ".join(parts)


def cmd_shortcuts(args: argparse.Namespace) -> int:
    graph, code = _refuse_on_errors(args)
    if graph is None:
        return code
    graph, _ = complete_inverses(graph)
    try:
        start = NodeId.parse(args.start)
        goal = NodeId.parse(args.goal)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        paths = find_shortcuts(graph, start, goal, max_len=args.max_len)
    except AnalysisError as err:
        print(err.diagnostic.render(), file=sys.stderr)
        return 1
    for path in paths:
        print(format_path(path))
    return 0


def cmd_usability(args: argparse.Namespace) -> int:
    graph, code = _refuse_on_errors(args)
    if graph is None:
        return code
    primitives = set(graph.manifest.primitives)
    for raw in args.primitive or []:
        try:
            primitives.add(NodeId.parse(raw))
        except ValueError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
    try:
        labeling = usability_closure(graph, primitives)
    except AnalysisError as err:
        print(err.diagnostic.render(), file=sys.stderr)
        return 1
    for node_id in sorted(labeling.solvable, key=str):
        print(f"solvable {node_id}")
    for node_id in sorted(labeling.usable, key=str):
        print(f"usable {node_id}")
    for node_id in sorted(strategy_usability(graph), key=str):
        print(f"strategy-usable {node_id}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    graph, code = _refuse_on_errors(args)
    if graph is None:
        return code
    print(graph_stats(graph).render_text())
    return 0


def cmd_fmt(args: argparse.Namespace) -> int:
    root = _check_directory(args.directory)
    found_errors = False
    for file_path in sorted(root.rglob("*.knb"), key=lambda p: p.relative_to(root).as_posix()):
        relpath = file_path.relative_to(root).as_posix()
        text = file_path.read_bytes().decode("utf-8", errors="replace")
        drafts, diagnostics = parse_source(text, file=relpath)
        nodes = []
        seen = set()
        for draft in drafts:
            node, more = elaborate_draft(draft)
            diagnostics += more
            if node.id in seen:
                diagnostics.append(
                    Diagnostic(
                        "E105",
                        f"duplicate id {node.id} in this file",
                        file=relpath,
                        line=draft.location.line,
                        node=node.id,
                    )
                )
                continue
            seen.add(node.id)
            nodes.append(node)
        _print_diagnostics(sort_diagnostics(diagnostics))
        if has_errors(diagnostics):
            found_errors = True
            continue
        formatted = serialize_nodes(nodes)
        if formatted != text:
            file_path.write_text(formatted, encoding="utf-8")
            print(relpath)
    return 1 if found_errors else 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knoweb",
        description="Compile plain-text knowledge bases into a static site.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="parse and validate a knowledge base")
    check.add_argument("directory")
    check.set_defaults(handler=cmd_check)

    build = commands.add_parser("build", help="validate, complete inverses, emit the site")
    build.add_argument("directory")
    build.add_argument("-o", "--output", required=True)
    build.add_argument("--base-url", default=None)
    build.set_defaults(handler=cmd_build)

    shortcuts = commands.add_parser("shortcuts", help="find gen/spec paths between two nodes")
    shortcuts.add_argument("directory")
    shortcuts.add_argument("start")
    shortcuts.add_argument("goal")
    shortcuts.add_argument("--max-len", type=int, default=4)
    shortcuts.set_defaults(handler=cmd_shortcuts)

    usability = commands.add_parser("usability", help="compute the solvable/usable closure")
    usability.add_argument("directory")
    usability.add_argument("--primitive", action="append", default=[])
    usability.set_defaults(handler=cmd_usability)

    stats = commands.add_parser("stats", help="summary statistics for a knowledge base")
    stats.add_argument("directory")
    stats.set_defaults(handler=cmd_stats)

    fmt = commands.add_parser("fmt", help="rewrite files in canonical form")
    fmt.add_argument("directory")
    fmt.set_defaults(handler=cmd_fmt)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except SiteError as err:
        print(err.diagnostic.render(), file=sys.stderr)
        return 2 if err.diagnostic.code == "E503" else 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
