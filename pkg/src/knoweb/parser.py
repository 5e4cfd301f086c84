"""Reader and canonical writer for `.knb` sources and `knoweb.manifest`.

The authoring format is line based. A block starts with a header
``@<kind> <id>`` and carries ``field: value`` lines; a value runs until the
next field line, header, or end of file, with folded lines joined by single
spaces. Lines whose first non-blank character is ``#`` are comments.
``name:`` may repeat on kinds that take several names. Id-list fields are
comma separated. Inline links in rich text fields are written ``[[id]]`` or
``[[id|display text]]``.

Parsing is total: every anomaly becomes a Diagnostic, nothing aborts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional
from urllib.parse import urlparse

from .model import (
    ConceptNode,
    Diagnostic,
    DomainNode,
    KnowledgeGraph,
    LinkSegment,
    Manifest,
    Node,
    NodeId,
    NodeKind,
    PatternNode,
    ProblemNode,
    RichText,
    STRATEGIES_DOMAIN_ID,
    SourceLocation,
    StrategyNode,
    sort_diagnostics,
)

MANIFEST_NAME = "knoweb.manifest"
DEFAULT_FANOUT_THRESHOLD = 12

_HEADER_RE = re.compile(r"@(\S+)(?:\s+(\S+))?\s*$")
_FIELD_RE = re.compile(r"([a-z][a-z0-9-]*):(.*)$")

# field name -> (attribute, value shape) per kind; shapes:
#   str        single string, E103 on repeat
#   strs       repeatable string (multiple names)
#   rich       single rich text, E103 on repeat
#   id         single id, E103 on repeat
#   ids        comma-separated id list, repeats concatenate
_SCHEMAS: dict[NodeKind, dict[str, tuple[str, str]]] = {
    NodeKind.CONCEPT: {
        "name": ("name", "str"),
        "definition": ("definition", "rich"),
        "generalizations": ("generalizations", "ids"),
        "specializations": ("specializations", "ids"),
        "used-in": ("used_in", "ids"),
        "problems": ("problems", "ids"),
        "domain": ("domain", "id"),
    },
    NodeKind.PROBLEM: {
        "name": ("names", "strs"),
        "description": ("description", "rich"),
        "generalizations": ("generalizations", "ids"),
        "specializations": ("specializations", "ids"),
        "motivates": ("motivates", "ids"),
        "solutions": ("solutions", "ids"),
        "domain": ("domain", "id"),
    },
    NodeKind.PATTERN: {
        "name": ("name", "str"),
        "problem": ("problem", "id"),
        "strategy": ("strategy", "id"),
        "steps": ("steps", "ids"),
        "domain": ("domain", "id"),
    },
    NodeKind.STRATEGY: {
        "name": ("names", "strs"),
        "description": ("description", "rich"),
        "generalizations": ("generalizations", "ids"),
        "specializations": ("specializations", "ids"),
        "steps": ("steps", "ids"),
        "pattern-specializations": ("pattern_specializations", "ids"),
        "domain": ("domain", "id"),
    },
    NodeKind.DOMAIN: {
        "name": ("name", "str"),
        "generalizations": ("generalizations", "ids"),
        "specializations": ("specializations", "ids"),
        "prominent-concepts": ("prominent_concepts", "ids"),
        "prominent-problems": ("prominent_problems", "ids"),
    },
}

# required at elaboration time (E107 when missing or empty)
_REQUIRED: dict[NodeKind, tuple[str, ...]] = {
    NodeKind.CONCEPT: ("name", "definition", "domain"),
    NodeKind.PROBLEM: ("description", "domain"),
    NodeKind.PATTERN: ("problem", "steps", "domain"),
    NodeKind.STRATEGY: ("description",),
    NodeKind.DOMAIN: ("name",),
}

_KIND_TOKENS = {kind.value: kind for kind in NodeKind}


@dataclass
class NodeDraft:
    """One parsed block before elaboration into a typed node."""

    kind: NodeKind
    id: NodeId
    fields: dict[str, list[tuple[str, int]]] = dc_field(default_factory=dict)
    location: SourceLocation = SourceLocation()


def parse_inline_links(
    text: str, file: str = "", line: int = 0
) -> tuple[RichText, list[Diagnostic]]:
    """Split prose into literal runs and ``[[id]]`` / ``[[id|text]]`` links.

    An unterminated ``[[`` stays literal with a W201; a marker whose id does
    not parse stays literal with an E104.
    """
    segments: list = []
    diagnostics: list[Diagnostic] = []

    def emit_literal(chunk: str) -> None:
        if not chunk:
            return
        if segments and isinstance(segments[-1], str):
            segments[-1] += chunk
        else:
            segments.append(chunk)

    pos = 0
    while True:
        start = text.find("[[", pos)
        if start < 0:
            emit_literal(text[pos:])
            break
        emit_literal(text[pos:start])
        end = text.find("]]", start + 2)
        if end < 0:
            diagnostics.append(
                Diagnostic("W201", "unterminated link marker", file, line)
            )
            emit_literal(text[start:])
            break
        body = text[start + 2 : end]
        raw_id, bar, display = body.partition("|")
        try:
            target = NodeId.parse(raw_id)
        except ValueError:
            diagnostics.append(
                Diagnostic("E104", f"malformed id in link: {raw_id!r}", file, line)
            )
            emit_literal(text[start : end + 2])
            pos = end + 2
            continue
        if not bar:
            display = target.local.replace("-", " ")
        segments.append(LinkSegment(target, display))
        pos = end + 2
    return RichText(tuple(segments)), diagnostics


def parse_source(text: str, file: str = "") -> tuple[list[NodeDraft], list[Diagnostic]]:
    """Parse one `.knb` source into drafts, skipping malformed lines."""
    drafts: list[NodeDraft] = []
    diagnostics: list[Diagnostic] = []
    current: Optional[NodeDraft] = None
    current_field: Optional[str] = None  # open field accepting continuations
    swallowing = False  # continuations of a diagnosed field line are dropped
    skipping_block = False  # after a bad header, drop lines until the next one

    text = text.lstrip("﻿")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue

        if raw.startswith("@"):
            current = None
            current_field = None
            swallowing = False
            skipping_block = False
            match = _HEADER_RE.match(raw)
            kind = _KIND_TOKENS.get(match.group(1)) if match else None
            if match is None or match.group(2) is None or kind is None:
                diagnostics.append(
                    Diagnostic(
                        "E101",
                        f"bad header line: expected `@<kind> <id>`, got {raw.strip()!r}",
                        file,
                        lineno,
                    )
                )
                skipping_block = True
                continue
            try:
                node_id = NodeId.parse(match.group(2))
                if node_id.is_external:
                    raise ValueError("node definitions must use local ids")
            except ValueError as exc:
                diagnostics.append(Diagnostic("E104", str(exc), file, lineno))
                skipping_block = True
                continue
            current = NodeDraft(kind, node_id, {}, SourceLocation(file, lineno))
            drafts.append(current)
            continue

        if skipping_block:
            continue

        field_match = _FIELD_RE.match(raw) if not raw[0].isspace() else None
        if field_match is not None:
            if current is None:
                diagnostics.append(
                    Diagnostic(
                        "E101",
                        f"field line outside any block: {stripped!r}",
                        file,
                        lineno,
                    )
                )
                continue
            name, value = field_match.group(1), field_match.group(2).strip()
            schema = _SCHEMAS[current.kind]
            if name not in schema:
                diagnostics.append(
                    Diagnostic(
                        "E102",
                        f"unknown field {name!r} for kind {current.kind.value}",
                        file,
                        lineno,
                        node=current.id,
                        field=name,
                    )
                )
                current_field = None
                swallowing = True
                continue
            shape = schema[name][1]
            if shape in ("str", "rich", "id") and name in current.fields:
                diagnostics.append(
                    Diagnostic(
                        "E103",
                        f"duplicate field {name!r}: a single value is required",
                        file,
                        lineno,
                        node=current.id,
                        field=name,
                    )
                )
                current_field = None
                swallowing = True
                continue
            current.fields.setdefault(name, []).append((value, lineno))
            current_field = name
            swallowing = False
            continue

        # continuation line
        if current is None:
            diagnostics.append(
                Diagnostic(
                    "E101",
                    f"stray line outside any block: {stripped!r}",
                    file,
                    lineno,
                )
            )
            continue
        if swallowing:
            continue
        if current_field is None:
            diagnostics.append(
                Diagnostic(
                    "E101",
                    f"continuation line without a field: {stripped!r}",
                    file,
                    lineno,
                    node=current.id,
                )
            )
            continue
        entries = current.fields[current_field]
        value, first_line = entries[-1]
        joined = f"{value} {stripped}" if value else stripped
        entries[-1] = (joined, first_line)

    return drafts, diagnostics


def _parse_id_list(
    value: str, draft: NodeDraft, name: str, line: int, file: str
) -> tuple[tuple[NodeId, ...], list[Diagnostic]]:
    ids: list[NodeId] = []
    diagnostics: list[Diagnostic] = []
    if not value.strip():
        return (), []
    for token in value.split(","):
        token = token.strip()
        try:
            ids.append(NodeId.parse(token))
        except ValueError:
            diagnostics.append(
                Diagnostic(
                    "E104",
                    f"malformed id {token!r}",
                    file,
                    line,
                    node=draft.id,
                    field=name,
                )
            )
    seen = set()
    for node_id in ids:
        if node_id in seen:
            diagnostics.append(
                Diagnostic(
                    "W108",
                    f"id {node_id} appears twice in this list",
                    file,
                    line,
                    node=draft.id,
                    field=name,
                )
            )
            break
        seen.add(node_id)
    return tuple(ids), diagnostics


def elaborate_draft(draft: NodeDraft) -> tuple[Node, list[Diagnostic]]:
    """Turn a draft into a typed node, diagnosing missing or bad values."""
    diagnostics: list[Diagnostic] = []
    file = draft.location.file
    values: dict[str, object] = {}

    for name, (attr, shape) in _SCHEMAS[draft.kind].items():
        entries = draft.fields.get(name, [])
        if shape == "strs":
            values[attr] = tuple(v for v, _ in entries if v)
        elif shape == "str":
            value = entries[0][0] if entries else ""
            values[attr] = value or (None if draft.kind is NodeKind.PATTERN else "")
        elif shape == "rich":
            if entries:
                value, line = entries[0]
                rich, more = parse_inline_links(value, file, line)
                diagnostics.extend(
                    Diagnostic(d.code, d.message, d.file, d.line, draft.id, name)
                    for d in more
                )
                values[attr] = rich
            else:
                values[attr] = RichText()
        elif shape == "id":
            parsed: Optional[NodeId] = None
            if entries and entries[0][0]:
                value, line = entries[0]
                try:
                    parsed = NodeId.parse(value)
                except ValueError:
                    diagnostics.append(
                        Diagnostic(
                            "E104",
                            f"malformed id {value!r}",
                            file,
                            line,
                            node=draft.id,
                            field=name,
                        )
                    )
            values[attr] = parsed
        else:  # ids
            ids: tuple[NodeId, ...] = ()
            for value, line in entries:
                part, more = _parse_id_list(value, draft, name, line, file)
                ids += part
                diagnostics.extend(more)
            values[attr] = ids

    if draft.kind is NodeKind.STRATEGY and values.get("domain") is None:
        if "domain" not in draft.fields:
            values["domain"] = STRATEGIES_DOMAIN_ID

    for name in _REQUIRED[draft.kind]:
        attr, shape = _SCHEMAS[draft.kind][name]
        value = values.get(attr)
        empty = (
            value is None
            or (shape == "str" and not value)
            or (shape == "rich" and value.is_empty())  # type: ignore[union-attr]
            or (shape == "ids" and not value)
        )
        if empty:
            diagnostics.append(
                Diagnostic(
                    "E107",
                    f"missing required field {name!r}",
                    file,
                    draft.location.line,
                    node=draft.id,
                    field=name,
                )
            )

    classes = {
        NodeKind.CONCEPT: ConceptNode,
        NodeKind.PROBLEM: ProblemNode,
        NodeKind.PATTERN: PatternNode,
        NodeKind.STRATEGY: StrategyNode,
        NodeKind.DOMAIN: DomainNode,
    }
    node = classes[draft.kind](id=draft.id, location=draft.location, **values)
    return node, diagnostics


# ---------------------------------------------------------------- manifest --


def parse_manifest(text: str, file: str = MANIFEST_NAME) -> tuple[Manifest, list[Diagnostic]]:
    """Parse manifest directives, skipping malformed lines with E106."""
    namespaces: dict[str, str] = {}
    primitives: set[NodeId] = set()
    threshold = DEFAULT_FANOUT_THRESHOLD
    diagnostics: list[Diagnostic] = []

    def bad(line: int, message: str) -> None:
        diagnostics.append(Diagnostic("E106", message, file, line))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if parts[0] == "namespace" and len(parts) == 3:
            token, url = parts[1], parts[2]
            if not re.fullmatch(r"[a-z0-9][a-z0-9-]*", token):
                bad(lineno, f"malformed namespace token {token!r}")
                continue
            parsed = urlparse(url)
            if not (parsed.scheme and parsed.netloc):
                bad(lineno, f"namespace URL must be absolute: {url!r}")
                continue
            if token in namespaces:
                bad(lineno, f"duplicate namespace {token!r} (keeping the first)")
                continue
            namespaces[token] = url
        elif parts[0] == "primitive" and len(parts) == 2:
            try:
                primitives.add(NodeId.parse(parts[1]))
            except ValueError:
                bad(lineno, f"malformed primitive id {parts[1]!r}")
        elif parts[0] == "fanout-threshold" and len(parts) == 2:
            if parts[1].isdigit() and int(parts[1]) > 0:
                threshold = int(parts[1])
            else:
                bad(lineno, f"fanout-threshold must be a positive integer, got {parts[1]!r}")
        else:
            bad(lineno, f"unrecognized manifest line: {stripped!r}")

    manifest = Manifest(namespaces, frozenset(primitives), threshold)
    return manifest, diagnostics


# -------------------------------------------------------------------- load --


def load_knowledge_base(root: Path) -> tuple[KnowledgeGraph, list[Diagnostic]]:
    """Load the manifest and every `*.knb` under ``root``.

    Files are read in lexicographic path order; duplicate ids keep the first
    occurrence (E105). The result is deterministic for identical trees and
    invariant under moving blocks between files.
    """
    root = Path(root)
    diagnostics: list[Diagnostic] = []

    manifest_path = root / MANIFEST_NAME
    if manifest_path.is_file():
        try:
            manifest_text = manifest_path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            diagnostics.append(
                Diagnostic("E106", f"unreadable manifest: {exc}", MANIFEST_NAME, 0)
            )
            manifest = Manifest()
        else:
            manifest, more = parse_manifest(manifest_text, MANIFEST_NAME)
            diagnostics.extend(more)
    else:
        diagnostics.append(
            Diagnostic("W106", "no knoweb.manifest found; using defaults", MANIFEST_NAME, 0)
        )
        manifest = Manifest()

    nodes: dict[NodeId, Node] = {}
    for path in sorted(root.rglob("*.knb"), key=lambda p: p.relative_to(root).as_posix()):
        rel = path.relative_to(root).as_posix()
        text = path.read_bytes().decode("utf-8", errors="replace")
        drafts, more = parse_source(text, rel)
        diagnostics.extend(more)
        for draft in drafts:
            node, more = elaborate_draft(draft)
            diagnostics.extend(more)
            if node.id in nodes:
                first = nodes[node.id].location
                diagnostics.append(
                    Diagnostic(
                        "E105",
                        f"duplicate id {node.id} (first defined at {first.file}:{first.line})",
                        rel,
                        draft.location.line,
                        node=node.id,
                    )
                )
                continue
            nodes[node.id] = node

    return KnowledgeGraph(nodes, manifest, resolved=False), sort_diagnostics(diagnostics)


# --------------------------------------------------------------- serialize --


def _render_rich(text: RichText) -> str:
    out: list[str] = []
    for seg in text.segments:
        if isinstance(seg, str):
            out.append(seg)
        else:
            out.append(f"[[{seg.target}|{seg.display}]]")
    return "".join(out)


def _render_ids(ids: tuple[NodeId, ...]) -> str:
    return ", ".join(str(i) for i in ids)


def serialize_node(node: Node) -> str:
    """Canonical text for one node: header plus one line per non-empty field.

    ``parse_source`` followed by elaboration reproduces the node exactly;
    repeated names become repeated ``name:`` lines.
    """
    lines = [f"@{node.kind.value} {node.id}"]
    for name, (attr, shape) in _SCHEMAS[node.kind].items():
        value = getattr(node, attr)
        if shape == "strs":
            lines.extend(f"name: {v}" for v in value)
        elif shape == "str":
            if value:
                lines.append(f"{name}: {value}")
        elif shape == "rich":
            if value.segments:
                lines.append(f"{name}: {_render_rich(value)}")
        elif shape == "id":
            if value is not None:
                lines.append(f"{name}: {value}")
        else:
            if value:
                lines.append(f"{name}: {_render_ids(value)}")
    return "\n".join(lines) + "\n"


def serialize_nodes(nodes: list[Node]) -> str:
    """Canonical file content: blocks separated by one blank line."""
    return "\n".join(serialize_node(n) for n in nodes)
