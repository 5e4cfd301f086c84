"""Static-site emitter.

One page per node under ``<kind>/<local>.html``, a root index grouped by
domain, a name index with homonyms listed together, a machine-readable
``graph.json``, and a shared stylesheet. Output is deterministic byte for
byte; nothing embeds a timestamp.
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .model import (
    ConceptNode,
    Diagnostic,
    DomainNode,
    KnowledgeGraph,
    Manifest,
    Node,
    NodeId,
    PatternNode,
    ProblemNode,
    RichText,
    StrategyNode,
    display_name,
    link_targets,
    node_names,
    sort_diagnostics,
)


class SiteError(Exception):
    """Site emission failed; carries the Diagnostic explaining why."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


@dataclass(frozen=True)
class SiteManifest:
    """What was emitted: node pages plus fixed assets."""

    pages: tuple[tuple[NodeId, str], ...]
    assets: tuple[str, ...]
    base_url: Optional[str] = None

    def all_paths(self) -> frozenset[str]:
        return frozenset(path for _, path in self.pages) | frozenset(self.assets)


def page_path(node: Node) -> str:
    return f"{node.kind.value}/{node.id.local}.html"


def node_url(node_id: NodeId, manifest: Manifest, node: Optional[Node] = None) -> str:
    """URL for a node page.

    Local ids map to ``<kind>/<local>.html`` (the node itself must be given
    to supply the kind). External ids map to ``<base-url>/node/<local>.html``
    under the declared namespace; the ``node`` segment stands in for the kind,
    which external hosts do not expose. E501 for an undeclared namespace.
    """
    if node_id.namespace is not None:
        base = manifest.namespaces.get(node_id.namespace)
        if base is None:
            raise SiteError(
                Diagnostic(
                    "E501",
                    f"namespace '{node_id.namespace}' is not declared in the manifest",
                    node=node_id,
                )
            )
        return f"{base.rstrip('/')}/node/{node_id.local}.html"
    if node is None:
        raise ValueError(f"local id {node_id} needs its node to determine the kind")
    return page_path(node)


# ------------------------------------------------------------------ markup --

# (attribute, heading, shape) per kind, in schema field order; name handled
# separately. Shapes: rich = inline prose, ids = bulleted list, id = single.
_SECTIONS: dict[type, tuple[tuple[str, str, str], ...]] = {
    ConceptNode: (
        ("definition", "Definition", "rich"),
        ("generalizations", "Generalizations", "ids"),
        ("specializations", "Specializations", "ids"),
        ("used_in", "Used in", "ids"),
        ("problems", "Problems", "ids"),
        ("domain", "Domain", "id"),
    ),
    ProblemNode: (
        ("description", "Description", "rich"),
        ("generalizations", "Generalizations", "ids"),
        ("specializations", "Specializations", "ids"),
        ("motivates", "Motivates", "ids"),
        ("solutions", "Solutions", "ids"),
        ("domain", "Domain", "id"),
    ),
    PatternNode: (
        ("problem", "Problem", "id"),
        ("strategy", "Strategy", "id"),
        ("steps", "Steps", "ids"),
        ("domain", "Domain", "id"),
    ),
    StrategyNode: (
        ("description", "Description", "rich"),
        ("generalizations", "Generalizations", "ids"),
        ("specializations", "Specializations", "ids"),
        ("steps", "Steps", "ids"),
        ("pattern_specializations", "Pattern specializations", "ids"),
        ("domain", "Domain", "id"),
    ),
    DomainNode: (
        ("generalizations", "Generalizations", "ids"),
        ("specializations", "Specializations", "ids"),
        ("prominent_concepts", "Prominent concepts", "ids"),
        ("prominent_problems", "Prominent problems", "ids"),
    ),
}

_STYLE = """\
body {
  font-family: Georgia, 'Times New Roman', serif;
  max-width: 46rem;
  margin: 2rem auto;
  padding: 0 1rem;
  line-height: 1.55;
  color: #222;
}
nav.site {
  font-size: 0.85rem;
  margin-bottom: 1.75rem;
}
nav.site a { margin-right: 1rem; }
h1 { margin: 0 0 0.25rem; }
p.kind {
  margin: 0;
  font-size: 0.75rem;
  letter-spacing: 0.08em;
  text-transform: uppercase;
  color: #777;
}
p.aka {
  margin-top: 0.25rem;
  font-style: italic;
  color: #555;
}
section h2 {
  font-size: 1rem;
  margin: 1.25rem 0 0.25rem;
  color: #444;
}
section ul {
  margin: 0.25rem 0 0.75rem 1.4rem;
  padding: 0;
}
a { color: #1a4d8f; text-decoration: none; }
a:hover { text-decoration: underline; }
a.external::after { content: "\\2197"; font-size: 0.7em; vertical-align: super; }
#knoweb-explorer { margin-top: 2.5rem; }
#knoweb-explorer svg {
  width: 100%;
  border: 1px solid #ddd;
  border-radius: 4px;
  background: #fafafa;
}
"""


class _Renderer:
    """Shared state for one emit run: url building and W502 collection."""

    def __init__(self, graph: KnowledgeGraph, base_url: Optional[str]):
        self.graph = graph
        self.base_url = base_url.rstrip("/") if base_url else None
        self.diagnostics: list[Diagnostic] = []

    def href(self, relpath: str, depth: int) -> str:
        if self.base_url is not None:
            return f"{self.base_url}/{relpath}"
        return "../" * depth + relpath

    def anchor(self, target: NodeId, text: str, depth: int, owner: Node, field: str) -> str:
        label = html.escape(text)
        if target.is_external:
            url = node_url(target, self.graph.manifest)
            self.diagnostics.append(
                Diagnostic(
                    "W502",
                    f"external link {target} cannot be verified",
                    file=owner.location.file,
                    line=owner.location.line,
                    node=owner.id,
                    field=field,
                )
            )
            return f'<a class="external" href="{html.escape(url, quote=True)}">{label}</a>'
        other = self.graph.nodes.get(target)
        if other is None:
            return label
        url = self.href(page_path(other), depth)
        return f'<a href="{html.escape(url, quote=True)}">{label}</a>'

    def id_anchor(self, target: NodeId, depth: int, owner: Node, field: str) -> str:
        other = self.graph.nodes.get(target) if not target.is_external else None
        text = display_name(other) if other is not None else target.local.replace("-", " ")
        return self.anchor(target, text, depth, owner, field)

    def rich(self, text: RichText, depth: int, owner: Node, field: str) -> str:
        parts = []
        for segment in text.segments:
            if isinstance(segment, str):
                parts.append(html.escape(segment))
            else:
                parts.append(self.anchor(segment.target, segment.display, depth, owner, field))
        return "".join(parts)


def _document(
    title: str,
    body: str,
    depth: int,
    renderer: _Renderer,
    center: str = "",
) -> str:
    style = renderer.href("assets/style.css", depth)
    graph_url = renderer.href("graph.json", depth)
    script = renderer.href("assets/explorer.js", depth)
    index = renderer.href("index.html", depth)
    names = renderer.href("names.html", depth)
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n'
        "<head>\n"
        '<meta charset="utf-8">\n'
        '<meta name="viewport" content="width=device-width, initial-scale=1">\n'
        f"<title>{html.escape(title)}</title>\n"
        f'<link rel="stylesheet" href="{html.escape(style, quote=True)}">\n'
        "</head>\n"
        "<body>\n"
        '<nav class="site">'
        f'<a href="{html.escape(index, quote=True)}">Index</a>'
        f'<a href="{html.escape(names, quote=True)}">Names</a>'
        "</nav>\n"
        f"{body}"
        f'<div id="knoweb-explorer" data-graph-url="{html.escape(graph_url, quote=True)}"'
        f' data-center="{html.escape(center, quote=True)}"></div>\n'
        f'<script src="{html.escape(script, quote=True)}" defer></script>\n'
        "</body>\n"
        "</html>\n"
    )


def _node_page(node: Node, renderer: _Renderer) -> str:
    depth = 1
    names = node_names(node)
    title = display_name(node)
    lines = [f'<article class="node {node.kind.value}">\n']
    lines.append(f'<p class="kind">{html.escape(node.kind.value)}</p>\n')
    lines.append(f"<h1>{html.escape(title)}</h1>\n")
    if len(names) > 1:
        rest = "; ".join(html.escape(n) for n in names[1:])
        lines.append(f'<p class="aka">Also known as: {rest}</p>\n')
    for attr, heading, shape in _SECTIONS[type(node)]:
        value = getattr(node, attr)
        if shape == "rich":
            if value.is_empty():
                continue
            content = f"<p>{renderer.rich(value, depth, node, attr)}</p>\n"
        elif shape == "ids":
            if not value:
                continue
            items = "".join(
                f"<li>{renderer.id_anchor(t, depth, node, attr)}</li>\n" for t in value
            )
            content = f"<ul>\n{items}</ul>\n"
        else:
            if value is None:
                continue
            content = f"<p>{renderer.id_anchor(value, depth, node, attr)}</p>\n"
        lines.append(f"<section>\n<h2>{heading}</h2>\n{content}</section>\n")
    lines.append("</article>\n")
    return _document(title, "".join(lines), depth, renderer, center=str(node.id))


def _index_page(graph: KnowledgeGraph, renderer: _Renderer) -> str:
    depth = 0
    nodes = sorted(graph.nodes.values(), key=lambda n: str(n.id))
    domains = [n for n in nodes if isinstance(n, DomainNode)]
    lines = ["<h1>Knowledge base</h1>\n"]
    if domains:
        items = "".join(
            f'<li><a href="{html.escape(renderer.href(page_path(d), depth), quote=True)}">'
            f"{html.escape(display_name(d))}</a></li>\n"
            for d in domains
        )
        lines.append(f"<section>\n<h2>Domains</h2>\n<ul>\n{items}</ul>\n</section>\n")

    groups: dict[str, list[Node]] = {}
    for node in nodes:
        domain = getattr(node, "domain", None)
        if isinstance(node, DomainNode):
            continue
        key = str(domain) if domain is not None else ""
        groups.setdefault(key, []).append(node)
    for key in sorted(groups):
        members = groups[key]
        if key == "":
            heading = "No domain"
        else:
            domain_node = graph.nodes.get(NodeId.parse(key))
            heading = display_name(domain_node) if domain_node is not None else key
        items = "".join(
            f'<li><a href="{html.escape(renderer.href(page_path(m), depth), quote=True)}">'
            f"{html.escape(display_name(m))}</a>"
            f' <span class="kind-tag">({m.kind.value})</span></li>\n'
            for m in members
        )
        lines.append(
            f'<section class="domain-group">\n<h2>{html.escape(heading)}</h2>\n'
            f"<ul>\n{items}</ul>\n</section>\n"
        )
    return _document("Knowledge base", "".join(lines), depth, renderer)


def _names_page(graph: KnowledgeGraph, renderer: _Renderer) -> str:
    depth = 0
    by_name: dict[str, set[NodeId]] = {}
    for node in graph.nodes.values():
        for name in node_names(node):
            by_name.setdefault(name, set()).add(node.id)
    lines = ["<h1>Name index</h1>\n<ul>\n"]
    for name in sorted(by_name, key=lambda n: (n.casefold(), n)):
        anchors = ", ".join(
            f'<a href="{html.escape(renderer.href(page_path(graph.nodes[i]), depth), quote=True)}">'
            f"{html.escape(str(i))}</a>"
            for i in sorted(by_name[name], key=str)
        )
        lines.append(f"<li>{html.escape(name)}: {anchors}</li>\n")
    lines.append("</ul>\n")
    return _document("Name index", "".join(lines), depth, renderer)


# ------------------------------------------------------------------ export --

# Field token -> exported edge kind. Definition and description prose links
# share one kind; everything else maps one to one (13 kinds total).
_EDGE_KIND = {
    "definition": "definition",
    "description": "definition",
    "generalizations": "generalization",
    "specializations": "specialization",
    "used-in": "used-in",
    "problems": "problem",
    "problem": "problem",
    "domain": "domain",
    "motivates": "motivates",
    "solutions": "solution",
    "strategy": "strategy",
    "steps": "step",
    "pattern-specializations": "pattern-specialization",
    "prominent-concepts": "prominent-concept",
    "prominent-problems": "prominent-problem",
}

EDGE_KINDS = tuple(sorted(set(_EDGE_KIND.values())))


def export_graph(graph: KnowledgeGraph) -> str:
    """The machine-readable export: nodes and edges, fully ordered.

    Nodes sort by id; edges by (from, kind, to) and keep only pairs whose
    both endpoints are local and present, so every edge endpoint exists in
    the nodes array. Summaries truncate defining prose to 200 characters;
    kinds without prose get an empty summary.
    """
    nodes = []
    for node in sorted(graph.nodes.values(), key=lambda n: str(n.id)):
        prose = getattr(node, "definition", None)
        if prose is None:
            prose = getattr(node, "description", None)
        summary = prose.plain()[:200] if isinstance(prose, RichText) else ""
        domain = getattr(node, "domain", None)
        nodes.append(
            {
                "id": str(node.id),
                "kind": node.kind.value,
                "names": list(node_names(node)),
                "domain": str(domain) if domain is not None else None,
                "summary": summary,
            }
        )
    edges = set()
    for node in graph.nodes.values():
        for field_name, target, _ in link_targets(node):
            if target.is_external or target not in graph.nodes:
                continue
            edges.add((str(node.id), _EDGE_KIND[field_name], str(target)))
    document = {
        "nodes": nodes,
        "edges": [
            {"from": a, "to": b, "kind": k} for a, k, b in sorted(edges)
        ],
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


# -------------------------------------------------------------------- emit --


def _write(out_dir: Path, relpath: str, data: str | bytes) -> None:
    target = out_dir / relpath
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(data, bytes):
            target.write_bytes(data)
        else:
            target.write_text(data, encoding="utf-8")
    except OSError as err:
        raise SiteError(
            Diagnostic("E503", f"cannot write {relpath}: {err}", file=relpath)
        ) from err


def emit_site(
    graph: KnowledgeGraph,
    out_dir: Path,
    *,
    base_url: Optional[str] = None,
    explorer_js: Optional[Path] = None,
) -> tuple[SiteManifest, list[Diagnostic]]:
    """Write the whole site under ``out_dir``.

    Expects a resolved graph with inverses completed. Returns the manifest
    and the W502 warnings for external links rendered along the way. E503
    on any filesystem failure aborts the run.
    """
    renderer = _Renderer(graph, base_url)
    pages = []
    for node in sorted(graph.nodes.values(), key=lambda n: str(n.id)):
        relpath = page_path(node)
        _write(out_dir, relpath, _node_page(node, renderer))
        pages.append((node.id, relpath))

    assets = ["index.html", "names.html", "graph.json", "assets/style.css"]
    _write(out_dir, "index.html", _index_page(graph, renderer))
    _write(out_dir, "names.html", _names_page(graph, renderer))
    _write(out_dir, "graph.json", export_graph(graph))
    _write(out_dir, "assets/style.css", _STYLE)
    if explorer_js is not None:
        try:
            payload = Path(explorer_js).read_bytes()
        except OSError as err:
            raise SiteError(
                Diagnostic("E503", f"cannot read {explorer_js}: {err}")
            ) from err
        _write(out_dir, "assets/explorer.js", payload)
        assets.append("assets/explorer.js")

    manifest = SiteManifest(
        pages=tuple(pages),
        assets=tuple(assets),
        base_url=renderer.base_url,
    )
    return manifest, sort_diagnostics(renderer.diagnostics)
