"""Reference resolution and structural checks over a knowledge graph.

All checks are pure: they never mutate the graph and return the same
diagnostics every run, sorted by (file, line, code).
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Optional

from .model import (
    ConceptNode,
    Diagnostic,
    DomainNode,
    KnowledgeGraph,
    Node,
    NodeId,
    NodeKind,
    PatternNode,
    ProblemNode,
    STRATEGIES_DOMAIN_ID,
    StrategyNode,
    link_targets,
    sort_diagnostics,
)


def resolve_links(graph: KnowledgeGraph) -> tuple[KnowledgeGraph, list[Diagnostic]]:
    """Check every reference; mark the graph resolved iff no errors remain.

    Local references must exist (E301) and point at the kind their field
    demands (E302). External references only need a declared namespace
    (E303); separately hosted parts are trusted.
    """
    diagnostics: list[Diagnostic] = []
    for node in graph.nodes.values():
        for field_name, target, expected in link_targets(node):
            if target.is_external:
                if target.namespace not in graph.manifest.namespaces:
                    diagnostics.append(
                        Diagnostic(
                            "E303",
                            f"unknown namespace {target.namespace!r} in {target}",
                            node.location.file,
                            node.location.line,
                            node=node.id,
                            field=field_name,
                        )
                    )
                continue
            found = graph.nodes.get(target)
            if found is None:
                diagnostics.append(
                    Diagnostic(
                        "E301",
                        f"unknown node {target}",
                        node.location.file,
                        node.location.line,
                        node=node.id,
                        field=field_name,
                    )
                )
            elif found.kind not in expected:
                wanted = " or ".join(k.value for k in expected)
                diagnostics.append(
                    Diagnostic(
                        "E302",
                        f"{target} is a {found.kind.value}, but {field_name} links a {wanted}",
                        node.location.file,
                        node.location.line,
                        node=node.id,
                        field=field_name,
                    )
                )
    diagnostics = sort_diagnostics(diagnostics)
    resolved = not any(d.is_error for d in diagnostics)
    return replace(graph, resolved=resolved), diagnostics


# Inverse pairs: a forward entry in `fwd` of a source node implies the source
# should appear in `inv` of the target, and vice versa.
def _local(graph: KnowledgeGraph, target: NodeId, kinds: tuple[NodeKind, ...]) -> Optional[Node]:
    if target.is_external:
        return None
    node = graph.nodes.get(target)
    if node is None or node.kind not in kinds:
        return None
    return node


def _inverse_pairs(graph: KnowledgeGraph) -> Iterable[tuple[Node, str, Node, str]]:
    """Yield (source, forward field, target, inverse field) per forward edge."""
    for node in graph.nodes.values():
        same = (node.kind,)
        if isinstance(node, (ConceptNode, ProblemNode, StrategyNode, DomainNode)):
            for target in node.generalizations:
                other = _local(graph, target, same)
                if other is not None:
                    yield node, "generalizations", other, "specializations"
            for target in node.specializations:
                other = _local(graph, target, same)
                if other is not None:
                    yield node, "specializations", other, "generalizations"
        if isinstance(node, ConceptNode):
            seen: set[NodeId] = set()
            for link in node.definition.links():
                if link.target in seen:
                    continue
                seen.add(link.target)
                other = _local(graph, link.target, (NodeKind.CONCEPT,))
                if other is not None:
                    yield node, "definition", other, "used_in"
        if isinstance(node, PatternNode):
            if node.problem is not None:
                other = _local(graph, node.problem, (NodeKind.PROBLEM,))
                if other is not None:
                    yield node, "problem", other, "solutions"
            seen = set()
            for target in node.steps:
                if target in seen:
                    continue
                seen.add(target)
                other = _local(graph, target, (NodeKind.PROBLEM,))
                if other is not None:
                    yield node, "steps", other, "motivates"
            if node.strategy is not None:
                other = _local(graph, node.strategy, (NodeKind.STRATEGY,))
                if other is not None:
                    yield node, "strategy", other, "pattern_specializations"


def check_inverse_consistency(graph: KnowledgeGraph) -> list[Diagnostic]:
    """W304 wherever a forward edge lacks its inverse entry, or vice versa.

    Both directions are drift: a missing inverse is mechanically repairable
    by complete_inverses, a stale inverse entry (no forward edge) is not.
    """
    diagnostics: list[Diagnostic] = []
    forward: set[tuple[NodeId, str, NodeId]] = set()

    for source, fwd_field, target, inv_field in _inverse_pairs(graph):
        forward.add((target.id, inv_field, source.id))
        if source.id not in getattr(target, inv_field):
            diagnostics.append(
                Diagnostic(
                    "W304",
                    f"{source.id} lists {target.id} under {fwd_field} but is missing "
                    f"from its {inv_field.replace('_', '-')}",
                    source.location.file,
                    source.location.line,
                    node=source.id,
                    field=fwd_field,
                )
            )

    # stale entries in derived-only lists: listed without a forward edge
    # (gen/spec need no such scan; the pair walk above covers both sides)
    inverse_fields = {
        NodeKind.CONCEPT: ("used_in",),
        NodeKind.PROBLEM: ("motivates", "solutions"),
        NodeKind.STRATEGY: ("pattern_specializations",),
    }
    for node in graph.nodes.values():
        for inv_field in inverse_fields.get(node.kind, ()):
            for target in getattr(node, inv_field):
                other = _local(graph, target, _expected_inverse_source(node.kind, inv_field))
                if other is None:
                    continue
                if (node.id, inv_field, target) not in forward:
                    diagnostics.append(
                        Diagnostic(
                            "W304",
                            f"{node.id} lists {target} under {inv_field.replace('_', '-')} "
                            f"but {target} has no matching forward link",
                            node.location.file,
                            node.location.line,
                            node=node.id,
                            field=inv_field.replace("_", "-"),
                        )
                    )
    return sort_diagnostics(diagnostics)


def _expected_inverse_source(kind: NodeKind, inv_field: str) -> tuple[NodeKind, ...]:
    if inv_field == "used_in":
        return (NodeKind.CONCEPT,)
    return (NodeKind.PATTERN,)


def _generalization_edges(graph: KnowledgeGraph, kind: NodeKind) -> dict[NodeId, set[NodeId]]:
    """Up edges of one kind: A -> B when B generalizes A, from either side."""
    edges: dict[NodeId, set[NodeId]] = {
        node.id: set() for node in graph.nodes.values() if node.kind is kind
    }
    for node in graph.nodes.values():
        if node.kind is not kind or isinstance(node, PatternNode):
            continue
        for target in node.generalizations:
            if _local(graph, target, (kind,)) is not None:
                edges[node.id].add(target)
        for target in node.specializations:
            if _local(graph, target, (kind,)) is not None:
                edges[target].add(node.id)
    return edges


def _strongly_connected(edges: dict[NodeId, set[NodeId]]) -> list[list[NodeId]]:
    """Tarjan's algorithm, iterative; components in deterministic order."""
    index: dict[NodeId, int] = {}
    low: dict[NodeId, int] = {}
    on_stack: set[NodeId] = set()
    stack: list[NodeId] = []
    components: list[list[NodeId]] = []
    counter = 0

    for root in sorted(edges, key=str):
        if root in index:
            continue
        work: list[tuple[NodeId, list[NodeId], int]] = [
            (root, sorted(edges[root], key=str), 0)
        ]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, successors, pos = work.pop()
            advanced = False
            while pos < len(successors):
                succ = successors[pos]
                pos += 1
                if succ not in index:
                    work.append((node, successors, pos))
                    index[succ] = low[succ] = counter
                    counter += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, sorted(edges[succ], key=str), 0))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            if low[node] == index[node]:
                component: list[NodeId] = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return components


def _witness_cycle(edges: dict[NodeId, set[NodeId]], component: set[NodeId]) -> list[NodeId]:
    """Shortest cycle through the smallest id of the component, via BFS."""
    start = min(component, key=str)
    parent: dict[NodeId, NodeId] = {}
    frontier = [start]
    seen = {start}
    while frontier:
        nxt: list[NodeId] = []
        for node in frontier:
            for succ in sorted(edges[node] & component, key=str):
                if succ == start:
                    path = [node]
                    while path[-1] != start:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path + [start]
                if succ not in seen:
                    seen.add(succ)
                    parent[succ] = node
                    nxt.append(succ)
        frontier = nxt
    return [start, start]  # unreachable for a genuine SCC


def check_acyclicity(graph: KnowledgeGraph) -> list[Diagnostic]:
    """E305 per strongly-connected component (or self-loop) in generalization.

    The relation is computed separately for concepts, problems, strategies,
    and domains; patterns carry no generalization structure.
    """
    diagnostics: list[Diagnostic] = []
    for kind in (NodeKind.CONCEPT, NodeKind.PROBLEM, NodeKind.STRATEGY, NodeKind.DOMAIN):
        edges = _generalization_edges(graph, kind)
        for component in _strongly_connected(edges):
            members = set(component)
            is_cycle = len(component) > 1 or any(
                node in edges[node] for node in component
            )
            if not is_cycle:
                continue
            witness = _witness_cycle(edges, members)
            first = witness[0]
            node = graph.nodes[first]
            diagnostics.append(
                Diagnostic(
                    "E305",
                    "generalization cycle: " + " -> ".join(str(n) for n in witness),
                    node.location.file,
                    node.location.line,
                    node=first,
                    field="generalizations",
                )
            )
    return sort_diagnostics(diagnostics)


def check_strategy_domain(graph: KnowledgeGraph) -> list[Diagnostic]:
    """E306 for strategies filed outside `strategies`; W307 if that domain
    node is missing while strategies exist."""
    diagnostics: list[Diagnostic] = []
    strategies = [n for n in graph.nodes.values() if isinstance(n, StrategyNode)]
    for node in strategies:
        if node.domain != STRATEGIES_DOMAIN_ID:
            diagnostics.append(
                Diagnostic(
                    "E306",
                    f"strategy domain must be {STRATEGIES_DOMAIN_ID}, got "
                    f"{node.domain if node.domain else 'nothing'}",
                    node.location.file,
                    node.location.line,
                    node=node.id,
                    field="domain",
                )
            )
    if strategies:
        home = graph.nodes.get(STRATEGIES_DOMAIN_ID)
        if not isinstance(home, DomainNode):
            diagnostics.append(
                Diagnostic(
                    "W307",
                    "strategies exist but no `strategies` domain node is defined",
                )
            )
    return sort_diagnostics(diagnostics)


_LIST_FIELDS: dict[NodeKind, tuple[str, ...]] = {
    NodeKind.CONCEPT: ("generalizations", "specializations", "used_in", "problems"),
    NodeKind.PROBLEM: ("generalizations", "specializations", "motivates", "solutions"),
    NodeKind.PATTERN: ("steps",),
    NodeKind.STRATEGY: ("generalizations", "specializations", "steps", "pattern_specializations"),
    NodeKind.DOMAIN: ("generalizations", "specializations", "prominent_concepts", "prominent_problems"),
}


def lint_fanout(graph: KnowledgeGraph, threshold: int) -> list[Diagnostic]:
    """W308 for link lists strictly longer than ``threshold``.

    Long lists defeat the complexity-hiding prescription; the fix is an
    intermediate node bundling the entries.
    """
    diagnostics: list[Diagnostic] = []
    for node in graph.nodes.values():
        for field_name in _LIST_FIELDS[node.kind]:
            entries = getattr(node, field_name)
            if len(entries) > threshold:
                diagnostics.append(
                    Diagnostic(
                        "W308",
                        f"{field_name.replace('_', '-')} has {len(entries)} links "
                        f"(threshold {threshold}); consider an intermediate node",
                        node.location.file,
                        node.location.line,
                        node=node.id,
                        field=field_name.replace("_", "-"),
                    )
                )
    return sort_diagnostics(diagnostics)


def run_checks(graph: KnowledgeGraph) -> tuple[KnowledgeGraph, list[Diagnostic]]:
    """Resolve references and run every structural check."""
    graph, diagnostics = resolve_links(graph)
    diagnostics += check_inverse_consistency(graph)
    diagnostics += check_acyclicity(graph)
    diagnostics += check_strategy_domain(graph)
    diagnostics += lint_fanout(graph, graph.manifest.fanout_threshold)
    return graph, sort_diagnostics(diagnostics)
