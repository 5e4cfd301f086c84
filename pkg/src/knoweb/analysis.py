"""Derived structure over a resolved graph.

Inverse-edge completion, similarity neighborhoods, shortcut paths between
two nodes of the same kind, the solution-pattern usability fixed point,
and summary statistics. All operations are pure; completion returns a new
graph.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .model import (
    ConceptNode,
    Diagnostic,
    KnowledgeGraph,
    Node,
    NodeId,
    NodeKind,
    PatternNode,
    ProblemNode,
    StrategyNode,
    link_targets,
)


class AnalysisError(Exception):
    """A query failed; carries the Diagnostic explaining why."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


def _require(graph: KnowledgeGraph, node_id: NodeId) -> Node:
    node = graph.nodes.get(node_id)
    if node is None:
        raise AnalysisError(
            Diagnostic("E401", f"unknown node {node_id}", node=node_id)
        )
    return node


# -------------------------------------------------------------- completion --


def complete_inverses(graph: KnowledgeGraph) -> tuple[KnowledgeGraph, int]:
    """Materialize every derivable inverse entry; returns the count added.

    Forward edges stay authoritative: generalizations/specializations mirror
    each other within a kind, a pattern's problem/steps/strategy fill the
    target's solutions/motivates/pattern-specializations, and concept
    definition links fill used-in. Added entries are appended after authored
    ones, sorted by source id, so the result does not depend on file
    partitioning. Idempotent.
    """
    additions: dict[tuple[NodeId, str], set[NodeId]] = {}

    def need(target: Node, field_name: str, source: NodeId) -> None:
        if source not in getattr(target, field_name):
            additions.setdefault((target.id, field_name), set()).add(source)

    def local(target: NodeId, kinds: tuple[NodeKind, ...]) -> Optional[Node]:
        if target.is_external:
            return None
        node = graph.nodes.get(target)
        if node is None or node.kind not in kinds:
            return None
        return node

    for node in graph.nodes.values():
        if isinstance(node, (ConceptNode, ProblemNode, StrategyNode)) or node.kind is NodeKind.DOMAIN:
            same = (node.kind,)
            for target in node.generalizations:
                other = local(target, same)
                if other is not None:
                    need(other, "specializations", node.id)
            for target in node.specializations:
                other = local(target, same)
                if other is not None:
                    need(other, "generalizations", node.id)
        if isinstance(node, ConceptNode):
            for link in node.definition.links():
                other = local(link.target, (NodeKind.CONCEPT,))
                if other is not None:
                    need(other, "used_in", node.id)
        if isinstance(node, PatternNode):
            if node.problem is not None:
                other = local(node.problem, (NodeKind.PROBLEM,))
                if other is not None:
                    need(other, "solutions", node.id)
            for target in node.steps:
                other = local(target, (NodeKind.PROBLEM,))
                if other is not None:
                    need(other, "motivates", node.id)
            if node.strategy is not None:
                other = local(node.strategy, (NodeKind.STRATEGY,))
                if other is not None:
                    need(other, "pattern_specializations", node.id)

    if not additions:
        return graph, 0

    count = 0
    nodes: dict[NodeId, Node] = {}
    for node_id, node in graph.nodes.items():
        patch: dict[str, tuple[NodeId, ...]] = {}
        for field_name in (
            "generalizations",
            "specializations",
            "used_in",
            "solutions",
            "motivates",
            "pattern_specializations",
        ):
            extra = additions.get((node_id, field_name))
            if extra:
                current = getattr(node, field_name)
                patch[field_name] = current + tuple(sorted(extra, key=str))
                count += len(extra)
        nodes[node_id] = replace(node, **patch) if patch else node
    return replace(graph, nodes=nodes), count


# -------------------------------------------------------------- similarity --


def _direct_generalizations(graph: KnowledgeGraph, node: Node) -> frozenset[NodeId]:
    out = set()
    for target in getattr(node, "generalizations", ()):
        if not target.is_external:
            other = graph.nodes.get(target)
            if other is not None and other.kind is node.kind:
                out.add(target)
    return frozenset(out)


def similarity_neighbors(
    graph: KnowledgeGraph, node_id: NodeId
) -> list[tuple[NodeId, list[NodeId]]]:
    """Same-kind nodes sharing a direct generalization with ``node_id``.

    The two-link up-then-down path: each neighbor comes with the shared
    generalizations, sorted by (count descending, id ascending). Nodes
    directly related by gen/spec are excluded. Expects inverses completed.
    """
    node = _require(graph, node_id)
    if node.kind is NodeKind.PATTERN:
        raise AnalysisError(
            Diagnostic(
                "E402",
                "patterns have no generalization structure",
                node=node_id,
            )
        )
    mine = _direct_generalizations(graph, node)
    related = set(getattr(node, "generalizations", ())) | set(
        getattr(node, "specializations", ())
    )
    results: list[tuple[NodeId, list[NodeId]]] = []
    for other_id, other in graph.nodes.items():
        if other_id == node_id or other.kind is not node.kind:
            continue
        if other_id in related:
            continue
        shared = mine & _direct_generalizations(graph, other)
        if shared:
            results.append((other_id, sorted(shared, key=str)))
    results.sort(key=lambda item: (-len(item[1]), str(item[0])))
    return results


# ---------------------------------------------------------------- shortcuts --


class ShortcutClass(Enum):
    GENERALIZATION = "generalization"
    SPECIALIZATION = "specialization"
    SIMILARITY = "similarity"
    MIXED = "mixed"


_CLASS_RANK = {
    ShortcutClass.GENERALIZATION: 0,
    ShortcutClass.SPECIALIZATION: 1,
    ShortcutClass.SIMILARITY: 2,
    ShortcutClass.MIXED: 3,
}

Edge = tuple[NodeId, str, NodeId]  # (from, "up" | "down", to)


def classify_directions(directions: tuple[str, ...]) -> ShortcutClass:
    """Classification table over an edge-direction sequence.

    All up is a generalization, all down a specialization, a nonempty up-run
    followed by a nonempty down-run (single peak) a similarity; anything else
    is mixed. The empty sequence counts as generalization by convention.
    """
    if all(d == "up" for d in directions):
        return ShortcutClass.GENERALIZATION
    if all(d == "down" for d in directions):
        return ShortcutClass.SPECIALIZATION
    peak = directions.index("down")
    if "up" not in directions[peak:]:
        return ShortcutClass.SIMILARITY
    return ShortcutClass.MIXED


@dataclass(frozen=True)
class ShortcutPath:
    """A simple path over the gen/spec relation, with its classification."""

    endpoints: tuple[NodeId, NodeId]
    edges: tuple[Edge, ...]
    classification: ShortcutClass

    @property
    def length(self) -> int:
        return len(self.edges)

    def node_sequence(self) -> tuple[NodeId, ...]:
        if not self.edges:
            return (self.endpoints[0],)
        return (self.edges[0][0],) + tuple(edge[2] for edge in self.edges)

    def reversed(self) -> "ShortcutPath":
        swap = {"up": "down", "down": "up"}
        edges = tuple(
            (b, swap[direction], a) for (a, direction, b) in reversed(self.edges)
        )
        return ShortcutPath(
            (self.endpoints[1], self.endpoints[0]),
            edges,
            classify_directions(tuple(e[1] for e in edges)),
        )


def find_shortcuts(
    graph: KnowledgeGraph, start: NodeId, goal: NodeId, max_len: int = 4
) -> list[ShortcutPath]:
    """All simple gen/spec paths from ``start`` to ``goal`` up to ``max_len``.

    Sorted by (length, classification rank, node sequence); start = goal
    yields the single empty path. Expects inverses completed.
    """
    a = _require(graph, start)
    b = _require(graph, goal)
    if a.kind is not b.kind:
        raise AnalysisError(
            Diagnostic(
                "E403",
                f"endpoints differ in kind: {start} is a {a.kind.value}, "
                f"{goal} is a {b.kind.value}",
                node=start,
            )
        )

    def moves(node: Node) -> list[tuple[NodeId, str]]:
        out: list[tuple[NodeId, str]] = []
        seen: set[tuple[NodeId, str]] = set()
        for target in getattr(node, "generalizations", ()):
            key = (target, "up")
            if key not in seen and not target.is_external:
                other = graph.nodes.get(target)
                if other is not None and other.kind is node.kind:
                    seen.add(key)
                    out.append(key)
        for target in getattr(node, "specializations", ()):
            key = (target, "down")
            if key not in seen and not target.is_external:
                other = graph.nodes.get(target)
                if other is not None and other.kind is node.kind:
                    seen.add(key)
                    out.append(key)
        return out

    paths: list[ShortcutPath] = []
    if start == goal:
        return [ShortcutPath((start, goal), (), ShortcutClass.GENERALIZATION)]

    trail: list[Edge] = []
    visited = {start}

    def walk(at: NodeId) -> None:
        if len(trail) >= max_len:
            return
        for target, direction in moves(graph.nodes[at]):
            if target in visited:
                continue
            trail.append((at, direction, target))
            if target == goal:
                edges = tuple(trail)
                paths.append(
                    ShortcutPath(
                        (start, goal),
                        edges,
                        classify_directions(tuple(e[1] for e in edges)),
                    )
                )
            else:
                visited.add(target)
                walk(target)
                visited.discard(target)
            trail.pop()

    walk(start)
    paths.sort(
        key=lambda p: (
            p.length,
            _CLASS_RANK[p.classification],
            tuple(str(n) for n in p.node_sequence()),
        )
    )
    return paths


# ---------------------------------------------------------------- usability --


@dataclass(frozen=True)
class UsabilityLabeling:
    """Result of the solvable/usable least fixed point."""

    solvable: frozenset[NodeId]
    usable: frozenset[NodeId]
    primitives: frozenset[NodeId]


def usability_closure(
    graph: KnowledgeGraph, primitives: frozenset[NodeId] | set[NodeId]
) -> UsabilityLabeling:
    """Least fixed point of solvable problems and usable patterns.

    solvable = primitives plus problems some usable pattern solves;
    usable = patterns whose steps are all solvable. External-namespace steps
    never count as solvable. Primitives must name local Problem nodes (E404).
    """
    primitives = frozenset(primitives)
    for node_id in sorted(primitives, key=str):
        node = graph.nodes.get(node_id)
        if node_id.is_external or not isinstance(node, ProblemNode):
            raise AnalysisError(
                Diagnostic("E404", f"primitive {node_id} is not a problem", node=node_id)
            )

    patterns = [n for n in graph.nodes.values() if isinstance(n, PatternNode)]
    solvable = set(primitives)
    usable: set[NodeId] = set()
    changed = True
    while changed:
        changed = False
        for pattern in patterns:
            if pattern.id in usable:
                continue
            if all(step in solvable for step in pattern.steps):
                usable.add(pattern.id)
                changed = True
                problem = pattern.problem
                if (
                    problem is not None
                    and not problem.is_external
                    and isinstance(graph.nodes.get(problem), ProblemNode)
                    and problem not in solvable
                ):
                    solvable.add(problem)
    return UsabilityLabeling(frozenset(solvable), frozenset(usable), primitives)


def strategy_usability(graph: KnowledgeGraph) -> frozenset[NodeId]:
    """Usable strategies under the same closure, strategies as problems.

    Atomic strategies (zero steps) seed the fixed point; a strategy is usable
    when every strategic subproblem is. External steps never qualify.
    """
    strategies = {n.id: n for n in graph.nodes.values() if isinstance(n, StrategyNode)}
    usable: set[NodeId] = set()
    changed = True
    while changed:
        changed = False
        for node_id, node in strategies.items():
            if node_id in usable:
                continue
            if all(step in usable and step in strategies for step in node.steps):
                usable.add(node_id)
                changed = True
    return frozenset(usable)


# -------------------------------------------------------------------- stats --


@dataclass(frozen=True)
class StatsReport:
    """Summary counts over a resolved graph, all orderings deterministic."""

    kind_counts: dict[str, int]
    domain_counts: dict[str, int]
    cross_domain_edges: int
    bridge_concepts: tuple[NodeId, ...]
    orphans: tuple[NodeId, ...]

    def to_dict(self) -> dict:
        return {
            "kind_counts": dict(self.kind_counts),
            "domain_counts": dict(self.domain_counts),
            "cross_domain_edges": self.cross_domain_edges,
            "bridge_concepts": [str(n) for n in self.bridge_concepts],
            "orphans": [str(n) for n in self.orphans],
        }

    def render_text(self) -> str:
        lines = ["nodes by kind"]
        for kind, count in self.kind_counts.items():
            lines.append(f"  {kind:<9} {count}")
        lines.append("nodes by domain")
        if not self.domain_counts:
            lines.append("  (none)")
        for domain, count in self.domain_counts.items():
            lines.append(f"  {domain:<24} {count}")
        lines.append(f"cross-domain links  {self.cross_domain_edges}")
        bridges = ", ".join(str(n) for n in self.bridge_concepts) or "(none)"
        lines.append(f"bridge concepts     {bridges}")
        orphans = ", ".join(str(n) for n in self.orphans) or "(none)"
        lines.append(f"orphan nodes        {orphans}")
        return "\n".join(lines)


def graph_stats(graph: KnowledgeGraph) -> StatsReport:
    """Per-kind and per-domain counts, cross-domain links, bridges, orphans.

    A cross-domain link is any non-domain link whose two local endpoints
    carry different domains. A bridge concept relates by gen/spec to nodes
    spanning two or more domains, counting its own. An orphan has no
    incoming link from any other node.
    """
    kind_counts = {kind.value: 0 for kind in NodeKind}
    domain_counts: dict[str, int] = {}
    incoming: set[NodeId] = set()
    cross = 0
    bridges: list[NodeId] = []

    def domain_of(node: Node) -> Optional[NodeId]:
        return getattr(node, "domain", None)

    for node in graph.nodes.values():
        kind_counts[node.kind.value] += 1
        domain = domain_of(node)
        if domain is not None:
            key = str(domain)
            domain_counts[key] = domain_counts.get(key, 0) + 1
        for field_name, target, _ in link_targets(node):
            if target != node.id:
                incoming.add(target)
            if field_name == "domain" or target.is_external:
                continue
            other = graph.nodes.get(target)
            if other is None:
                continue
            mine, theirs = domain_of(node), domain_of(other)
            if mine is not None and theirs is not None and mine != theirs:
                cross += 1

    for node in graph.nodes.values():
        if not isinstance(node, ConceptNode):
            continue
        domains = set()
        if node.domain is not None:
            domains.add(node.domain)
        for target in node.generalizations + node.specializations:
            if target.is_external:
                continue
            other = graph.nodes.get(target)
            if isinstance(other, ConceptNode) and other.domain is not None:
                domains.add(other.domain)
        if len(domains) >= 2:
            bridges.append(node.id)

    orphans = tuple(
        sorted((i for i in graph.nodes if i not in incoming), key=str)
    )
    return StatsReport(
        kind_counts=kind_counts,
        domain_counts=dict(sorted(domain_counts.items())),
        cross_domain_edges=cross,
        bridge_concepts=tuple(sorted(bridges, key=str)),
        orphans=orphans,
    )
