"""Seeded generators for property tests.

`generate_kb` builds a structurally valid knowledge base as model objects:
all local references resolve, gen/spec stays acyclic (edges only point to
earlier nodes of the same kind), derived fields are left empty, and every
strategy sits in the strategies domain. The same base can be serialized,
written to disk under different file partitions, or mutated (cycle
injection) for negative tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from knoweb.model import (
    ConceptNode,
    DomainNode,
    KnowledgeGraph,
    LinkSegment,
    Manifest,
    Node,
    NodeId,
    PatternNode,
    ProblemNode,
    RichText,
    STRATEGIES_DOMAIN_ID,
    StrategyNode,
)
from knoweb.parser import serialize_nodes

CORPUS_DIR = Path(__file__).resolve().parent.parent / "examples" / "paper-kb"

_ALL_WORDS = (
    "amber", "basalt", "cedar", "delta", "ember", "fjord", "garnet",
    "harbor", "indigo", "juniper", "krill", "lattice", "meadow",
    "quartz", "ridge", "slate", "tundra", "umber", "willow",
)

EXTERNAL_NS = "ext"
EXTERNAL_URL = "https://example.org/ext-kb"


def _fresh_id(rng: random.Random, used: set[NodeId], prefix: str) -> NodeId:
    while True:
        local = f"{prefix}-{rng.choice(_ALL_WORDS)}-{rng.randrange(1000)}"
        node_id = NodeId(local)
        if node_id not in used:
            used.add(node_id)
            return node_id


def _phrase(rng: random.Random, lo: int = 1, hi: int = 4) -> str:
    return " ".join(rng.choice(_ALL_WORDS) for _ in range(rng.randint(lo, hi)))


def _name(rng: random.Random) -> str:
    return _phrase(rng, 2, 5).capitalize()


def _rich(
    rng: random.Random,
    link_pool: list[NodeId],
    allow_external: bool,
) -> RichText:
    segments: list = []
    for index in range(rng.randint(1, 4)):
        if index % 2 == 0:
            segments.append(_phrase(rng))
        else:
            target = _pick_target(rng, link_pool, allow_external)
            if target is None:
                break
            display = _phrase(rng) if rng.random() < 0.6 else target.local.replace("-", " ")
            segments.append(LinkSegment(target, display))
    if isinstance(segments[-1], LinkSegment) and rng.random() < 0.5:
        segments.append(_phrase(rng))
    return RichText(tuple(segments))


def _pick_target(
    rng: random.Random,
    pool: list[NodeId],
    allow_external: bool,
) -> Optional[NodeId]:
    if allow_external and rng.random() < 0.12:
        return NodeId(f"far-{rng.choice(_ALL_WORDS)}", EXTERNAL_NS)
    if not pool:
        return None
    return rng.choice(pool)


def _some(rng: random.Random, pool: list[NodeId], hi: int = 3) -> tuple[NodeId, ...]:
    if not pool:
        return ()
    count = rng.randint(0, min(hi, len(pool)))
    return tuple(rng.sample(pool, count))


@dataclass
class GeneratedKB:
    nodes: list[Node]
    manifest: Manifest
    manifest_text: str

    def graph(self) -> KnowledgeGraph:
        return KnowledgeGraph(
            nodes={node.id: node for node in self.nodes},
            manifest=self.manifest,
        )

    def partitions(self, rng: random.Random, count: int) -> list[list[Node]]:
        pieces: list[list[Node]] = [[] for _ in range(count)]
        for node in self.nodes:
            pieces[rng.randrange(count)].append(node)
        return [piece for piece in pieces if piece] or [[]]

    def write(self, root: Path, pieces: Optional[list[list[Node]]] = None) -> None:
        root.mkdir(parents=True, exist_ok=True)
        if pieces is None:
            pieces = [self.nodes]
        for index, piece in enumerate(pieces):
            (root / f"part-{index}.knb").write_text(
                serialize_nodes(piece), encoding="utf-8"
            )
        (root / "knoweb.manifest").write_text(self.manifest_text, encoding="utf-8")


def generate_kb(seed: int, *, allow_external: bool = True) -> GeneratedKB:
    rng = random.Random(seed)
    used: set[NodeId] = set()

    n_domains = rng.randint(1, 3)
    n_concepts = rng.randint(0, 8)
    n_problems = rng.randint(0, 6)
    n_patterns = rng.randint(0, 4)
    n_strategies = rng.randint(0, 5)

    domain_ids = [_fresh_id(rng, used, "dom") for _ in range(n_domains)]
    if n_strategies:
        domain_ids.append(STRATEGIES_DOMAIN_ID)
        used.add(STRATEGIES_DOMAIN_ID)
    concept_ids = [_fresh_id(rng, used, "con") for _ in range(n_concepts)]
    problem_ids = [_fresh_id(rng, used, "pro") for _ in range(n_problems)]
    pattern_ids = [_fresh_id(rng, used, "pat") for _ in range(n_patterns)]
    strategy_ids = [_fresh_id(rng, used, "str") for _ in range(n_strategies)]

    def genspec(index: int, ids: list[NodeId]) -> tuple[tuple[NodeId, ...], tuple[NodeId, ...]]:
        # gens point to earlier ids, specs to later ones: acyclic by ranking
        gens = list(_some(rng, ids[:index], 2))
        if allow_external and rng.random() < 0.1:
            gens.append(NodeId(f"far-{rng.choice(_ALL_WORDS)}", EXTERNAL_NS))
        specs = _some(rng, ids[index + 1 :], 2)
        return tuple(gens), specs

    nodes: list[Node] = []
    for index, node_id in enumerate(domain_ids):
        gens, specs = genspec(index, domain_ids)
        nodes.append(
            DomainNode(
                id=node_id,
                name=_name(rng),
                generalizations=gens,
                specializations=specs,
                prominent_concepts=_some(rng, concept_ids),
                prominent_problems=_some(rng, problem_ids),
            )
        )
    non_strategy_domains = [d for d in domain_ids if d != STRATEGIES_DOMAIN_ID]
    any_domain = non_strategy_domains or domain_ids
    for index, node_id in enumerate(concept_ids):
        gens, specs = genspec(index, concept_ids)
        nodes.append(
            ConceptNode(
                id=node_id,
                name=_name(rng),
                definition=_rich(rng, concept_ids, allow_external),
                generalizations=gens,
                specializations=specs,
                problems=_some(rng, problem_ids, 2),
                domain=rng.choice(any_domain),
            )
        )
    for index, node_id in enumerate(problem_ids):
        gens, specs = genspec(index, problem_ids)
        nodes.append(
            ProblemNode(
                id=node_id,
                names=tuple(_name(rng) for _ in range(rng.randint(0, 2))),
                description=_rich(rng, concept_ids, allow_external),
                generalizations=gens,
                specializations=specs,
                domain=rng.choice(any_domain),
            )
        )
    for node_id in pattern_ids:
        if not problem_ids:
            break
        steps = list(_some(rng, problem_ids, 3))
        if allow_external and rng.random() < 0.15:
            steps.append(NodeId(f"far-{rng.choice(_ALL_WORDS)}", EXTERNAL_NS))
        if not steps:
            steps = [rng.choice(problem_ids)]
        nodes.append(
            PatternNode(
                id=node_id,
                name=_name(rng) if rng.random() < 0.7 else None,
                problem=rng.choice(problem_ids),
                strategy=rng.choice(strategy_ids) if strategy_ids and rng.random() < 0.6 else None,
                steps=tuple(steps),
                domain=rng.choice(any_domain),
            )
        )
    for index, node_id in enumerate(strategy_ids):
        gens, specs = genspec(index, strategy_ids)
        nodes.append(
            StrategyNode(
                id=node_id,
                names=tuple(_name(rng) for _ in range(rng.randint(0, 2))),
                description=_rich(rng, concept_ids + strategy_ids, allow_external),
                generalizations=gens,
                specializations=specs,
                steps=_some(rng, strategy_ids, 2),
                domain=STRATEGIES_DOMAIN_ID,
            )
        )

    namespaces = {}
    manifest_lines = ["# generated for tests", "fanout-threshold 12"]
    if allow_external:
        namespaces[EXTERNAL_NS] = EXTERNAL_URL
        manifest_lines.append(f"namespace {EXTERNAL_NS} {EXTERNAL_URL}")
    primitives = set()
    for problem_id in problem_ids:
        if rng.random() < 0.2:
            primitives.add(problem_id)
            manifest_lines.append(f"primitive {problem_id}")
    manifest = Manifest(
        namespaces=namespaces,
        primitives=frozenset(primitives),
        fanout_threshold=12,
    )
    return GeneratedKB(
        nodes=nodes,
        manifest=manifest,
        manifest_text="\n".join(manifest_lines) + "\n",
    )


def inject_cycle(kb_graph: KnowledgeGraph, rng: random.Random) -> KnowledgeGraph:
    """Add one generalization cycle (possibly a self-loop) to the graph."""
    by_kind: dict = {}
    for node in kb_graph.nodes.values():
        if hasattr(node, "generalizations"):
            by_kind.setdefault(node.kind, []).append(node)
    kind = rng.choice(sorted(by_kind, key=lambda k: k.value))
    members = by_kind[kind]
    length = rng.randint(1, min(3, len(members)))
    chosen = rng.sample(members, length)
    nodes = dict(kb_graph.nodes)
    for here, nxt in zip(chosen, chosen[1:] + chosen[:1]):
        node = nodes[here.id]
        nodes[here.id] = replace(
            node, generalizations=node.generalizations + (nxt.id,)
        )
    return replace(kb_graph, nodes=nodes)


def random_usability_instance(
    seed: int,
) -> tuple[KnowledgeGraph, frozenset[NodeId], dict, frozenset[str]]:
    """A small problem/pattern graph plus its plain-string oracle form."""
    rng = random.Random(seed)
    n_problems = rng.randint(0, 8)
    n_patterns = rng.randint(0, 8)
    problem_ids = [NodeId(f"p{i}") for i in range(n_problems)]
    externals = [NodeId("beyond-a", EXTERNAL_NS), NodeId("beyond-b", EXTERNAL_NS)]

    nodes: dict[NodeId, Node] = {}
    for node_id in problem_ids:
        nodes[node_id] = ProblemNode(id=node_id, names=(node_id.local,))
    oracle_patterns: dict[str, tuple[Optional[str], tuple[str, ...]]] = {}
    for i in range(n_patterns):
        node_id = NodeId(f"q{i}")
        step_pool = problem_ids + externals
        steps = tuple(
            rng.choice(step_pool) for _ in range(rng.randint(0, 3))
        )
        problem = rng.choice(problem_ids + [None, externals[0]]) if problem_ids else rng.choice([None, externals[0]])
        nodes[node_id] = PatternNode(id=node_id, problem=problem, steps=steps)
        oracle_patterns[str(node_id)] = (
            str(problem) if problem is not None else None,
            tuple(str(s) for s in steps),
        )
    primitives = frozenset(p for p in problem_ids if rng.random() < 0.35)
    graph = KnowledgeGraph(nodes=nodes, manifest=Manifest(namespaces={EXTERNAL_NS: EXTERNAL_URL}))
    return (
        graph,
        primitives,
        oracle_patterns,
        frozenset(str(p) for p in primitives),
    )
