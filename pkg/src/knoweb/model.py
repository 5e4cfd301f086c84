"""Typed nodes, links, diagnostics, and the knowledge graph they form.

A knowledge base is a graph of five node kinds (concepts, problems,
solution patterns, strategies, and domains) connected by typed links.
Every other module consumes the structures defined here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Mapping, NamedTuple, Optional, Union

_TOKEN_RE = re.compile(r"[a-z0-9][a-z0-9-]*\Z")


@dataclass(frozen=True)
class NodeId:
    """Stable identifier of a node: an optional namespace plus a local token.

    The local part matches ``[a-z0-9][a-z0-9-]*``. A namespace marks the
    node as living in an externally hosted part of the base; local nodes
    have none.
    """

    local: str
    namespace: Optional[str] = None

    @classmethod
    def parse(cls, text: str) -> "NodeId":
        """Parse ``local`` or ``namespace:local``. Raises ValueError."""
        namespace: Optional[str] = None
        local = text
        if ":" in text:
            namespace, _, local = text.partition(":")
            if not _TOKEN_RE.match(namespace or ""):
                raise ValueError(f"malformed namespace in id {text!r}")
        if not _TOKEN_RE.match(local or ""):
            raise ValueError(f"malformed id {text!r}")
        return cls(local=local, namespace=namespace)

    @property
    def is_external(self) -> bool:
        return self.namespace is not None

    def __str__(self) -> str:
        if self.namespace is not None:
            return f"{self.namespace}:{self.local}"
        return self.local


class NodeKind(Enum):
    CONCEPT = "concept"
    PROBLEM = "problem"
    PATTERN = "pattern"
    STRATEGY = "strategy"
    DOMAIN = "domain"


@dataclass(frozen=True)
class LinkSegment:
    """An inline reference inside rich text: a target id plus display text."""

    target: NodeId
    display: str


Segment = Union[str, LinkSegment]


@dataclass(frozen=True)
class RichText:
    """Prose made of literal runs and inline links, in reading order.

    Concatenating the literals and link display texts reproduces the
    human-readable sentence.
    """

    segments: tuple[Segment, ...] = ()

    def plain(self) -> str:
        return "".join(
            seg if isinstance(seg, str) else seg.display for seg in self.segments
        )

    def links(self) -> Iterator[LinkSegment]:
        for seg in self.segments:
            if isinstance(seg, LinkSegment):
                yield seg

    def is_empty(self) -> bool:
        return self.plain().strip() == ""


@dataclass(frozen=True)
class SourceLocation:
    file: str = ""
    line: int = 0


_NOWHERE = SourceLocation()


@dataclass(frozen=True)
class ConceptNode:
    """A named idea defined through links to other concepts."""

    id: NodeId
    name: str = ""
    definition: RichText = RichText()
    generalizations: tuple[NodeId, ...] = ()
    specializations: tuple[NodeId, ...] = ()
    used_in: tuple[NodeId, ...] = ()  # derived: concepts whose definition links here
    problems: tuple[NodeId, ...] = ()
    domain: Optional[NodeId] = None
    location: SourceLocation = field(default=_NOWHERE, compare=False)

    kind = NodeKind.CONCEPT


@dataclass(frozen=True)
class ProblemNode:
    """A clearly expressible goal in a context, not immediately accessible."""

    id: NodeId
    names: tuple[str, ...] = ()
    description: RichText = RichText()
    generalizations: tuple[NodeId, ...] = ()
    specializations: tuple[NodeId, ...] = ()
    motivates: tuple[NodeId, ...] = ()  # derived: patterns using this as a step
    solutions: tuple[NodeId, ...] = ()  # derived: patterns whose problem is this
    domain: Optional[NodeId] = None
    location: SourceLocation = field(default=_NOWHERE, compare=False)

    kind = NodeKind.PROBLEM


@dataclass(frozen=True)
class PatternNode:
    """An ordered decomposition of one problem into subproblems."""

    id: NodeId
    name: Optional[str] = None
    problem: Optional[NodeId] = None
    strategy: Optional[NodeId] = None
    steps: tuple[NodeId, ...] = ()
    domain: Optional[NodeId] = None
    location: SourceLocation = field(default=_NOWHERE, compare=False)

    kind = NodeKind.PATTERN


@dataclass(frozen=True)
class StrategyNode:
    """A domain-independent abstract problem plus its abstract solution.

    Steps reference other strategies (strategic subproblems); a strategy
    with zero steps is atomic. The domain link always names the
    distinguished ``strategies`` domain.
    """

    id: NodeId
    names: tuple[str, ...] = ()
    description: RichText = RichText()
    generalizations: tuple[NodeId, ...] = ()
    specializations: tuple[NodeId, ...] = ()
    steps: tuple[NodeId, ...] = ()
    pattern_specializations: tuple[NodeId, ...] = ()  # derived: patterns linking here
    domain: Optional[NodeId] = None
    location: SourceLocation = field(default=_NOWHERE, compare=False)

    kind = NodeKind.STRATEGY


@dataclass(frozen=True)
class DomainNode:
    """A labeled field of activity classifying related nodes."""

    id: NodeId
    name: str = ""
    generalizations: tuple[NodeId, ...] = ()
    specializations: tuple[NodeId, ...] = ()
    prominent_concepts: tuple[NodeId, ...] = ()
    prominent_problems: tuple[NodeId, ...] = ()
    location: SourceLocation = field(default=_NOWHERE, compare=False)

    kind = NodeKind.DOMAIN


Node = Union[ConceptNode, ProblemNode, PatternNode, StrategyNode, DomainNode]

STRATEGIES_DOMAIN_ID = NodeId("strategies")


@dataclass(frozen=True)
class Manifest:
    """Per-base configuration: external namespaces, primitives, lint knobs."""

    namespaces: Mapping[str, str] = field(default_factory=dict)
    primitives: frozenset[NodeId] = frozenset()
    fanout_threshold: int = 12


@dataclass(frozen=True)
class KnowledgeGraph:
    """All nodes of one base plus its manifest.

    ``resolved`` is set by the validator once every local reference has been
    checked; a resolved graph is immutable and safe to share across readers.
    """

    nodes: Mapping[NodeId, Node] = field(default_factory=dict)
    manifest: Manifest = Manifest()
    resolved: bool = False

    def with_nodes(self, nodes: Mapping[NodeId, Node]) -> "KnowledgeGraph":
        return replace(self, nodes=nodes)


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """A coded finding about the base. The code's first letter fixes severity."""

    code: str
    message: str
    file: str = ""
    line: int = 0
    node: Optional[NodeId] = None
    field: Optional[str] = None

    @property
    def severity(self) -> Severity:
        return Severity.ERROR if self.code.startswith("E") else Severity.WARNING

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def render(self) -> str:
        parts = [self.severity.value, self.code]
        if self.file:
            parts.append(f"{self.file}:{self.line}")
        subject = str(self.node) if self.node is not None else ""
        if self.field:
            subject = f"{subject}.{self.field}" if subject else self.field
        if subject:
            parts.append(subject)
        return " ".join(parts) + " — " + self.message

    def sort_key(self) -> tuple:
        return (self.file, self.line, self.code, str(self.node or ""), self.field or "", self.message)


def sort_diagnostics(diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    """Stable presentation order: (file, line, code)."""
    return sorted(diagnostics, key=Diagnostic.sort_key)


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


class LinkTarget(NamedTuple):
    """One outgoing reference: owning field, target id, acceptable target kinds."""

    field: str
    target: NodeId
    expected: tuple[NodeKind, ...]


def _rich_links(field_name: str, text: RichText, expected: tuple[NodeKind, ...]):
    return [LinkTarget(field_name, link.target, expected) for link in text.links()]


def _id_list(field_name: str, ids: tuple[NodeId, ...], expected: tuple[NodeKind, ...]):
    return [LinkTarget(field_name, target, expected) for target in ids]


def _single(field_name: str, target: Optional[NodeId], expected: tuple[NodeKind, ...]):
    return [] if target is None else [LinkTarget(field_name, target, expected)]


_CONCEPT = (NodeKind.CONCEPT,)
_PROBLEM = (NodeKind.PROBLEM,)
_PATTERN = (NodeKind.PATTERN,)
_STRATEGY = (NodeKind.STRATEGY,)
_DOMAIN = (NodeKind.DOMAIN,)


def link_targets(node: Node) -> list[LinkTarget]:
    """Every outgoing reference of ``node`` with the kind its field demands.

    Order is deterministic: schema field order, then list order (for rich
    text, reading order).
    """
    if isinstance(node, ConceptNode):
        return (
            _rich_links("definition", node.definition, _CONCEPT)
            + _id_list("generalizations", node.generalizations, _CONCEPT)
            + _id_list("specializations", node.specializations, _CONCEPT)
            + _id_list("used-in", node.used_in, _CONCEPT)
            + _id_list("problems", node.problems, _PROBLEM)
            + _single("domain", node.domain, _DOMAIN)
        )
    if isinstance(node, ProblemNode):
        return (
            _rich_links("description", node.description, _CONCEPT)
            + _id_list("generalizations", node.generalizations, _PROBLEM)
            + _id_list("specializations", node.specializations, _PROBLEM)
            + _id_list("motivates", node.motivates, _PATTERN)
            + _id_list("solutions", node.solutions, _PATTERN)
            + _single("domain", node.domain, _DOMAIN)
        )
    if isinstance(node, PatternNode):
        return (
            _single("problem", node.problem, _PROBLEM)
            + _single("strategy", node.strategy, _STRATEGY)
            + _id_list("steps", node.steps, _PROBLEM)
            + _single("domain", node.domain, _DOMAIN)
        )
    if isinstance(node, StrategyNode):
        return (
            _rich_links("description", node.description, (NodeKind.CONCEPT, NodeKind.STRATEGY))
            + _id_list("generalizations", node.generalizations, _STRATEGY)
            + _id_list("specializations", node.specializations, _STRATEGY)
            + _id_list("steps", node.steps, _STRATEGY)
            + _id_list("pattern-specializations", node.pattern_specializations, _PATTERN)
            + _single("domain", node.domain, _DOMAIN)
        )
    if isinstance(node, DomainNode):
        return (
            _id_list("generalizations", node.generalizations, _DOMAIN)
            + _id_list("specializations", node.specializations, _DOMAIN)
            + _id_list("prominent-concepts", node.prominent_concepts, _CONCEPT)
            + _id_list("prominent-problems", node.prominent_problems, _PROBLEM)
        )
    raise TypeError(f"not a node: {node!r}")


def node_names(node: Node) -> tuple[str, ...]:
    """All display names of ``node``, first one primary."""
    if isinstance(node, (ProblemNode, StrategyNode)):
        return node.names
    if isinstance(node, PatternNode):
        return (node.name,) if node.name else ()
    return (node.name,) if node.name else ()


def display_name(node: Node) -> str:
    """Primary human-readable label: first name, else the id's local part."""
    names = node_names(node)
    if names:
        return names[0]
    return node.id.local.replace("-", " ")
