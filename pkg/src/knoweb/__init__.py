"""knoweb: compile plain-text knowledge bases into validated static sites."""

from .analysis import (
    AnalysisError,
    ShortcutClass,
    ShortcutPath,
    StatsReport,
    UsabilityLabeling,
    classify_directions,
    complete_inverses,
    find_shortcuts,
    graph_stats,
    similarity_neighbors,
    strategy_usability,
    usability_closure,
)
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
    Severity,
    SourceLocation,
    StrategyNode,
    STRATEGIES_DOMAIN_ID,
    display_name,
    has_errors,
    link_targets,
    node_names,
    sort_diagnostics,
)
from .parser import (
    DEFAULT_FANOUT_THRESHOLD,
    MANIFEST_NAME,
    elaborate_draft,
    load_knowledge_base,
    parse_inline_links,
    parse_manifest,
    parse_source,
    serialize_node,
    serialize_nodes,
)
from .site import (
    EDGE_KINDS,
    SiteError,
    SiteManifest,
    emit_site,
    export_graph,
    node_url,
    page_path,
)
from .validate import (
    check_acyclicity,
    check_inverse_consistency,
    check_strategy_domain,
    lint_fanout,
    resolve_links,
    run_checks,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "ConceptNode",
    "DEFAULT_FANOUT_THRESHOLD",
    "Diagnostic",
    "DomainNode",
    "EDGE_KINDS",
    "KnowledgeGraph",
    "LinkSegment",
    "MANIFEST_NAME",
    "Manifest",
    "Node",
    "NodeId",
    "NodeKind",
    "PatternNode",
    "ProblemNode",
    "RichText",
    "STRATEGIES_DOMAIN_ID",
    "Severity",
    "ShortcutClass",
    "ShortcutPath",
    "SiteError",
    "SiteManifest",
    "SourceLocation",
    "StatsReport",
    "StrategyNode",
    "UsabilityLabeling",
    "check_acyclicity",
    "check_inverse_consistency",
    "check_strategy_domain",
    "classify_directions",
    "complete_inverses",
    "display_name",
    "elaborate_draft",
    "emit_site",
    "export_graph",
    "find_shortcuts",
    "graph_stats",
    "has_errors",
    "lint_fanout",
    "link_targets",
    "load_knowledge_base",
    "node_names",
    "node_url",
    "page_path",
    "parse_inline_links",
    "parse_manifest",
    "parse_source",
    "resolve_links",
    "run_checks",
    "serialize_node",
    "serialize_nodes",
    "similarity_neighbors",
    "sort_diagnostics",
    "strategy_usability",
    "usability_closure",
]
