"""Parser, elaboration, manifest, loader, and canonical writer tests.

The round-trip properties mirror how the format is meant to be used:
model to text to model is the identity, and canonical text is a fixed
point of parse-then-serialize.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knoweb.model import (
    LinkSegment,
    NodeId,
    NodeKind,
    RichText,
    STRATEGIES_DOMAIN_ID,
)
from knoweb.parser import (
    DEFAULT_FANOUT_THRESHOLD,
    elaborate_draft,
    load_knowledge_base,
    parse_inline_links,
    parse_manifest,
    parse_source,
    serialize_node,
    serialize_nodes,
)

from helpers import generate_kb


def parse_all(text, file="mem.knb"):
    drafts, diagnostics = parse_source(text, file=file)
    nodes = []
    for draft in drafts:
        node, more = elaborate_draft(draft)
        diagnostics += more
        nodes.append(node)
    return nodes, diagnostics


def codes(diagnostics):
    return [d.code for d in diagnostics]


class TestInlineLinks:
    def test_plain_text(self):
        rich, diagnostics = parse_inline_links("no links here")
        assert rich.segments == ("no links here",)
        assert diagnostics == []

    def test_link_with_display(self):
        rich, diagnostics = parse_inline_links("see [[root|the roots]] here")
        assert rich.segments == (
            "see ",
            LinkSegment(NodeId("root"), "the roots"),
            " here",
        )
        assert diagnostics == []

    def test_default_display_replaces_hyphens(self):
        rich, _ = parse_inline_links("[[solve-quadratic]]")
        assert rich.segments == (
            LinkSegment(NodeId("solve-quadratic"), "solve quadratic"),
        )

    def test_namespaced_link_display_uses_local_part(self):
        rich, _ = parse_inline_links("[[math:mean-value]]")
        (segment,) = rich.segments
        assert segment.target == NodeId("mean-value", "math")
        assert segment.display == "mean value"

    def test_unterminated_marker(self):
        rich, diagnostics = parse_inline_links("broken [[link", line=7)
        assert rich.segments == ("broken [[link",)
        assert codes(diagnostics) == ["W201"]
        assert diagnostics[0].line == 7

    def test_malformed_id_stays_literal(self):
        rich, diagnostics = parse_inline_links("a [[Bad Id]] b")
        assert rich.segments == ("a [[Bad Id]] b",)
        assert codes(diagnostics) == ["E104"]

    def test_adjacent_literals_merge(self):
        rich, _ = parse_inline_links("x [[No!]] y [[ok|z]]")
        assert rich.segments == ("x [[No!]] y ", LinkSegment(NodeId("ok"), "z"))


class TestParseSource:
    def test_minimal_block(self):
        nodes, diagnostics = parse_all(
            "@concept c1\n"
            "name: thing\n"
            "definition: a thing.\n"
            "domain: d1\n"
        )
        assert diagnostics == []
        (node,) = nodes
        assert node.kind is NodeKind.CONCEPT
        assert node.name == "thing"
        assert node.domain == NodeId("d1")
        assert node.location.line == 1

    def test_continuation_folds_with_single_space(self):
        nodes, diagnostics = parse_all(
            "@domain d1\n"
            "name: a name\n"
            "  split over\n"
            "\tthree lines\n"
        )
        assert diagnostics == []
        assert nodes[0].name == "a name split over three lines"

    def test_column_zero_bare_line_folds_into_open_field(self):
        # a value runs until the next field line, header, or end of file,
        # so even an unindented bare line continues the open field
        nodes, diagnostics = parse_all(
            "@domain d1\nname: a name\nBare continuation\n"
        )
        assert diagnostics == []
        assert nodes[0].name == "a name Bare continuation"

    def test_comments_and_blanks_ignored(self):
        nodes, diagnostics = parse_all(
            "# leading comment\n\n@domain d1\n   # indented comment\nname: x\n\n"
        )
        assert diagnostics == []
        assert nodes[0].name == "x"

    def test_bad_header_skips_block(self):
        nodes, diagnostics = parse_all(
            "@conceptual c1\nname: lost\ndefinition: lost.\n\n@domain d1\nname: kept\n"
        )
        assert codes(diagnostics) == ["E101"]
        assert [str(n.id) for n in nodes] == ["d1"]

    def test_header_without_id(self):
        _, diagnostics = parse_all("@concept\n")
        assert codes(diagnostics) == ["E101"]

    def test_header_with_malformed_id_skips_block(self):
        nodes, diagnostics = parse_all("@concept Not-An-Id\nname: lost\n")
        assert codes(diagnostics) == ["E104"]
        assert nodes == []

    def test_header_with_external_id_rejected(self):
        nodes, diagnostics = parse_all("@concept ext:abroad\nname: lost\n")
        assert codes(diagnostics) == ["E104"]
        assert nodes == []

    def test_field_before_any_block(self):
        _, diagnostics = parse_all("name: floating\n")
        assert codes(diagnostics) == ["E101"]

    def test_unknown_field_swallows_continuations(self):
        nodes, diagnostics = parse_all(
            "@domain d1\n"
            "name: ok\n"
            "frobnicate: nope\n"
            "  swallowed silently\n"
        )
        assert codes(diagnostics) == ["E102"]
        assert nodes[0].name == "ok"

    def test_duplicate_single_field_keeps_first(self):
        nodes, diagnostics = parse_all(
            "@domain d1\n"
            "name: first\n"
            "name: second\n"
            "  and its continuation\n"
        )
        assert codes(diagnostics) == ["E103"]
        assert nodes[0].name == "first"

    def test_repeated_names_allowed_for_problems(self):
        nodes, diagnostics = parse_all(
            "@problem p1\n"
            "name: one\n"
            "name: two\n"
            "description: a problem.\n"
            "domain: d1\n"
        )
        assert diagnostics == []
        assert nodes[0].names == ("one", "two")

    def test_repeated_list_fields_concatenate(self):
        nodes, diagnostics = parse_all(
            "@domain d1\n"
            "name: x\n"
            "specializations: a, b\n"
            "specializations: c\n"
        )
        assert diagnostics == []
        assert nodes[0].specializations == (
            NodeId("a"),
            NodeId("b"),
            NodeId("c"),
        )

    def test_malformed_id_in_list_dropped(self):
        nodes, diagnostics = parse_all(
            "@domain d1\nname: x\nspecializations: ok, Not Ok, fine\n"
        )
        assert codes(diagnostics) == ["E104"]
        assert nodes[0].specializations == (NodeId("ok"), NodeId("fine"))

    def test_duplicate_list_entry_warns_once(self):
        nodes, diagnostics = parse_all(
            "@domain d1\nname: x\nspecializations: a, b, a, b\n"
        )
        assert codes(diagnostics) == ["W108"]
        assert nodes[0].specializations == tuple(
            NodeId(i) for i in ("a", "b", "a", "b")
        )

    def test_missing_required_fields(self):
        _, diagnostics = parse_all("@concept c1\n")
        assert sorted((d.code, d.field) for d in diagnostics) == [
            ("E107", "definition"),
            ("E107", "domain"),
            ("E107", "name"),
        ]

    def test_empty_required_value_is_missing(self):
        _, diagnostics = parse_all("@domain d1\nname:\n")
        assert codes(diagnostics) == ["E107"]

    def test_pattern_requires_problem_steps_domain(self):
        _, diagnostics = parse_all("@pattern q1\nname: lonely\n")
        assert sorted(d.field for d in diagnostics) == ["domain", "problem", "steps"]

    def test_strategy_domain_defaults(self):
        nodes, diagnostics = parse_all("@strategy s1\ndescription: do it.\n")
        assert diagnostics == []
        assert nodes[0].domain == STRATEGIES_DOMAIN_ID

    def test_strategy_explicit_domain_not_overridden(self):
        nodes, _ = parse_all("@strategy s1\ndescription: x.\ndomain: other\n")
        assert nodes[0].domain == NodeId("other")

    def test_rich_text_diagnostics_carry_node_and_field(self):
        _, diagnostics = parse_all(
            "@concept c1\nname: x\ndefinition: see [[broken\ndomain: d1\n"
        )
        (diagnostic,) = [d for d in diagnostics if d.code == "W201"]
        assert diagnostic.node == NodeId("c1")
        assert diagnostic.field == "definition"
        assert diagnostic.line == 3


class TestManifest:
    def test_full_manifest(self):
        manifest, diagnostics = parse_manifest(
            "# comment\n"
            "namespace math https://example.org/math\n"
            "primitive evaluate-quadratic-formula\n"
            "fanout-threshold 20\n"
        )
        assert diagnostics == []
        assert manifest.namespaces == {"math": "https://example.org/math"}
        assert manifest.primitives == frozenset(
            {NodeId("evaluate-quadratic-formula")}
        )
        assert manifest.fanout_threshold == 20

    def test_defaults(self):
        manifest, diagnostics = parse_manifest("")
        assert diagnostics == []
        assert manifest.namespaces == {}
        assert manifest.primitives == frozenset()
        assert manifest.fanout_threshold == DEFAULT_FANOUT_THRESHOLD

    @pytest.mark.parametrize(
        "line",
        [
            "namespace math not-a-url",
            "namespace Math https://example.org/m",
            "namespace math",
            "primitive Not An Id",
            "fanout-threshold twelve",
            "fanout-threshold",
            "unknown directive",
        ],
    )
    def test_malformed_lines(self, line):
        manifest, diagnostics = parse_manifest(line + "\n")
        assert codes(diagnostics) == ["E106"]

    def test_duplicate_namespace_keeps_first(self):
        manifest, diagnostics = parse_manifest(
            "namespace m https://a.example\nnamespace m https://b.example\n"
        )
        assert codes(diagnostics) == ["E106"]
        assert manifest.namespaces == {"m": "https://a.example"}


class TestLoad:
    def test_loads_files_in_sorted_order(self, tmp_path):
        (tmp_path / "b.knb").write_text("@domain d2\nname: two\n")
        (tmp_path / "a.knb").write_text("@domain d1\nname: one\n")
        (tmp_path / "knoweb.manifest").write_text("fanout-threshold 12\n")
        graph, diagnostics = load_knowledge_base(tmp_path)
        assert diagnostics == []
        assert [str(i) for i in graph.nodes] == ["d1", "d2"]

    def test_missing_manifest_warns_and_defaults(self, tmp_path):
        (tmp_path / "a.knb").write_text("@domain d1\nname: one\n")
        graph, diagnostics = load_knowledge_base(tmp_path)
        assert codes(diagnostics) == ["W106"]
        assert graph.manifest.fanout_threshold == DEFAULT_FANOUT_THRESHOLD

    def test_duplicate_id_across_files_keeps_first(self, tmp_path):
        (tmp_path / "a.knb").write_text("@domain d1\nname: first\n")
        (tmp_path / "b.knb").write_text("@domain d1\nname: second\n")
        (tmp_path / "knoweb.manifest").write_text("")
        graph, diagnostics = load_knowledge_base(tmp_path)
        assert codes(diagnostics) == ["E105"]
        assert diagnostics[0].file == "b.knb"
        assert "a.knb" in diagnostics[0].message
        assert graph.nodes[NodeId("d1")].name == "first"

    def test_nested_directories_are_scanned(self, tmp_path):
        (tmp_path / "sub").mkdir()
        (tmp_path / "sub" / "a.knb").write_text("@domain d1\nname: x\n")
        (tmp_path / "knoweb.manifest").write_text("")
        graph, diagnostics = load_knowledge_base(tmp_path)
        assert diagnostics == []
        assert graph.nodes[NodeId("d1")].location.file == "sub/a.knb"


class TestSerialize:
    def test_canonical_block(self):
        nodes, _ = parse_all(
            "@concept c1\n"
            "name: thing\n"
            "definition: a [[link]] here\n"
            "generalizations: a,b ,  c\n"
            "domain: d1\n"
        )
        assert serialize_node(nodes[0]) == (
            "@concept c1\n"
            "name: thing\n"
            "definition: a [[link|link]] here\n"
            "generalizations: a, b, c\n"
            "domain: d1\n"
        )

    def test_blocks_separated_by_blank_line(self):
        nodes, _ = parse_all("@domain d1\nname: x\n\n@domain d2\nname: y\n")
        text = serialize_nodes(nodes)
        assert text == "@domain d1\nname: x\n\n@domain d2\nname: y\n"

    def test_repeated_names_serialize_as_repeated_lines(self):
        nodes, _ = parse_all(
            "@problem p1\nname: one\nname: two\ndescription: d.\ndomain: d1\n"
        )
        assert serialize_node(nodes[0]).count("name: ") == 2

    def test_empty_fields_omitted(self):
        nodes, _ = parse_all("@domain d1\nname: x\n")
        assert serialize_node(nodes[0]) == "@domain d1\nname: x\n"


DISPLAY_TEXT = st.text(
    st.characters(whitelist_categories=("Ll", "Lu", "Nd"), whitelist_characters=" .,'"),
    min_size=1,
    max_size=25,
).filter(lambda s: s == s.strip() and "  " not in s)


@st.composite
def rich_texts(draw):
    segment_count = draw(st.integers(1, 5))
    segments = []
    for index in range(segment_count):
        if index % 2 == 0:
            segments.append(draw(DISPLAY_TEXT))
        else:
            local = draw(st.sampled_from(["alpha", "beta-c", "g0"]))
            segments.append(LinkSegment(NodeId(local), draw(DISPLAY_TEXT)))
    return RichText(tuple(segments))


class TestRoundTripProperties:
    @given(rich_texts())
    @settings(max_examples=200)
    def test_rich_text_round_trip(self, rich):
        from knoweb.parser import _render_rich

        rendered = _render_rich(rich)
        parsed, diagnostics = parse_inline_links(rendered)
        assert diagnostics == []
        assert parsed == rich

    @pytest.mark.parametrize("seed", range(30))
    def test_generated_kb_round_trips(self, seed):
        kb = generate_kb(seed)
        text = serialize_nodes(kb.nodes)
        nodes, diagnostics = parse_all(text, file="part-0.knb")
        assert [d for d in diagnostics if d.is_error] == []
        assert nodes == kb.nodes
        assert serialize_nodes(nodes) == text

    @pytest.mark.parametrize("seed", range(30, 45))
    def test_loading_is_partition_invariant(self, seed, tmp_path):
        kb = generate_kb(seed)
        one = tmp_path / "one"
        many = tmp_path / "many"
        kb.write(one)
        kb.write(many, kb.partitions(random.Random(seed), 3))
        graph_one, _ = load_knowledge_base(one)
        graph_many, _ = load_knowledge_base(many)
        assert graph_one.nodes == graph_many.nodes
        assert graph_one.manifest == graph_many.manifest
