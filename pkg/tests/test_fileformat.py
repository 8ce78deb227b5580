import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersync import build_hypergraph, list_examples, parse_hypergraph_file, print_document
from hypersync.datasets import example_text
from hypersync.exceptions import DocumentSemanticError, DocumentSyntaxError
from hypersync.fileformat import document_from_hypergraph


@pytest.mark.parametrize("name", list_examples())
def test_round_trip(name):
    doc = parse_hypergraph_file(example_text(name))
    text = print_document(doc)
    again = parse_hypergraph_file(text)
    assert again == doc
    assert again.matrices == doc.matrices and again.coupling == doc.coupling
    assert print_document(again) == text


def test_fig2_contents(docs):
    H = docs["fig2"].hypergraph()
    assert (H.n, H.m) == (4, 3)


def test_fraction_weight():
    doc = parse_hypergraph_file('{"nodes": 2, "edges": [{"tail": ["1"], "head": ["2"], "weight": "3/2"}]}')
    assert doc.edges[0].weight == Fraction(3, 2)
    assert '"3/2"' in print_document(doc)


def _bad(text):
    with pytest.raises(DocumentSemanticError) as info:
        parse_hypergraph_file(text)
    return info.value


BAD_MULT = """{
  "nodes": 2,
  "edges": [
    {"tail": [["1", 0]], "head": ["2"]}
  ]
}"""


def test_zero_multiplicity_reports_line():
    err = _bad(BAD_MULT)
    assert err.line == 4 and "multiplicity" in str(err)


def test_zero_denominator():
    err = _bad('{"nodes": 2,\n "edges": [{"tail": ["1"], "head": ["2"], "weight": "1/0"}]}')
    assert err.line == 2 and err.path.endswith("weight")


def test_syntax_error_position():
    with pytest.raises(DocumentSyntaxError) as info:
        parse_hypergraph_file('{"nodes": 2,\n  "edges": [}')
    assert info.value.line == 2 and info.value.column is not None


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"nodes": 2, "edges": [{"tail": ["3"], "head": ["1"]}]}', "unknown node"),
        ('{"nodes": 2, "edges": [{"tail": ["1"], "head": ["9"]}]}', "unknown node"),
        ('{"nodes": 2, "edges": [{"id": "a", "tail": ["1"], "head": ["2"]}, {"id": "a", "tail": ["2"], "head": ["1"]}]}', "a"),
        ('{"nodes": 2, "edges": [{"tail": [], "head": ["1"]}]}', "tail"),
        ('{"nodes": 2, "edges": [{"tail": ["1"], "head": []}]}', "head"),
        ('{"nodes": 2, "matrices": {"K": [[1, 2]], "H": [[0, 0], [0, 0]]}}', ""),
        ('{"nodes": 2, "coupling": {"family": "sigmoid"}}', ""),
        ('{"nodes": 2, "extra": 1}', "unknown"),
        ('{"nodes": true}', "nodes"),
        ('{"format": "other/2", "nodes": 1}', "format"),
        ('[1, 2]', "object"),
    ],
)
def test_semantic_errors(text, fragment):
    assert fragment in str(_bad(text))


def test_labels_and_bare_tail():
    doc = parse_hypergraph_file('{"nodes": ["a", "b"], "edges": [{"tail": ["a", ["b", 2]], "head": ["a"]}]}')
    H = doc.hypergraph()
    assert H.labels == ("a", "b")
    assert sorted(H.edges[0].tail_nodes()) == [0, 1, 1]


labels = st.lists(st.sampled_from("abcdefgh"), min_size=1, max_size=5, unique=True)


@st.composite
def documents(draw):
    labs = draw(labels)
    node = st.sampled_from(labs)
    edges = []
    for j in range(draw(st.integers(0, 5))):
        tail = draw(st.dictionaries(node, st.integers(1, 3), min_size=1, max_size=3))
        head = draw(st.lists(node, min_size=1, max_size=3, unique=True))
        w = draw(st.fractions(min_value=-5, max_value=5, max_denominator=9))
        edges.append({"id": f"e{j + 1}", "tail": sorted(tail.items()), "head": head, "weight": w})
    return build_hypergraph(labs, edges)


@settings(max_examples=60, deadline=None)
@given(documents())
def test_round_trip_property(H):
    doc = document_from_hypergraph(H)
    again = parse_hypergraph_file(print_document(doc))
    assert again == doc
    G = again.hypergraph()
    assert G.labels == H.labels
    assert [(e.weight, sorted(e.tail_nodes()), sorted(e.head)) for e in G.edges] == [
        (e.weight, sorted(e.tail_nodes()), sorted(e.head)) for e in H.edges
    ]
    json.loads(print_document(doc))
