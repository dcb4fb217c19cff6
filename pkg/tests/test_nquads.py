"""Dataset text syntax: serialization, parsing, escapes, skolemization."""

import pytest

from quadvc.model import DEFAULT, Dataset, Iri, Literal, Triple
from quadvc.nquads import (
    SKOLEM_PREFIX, ParseError, format_atom, parse_atom, parse_dataset,
    seeded_skolem, serialize_dataset, serialize_graph,
)

from generators import atom_pool, make_rng, random_dataset

SEED = 2026_02
ROUND_TRIPS = 300

A, B = Iri("urn:x:a"), Iri("urn:x:b")
P = Iri("urn:x:p")
G1 = Iri("urn:g1")


def test_format_atom_forms():
    assert format_atom(A) == "<urn:x:a>"
    assert format_atom(Literal("hi")) == '"hi"'
    assert format_atom(Literal("hi", language="en")) == '"hi"@en'
    assert format_atom(Literal("1", datatype="urn:t:int")) == '"1"^^<urn:t:int>'


def test_string_escapes_round_trip():
    nasty = Literal('a"b\\c\nd\te\rf\x01g')
    d = Dataset.of({Triple(A, P, nasty)}, {})
    assert parse_dataset(serialize_dataset(d)) == d


def test_serialization_is_sorted_and_stable():
    d = Dataset.of({Triple(B, P, A), Triple(A, P, B)}, {G1: {Triple(A, P, A)}})
    text = serialize_dataset(d)
    assert text == ("<urn:x:a> <urn:x:p> <urn:x:b> .\n"
                    "<urn:x:b> <urn:x:p> <urn:x:a> .\n"
                    "<urn:x:a> <urn:x:p> <urn:x:a> <urn:g1> .\n")
    assert serialize_dataset(parse_dataset(text)) == text


def test_empty_dataset_serializes_to_nothing():
    assert serialize_dataset(Dataset()) == ""
    assert parse_dataset("") == Dataset()


def test_empty_named_graph_survives_the_round_trip():
    """N-Quads cannot express a graph with no triples, so the format
    adds a bare-name line; dropping it loses definedness."""
    d = Dataset.of(set(), {G1: set()})
    text = serialize_dataset(d)
    assert text == "<urn:g1> .\n"
    again = parse_dataset(text)
    assert again.defined(G1)
    assert again == d


def test_comments_and_blank_lines_ignored():
    text = "# header\n\n<urn:x:a> <urn:x:p> <urn:x:b> .\n   \n"
    assert parse_dataset(text) == Dataset.of({Triple(A, P, B)}, {})


def test_literal_graph_label_round_trips():
    d = Dataset.of(set(), {Literal("g"): {Triple(A, P, B)}})
    assert parse_dataset(serialize_dataset(d)) == d


def test_parse_error_reports_line_and_column():
    with pytest.raises(ParseError) as exc:
        parse_dataset("<urn:x:a> <urn:x:p> .\n")
    assert "line 1" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        parse_dataset("<urn:x:a> <urn:x:p> <urn:x:b> .\n<urn:q> nope .\n")
    assert "line 2" in str(exc.value)


def test_parse_rejects_five_terms_and_missing_dot():
    with pytest.raises(ParseError):
        parse_dataset("<urn:a> <urn:b> <urn:c> <urn:d> <urn:e> .\n")
    with pytest.raises(ParseError):
        parse_dataset("<urn:a> <urn:b> <urn:c>\n")
    with pytest.raises(ParseError):
        parse_dataset("<urn:a> <urn:b> <urn:c> . junk\n")


def test_blank_nodes_become_stable_skolems_within_a_document():
    d = parse_dataset("_:n <urn:x:p> _:n .\n_:n <urn:x:p> _:m .\n")
    triples = sorted(d.default, key=repr)
    subjects = {t.subject for t in d.default}
    assert len(subjects) == 1
    node = subjects.pop()
    assert isinstance(node, Iri) and node.value.startswith(SKOLEM_PREFIX)
    objects = {t.object for t in d.default}
    assert node in objects and len(objects) == 2
    assert len(triples) == 2


def test_blank_nodes_differ_across_documents():
    one = parse_dataset("_:n <urn:x:p> <urn:x:a> .\n")
    two = parse_dataset("_:n <urn:x:p> <urn:x:a> .\n")
    s1 = next(iter(one.default)).subject
    s2 = next(iter(two.default)).subject
    assert s1 != s2


def test_seeded_skolem_is_deterministic():
    assert seeded_skolem("seed", "n") == seeded_skolem("seed", "n")
    assert seeded_skolem("seed", "n") != seeded_skolem("seed", "m")
    assert seeded_skolem("other", "n") != seeded_skolem("seed", "n")
    assert seeded_skolem("seed", "n").value.startswith(SKOLEM_PREFIX)


def test_parse_atom():
    assert parse_atom("<urn:x:a>") == A
    assert parse_atom('"hi"@en') == Literal("hi", language="en")
    assert parse_atom('"1"^^<urn:t:int>') == Literal("1", datatype="urn:t:int")
    with pytest.raises(ParseError):
        parse_atom("<urn:x:a> <urn:x:b>")


def test_serialize_graph_has_no_label_column():
    text = serialize_graph({Triple(A, P, B)})
    assert text == "<urn:x:a> <urn:x:p> <urn:x:b> .\n"


def test_random_round_trips():
    rng = make_rng(SEED)
    pool = atom_pool(rng)
    for _ in range(ROUND_TRIPS):
        d = random_dataset(rng, pool)
        text = serialize_dataset(d)
        again = parse_dataset(text)
        assert again == d
        assert serialize_dataset(again) == text
