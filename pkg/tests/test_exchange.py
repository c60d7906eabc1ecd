from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgbench.exchange import (
    DataFormat,
    ExchangeError,
    GroundTruthBundle,
    KeDoc,
    Link,
    MatchRecord,
    MatchSet,
    SurfaceTriple,
    parse_ke_doc,
    parse_ke_docs,
    parse_match_set,
    serialize_ke_doc,
    serialize_ke_docs,
    serialize_match_set,
)


def test_empty_match_set():
    assert len(parse_match_set("[]")) == 0


def test_single_record():
    ms = parse_match_set('[{"id1":"http://a","id2":"http://b","type":"entity","score":0.99}]')
    assert list(ms) == [MatchRecord("http://a", "http://b", "entity", 0.99)]


@pytest.mark.parametrize(
    "record, needle",
    [
        ({"id1": "a", "id2": "b", "type": "entity", "score": 1.5}, "outside"),
        ({"id1": "a", "id2": "b", "type": "entity"}, "missing key 'score'"),
        ({"id1": "a", "id2": "b", "type": "class", "score": 0.5}, "unknown type"),
        ({"id1": "", "id2": "b", "type": "entity", "score": 0.5}, "id1"),
        ({"id1": "a", "id2": "b", "type": "entity", "score": "high"}, "number"),
    ],
)
def test_invalid_record_names_index(record, needle):
    ok = {"id1": "x", "id2": "y", "type": "relation", "score": 0.1}
    with pytest.raises(ExchangeError) as info:
        parse_match_set(json.dumps([ok, record]))
    assert info.value.index == 1
    assert needle in str(info.value)


def test_numeric_ids_accepted():
    (r,) = parse_match_set('[{"id1": 7, "id2": "b", "type": "entity", "score": 1}]')
    assert r.id1 == "7"


def test_duplicates_keep_max_score():
    ms = MatchSet.of([MatchRecord("a", "b", "entity", 0.3), MatchRecord("a", "b", "entity", 0.8)])
    assert [r.score for r in ms] == [0.8]


def test_canonical_order_and_keys():
    ms = MatchSet.of([MatchRecord("z", "y", "relation", 1.0), MatchRecord("b", "a", "entity", 0.5)])
    data = json.loads(serialize_match_set(ms))
    assert [list(d) for d in data] == [["id1", "id2", "type", "score"]] * 2
    assert [d["type"] for d in data] == ["entity", "relation"]


records = st.builds(
    MatchRecord,
    st.sampled_from(["http://a/1", "http://a/2", "3"]),
    st.sampled_from(["http://b/1", "http://b/2"]),
    st.sampled_from(["entity", "relation"]),
    st.floats(0, 1),
)


@given(st.lists(records, max_size=20))
def test_match_set_round_trip(rs):
    text = serialize_match_set(MatchSet.of(rs))
    assert serialize_match_set(parse_match_set(text)) == text


def test_empty_ke_doc():
    doc = parse_ke_doc('{"text": "", "triples": [], "links": []}')
    assert doc == KeDoc()


def test_ke_doc_with_triple_and_link():
    doc = parse_ke_doc(json.dumps({
        "text": "Alpha was directed by Bob.",
        "triples": [{"head": "Alpha", "rel": "directed by", "tail": "Bob"}],
        "links": [{"form": "Alpha", "link": "http://kg/film1", "score": 0.8}],
    }))
    assert doc.triples == (SurfaceTriple("Alpha", "directed by", "Bob"),)
    assert doc.links[0].score == 0.8


@pytest.mark.parametrize(
    "payload",
    [
        {"text": "", "triples": [{"head": 1, "rel": "r", "tail": "t"}], "links": []},
        {"text": "", "triples": [], "links": [{"form": "", "link": "x", "score": 0.5}]},
        {"text": "", "triples": [], "links": [{"form": "f", "link": "x", "score": 2}]},
        {"text": "", "triples": []},
        ["not", "an", "object"],
    ],
)
def test_ke_doc_validation(payload):
    with pytest.raises(ExchangeError):
        parse_ke_doc(json.dumps(payload))


def test_links_sorted_triples_keep_order():
    doc = KeDoc("t", (SurfaceTriple("b", "r", "c"), SurfaceTriple("a", "r", "c")),
                (Link("zeta", "http://z", 0.9), Link("alpha", "http://a", 0.9)))
    data = json.loads(serialize_ke_doc(doc))
    assert [ln["form"] for ln in data["links"]] == ["alpha", "zeta"]
    assert [t["head"] for t in data["triples"]] == ["b", "a"]


def test_best_links_tie_breaks_on_iri():
    doc = KeDoc(links=(Link("f", "http://b", 0.9), Link("f", "http://a", 0.9), Link("g", "http://c", 0.5)))
    best = doc.best_links()
    assert best["f"].link == "http://a" and best["g"].link == "http://c"


text = st.text(max_size=10)
ke_docs = st.builds(
    KeDoc,
    text,
    st.lists(st.builds(SurfaceTriple, text, text, text), max_size=4).map(tuple),
    st.lists(st.builds(Link, text.filter(bool), st.sampled_from(["http://x/1", "http://x/2"]), st.floats(0, 1)),
             max_size=4).map(tuple),
)


@given(st.lists(ke_docs, max_size=4))
def test_ke_round_trip(docs):
    out = serialize_ke_docs(docs)
    assert parse_ke_docs(out) == docs
    assert serialize_ke_docs(parse_ke_docs(out)) == out


def test_format_extensions():
    assert {f: f.extension for f in DataFormat} == {
        DataFormat.RDF: ".nt", DataFormat.JSON: ".json", DataFormat.TEXT: ".txt",
        DataFormat.CSV: ".csv", DataFormat.JSON_ER: ".json", DataFormat.JSON_KE: ".json",
    }


def test_ground_truth_round_trip(tmp_path):
    gt = GroundTruthBundle(
        MatchSet.of([MatchRecord("http://r/a", "http://s/a", "entity", 1.0)]),
        [{"id": "http://r/a", "type": "http://o/Film", "label": "A", "sourceId": "http://s/a"}],
        [{"title": "http://www.w3.org/2000/01/rdf-schema#label"}],
        [{"doc": 0, "form": "A", "id": "http://r/a"}],
    )
    gt.write(tmp_path)
    assert GroundTruthBundle.read(tmp_path) == gt


def test_ground_truth_rejects_incomplete_entity(tmp_path):
    GroundTruthBundle(expected_entities=[{"id": "x"}]).write(tmp_path)
    with pytest.raises(ExchangeError):
        GroundTruthBundle.read(tmp_path)
