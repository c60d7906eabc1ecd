"""Pattern-based triple extraction and similarity linking of surface forms."""

from __future__ import annotations

import re

from ..exchange import KeDoc, Link, SurfaceTriple
from ..ontology import OntologySchema
from ..pipeline.artifacts import split_documents
from ..rdf import Graph
from .config import SimilarityConfig
from .jsontasks import entity_label_index, property_label_index

# Names: capitalized words, optionally joined by hyphens or apostrophes; no periods.
_NAME = r"[A-Z][\w'\-]*(?:\s+(?:[A-Z][\w'\-]*|of|the|de|van|von))*"
_ENT = rf"(?P<head>{_NAME})"
_DATE = r"\d{4}-\d{2}-\d{2}"
_SENT = re.compile(r"(?<=[.!?])\s+(?=[A-Z\"'])")


def _split_list(text: str) -> list[str]:
    parts = re.split(r",\s*(?:and\s+)?|\s+and\s+", text)
    return [p.strip() for p in parts if p.strip()]


# Ordered rules: (pattern, relation form, tail is a list of names)
RULES = [
    (re.compile(rf"^{_ENT} was directed by (?P<tail>{_NAME})\.?$"), "directed by", False),
    (re.compile(rf"^{_ENT} starred (?P<tail>{_NAME}(?:(?:,\s*|,?\s+and\s+){_NAME})*)\.?$"), "starred", True),
    (re.compile(rf"^{_ENT} was produced by (?P<tail>{_NAME}(?:(?:,\s*|,?\s+and\s+){_NAME})*)\.?$"), "produced by", True),
    (re.compile(rf"^{_ENT} was written by (?P<tail>{_NAME}(?:(?:,\s*|,?\s+and\s+){_NAME})*)\.?$"), "written by", True),
    (re.compile(rf"^{_ENT} was distributed by (?P<tail>{_NAME})\.?$"), "distributed by", False),
    (re.compile(rf"^{_ENT} featured music composed by (?P<tail>{_NAME})\.?$"), "composed by", False),
    (re.compile(rf"^{_ENT} was released in (?P<tail>\d{{4}})\.?$"), "released in", False),
    (re.compile(rf"^{_ENT} runs for (?P<tail>\d+) minutes\.?$"), "runs for", False),
    (re.compile(rf"^{_ENT} was born on (?P<tail>{_DATE})\.?$"), "born on", False),
    (re.compile(rf"^{_ENT} was born in (?P<tail>{_NAME})\.?$"), "born in", False),
]


def split_sentences(doc: str) -> list[str]:
    return [s.strip() for s in _SENT.split(doc.strip()) if s.strip()]


def extract_sentence(sentence: str) -> list[SurfaceTriple]:
    for pattern, rel, is_list in RULES:
        m = pattern.match(sentence)
        if m is None:
            continue
        tails = _split_list(m.group("tail")) if is_list else [m.group("tail")]
        return [SurfaceTriple(m.group("head"), rel, t) for t in tails]
    return []


def text_extract(text: str) -> list[KeDoc]:
    """One KE document per blank-line separated document; links left empty."""
    out = []
    for doc in split_documents(text):
        triples = [t for s in split_sentences(doc) for t in extract_sentence(s)]
        out.append(KeDoc(doc, tuple(triples), ()))
    return out


def entity_link(kedocs, kg: Graph, cfg: SimilarityConfig = SimilarityConfig()) -> list[KeDoc]:
    """Link head and tail forms to the most similar KG entity label."""
    index = entity_label_index(kg)
    cache: dict = {}
    out = []
    for doc in kedocs:
        new = []
        for form in sorted({f for t in doc.triples for f in (t.head, t.tail)}):
            if form not in cache:
                cache[form] = index.best(form, cfg.linkThreshold)
            hit = cache[form]
            if hit:
                new.append(Link(form, hit[0], hit[1]))
        out.append(doc.with_links(new))
    return out


def relation_link(kedocs, schema: OntologySchema, cfg: SimilarityConfig = SimilarityConfig()) -> list[KeDoc]:
    """Link relation forms to the schema property with the most similar label."""
    index = property_label_index(schema)
    out = []
    for doc in kedocs:
        new = []
        for form in sorted({t.rel for t in doc.triples}):
            hit = index.best(form, cfg.linkThreshold)
            if hit:
                new.append(Link(form, hit[0], hit[1]))
        out.append(doc.with_links(new))
    return out
