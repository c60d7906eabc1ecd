"""JSON lifting, JSON linking, and materialization of KE documents."""

from __future__ import annotations

import hashlib
import json
from urllib.parse import quote

from ..exchange import KeDoc, Link, SurfaceTriple
from ..namespaces import (
    GENERIC_NS,
    GENERIC_TYPE_NS,
    NEW_NS,
    RDF_TYPE,
    RDFS_LABEL,
    SKOS_ALT_LABEL,
    XSD,
    XSD_BOOLEAN,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)
from ..datatypes import canonical_lexical, valid_lexical
from ..ontology import OntologySchema
from ..rdf import Graph, Iri, Literal, Triple
from ..similarity import LabelIndex, normalize
from .config import SimilarityConfig

LABEL_KEYS = ("name", "title", "label")


def _key_iri(ns: str, key: str) -> Iri:
    return Iri(ns + quote(key, safe=""))


def _content_id(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha1(blob.encode("utf-8")).hexdigest()[:20]


def _scalar_literal(value) -> Literal:
    if isinstance(value, bool):
        return Literal("true" if value else "false", XSD_BOOLEAN)
    if isinstance(value, int):
        return Literal(str(value), XSD_INTEGER)
    if isinstance(value, float):
        return Literal(repr(value), XSD_DOUBLE)
    return Literal(str(value), XSD_STRING)


def json_to_rdf(docs) -> Graph:
    """Lift JSON objects to generic RDF: keys become predicates, path keys become types."""
    if not isinstance(docs, list):
        raise ValueError("JSON input must be an array of objects")
    triples: set = set()

    def lift(obj: dict, path_key: str) -> Iri:
        subject = Iri(GENERIC_NS + "entity/" + _content_id(obj))
        triples.add(Triple(subject, Iri(RDF_TYPE), _key_iri(GENERIC_TYPE_NS, path_key)))
        for key, value in obj.items():
            pred = _key_iri(GENERIC_NS, key)
            items = value if isinstance(value, list) else [value]
            for item in _flatten(items):
                if item is None:
                    continue
                if isinstance(item, dict):
                    triples.add(Triple(subject, pred, lift(item, key)))
                else:
                    triples.add(Triple(subject, pred, _scalar_literal(item)))
        return subject

    for i, doc in enumerate(docs):
        if not isinstance(doc, dict):
            raise ValueError(f"document {i} is not a JSON object")
        lift(doc, "root")
    return Graph(triples)


def _flatten(items):
    for item in items:
        if isinstance(item, list):
            yield from _flatten(item)
        else:
            yield item


def _scalar_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def object_form(obj: dict) -> str:
    """Surface form naming an object: its label-like key, else its scalar values joined."""
    for key in LABEL_KEYS:
        value = obj.get(key)
        if isinstance(value, (str, int, float)) and not isinstance(value, bool) and str(value).strip():
            return str(value)
    parts = [_scalar_text(v) for _, v in sorted(obj.items()) if v is not None and not isinstance(v, (dict, list))]
    return " ".join(parts)


def entity_label_index(kg: Graph) -> LabelIndex:
    entries = [
        (t.s, t.o.lexical)
        for p in (RDFS_LABEL, SKOS_ALT_LABEL)
        for t in kg.match(p=p)
        if isinstance(t.o, Literal)
    ]
    return LabelIndex(entries)


def property_label_index(schema: OntologySchema) -> LabelIndex:
    entries = []
    for iri, spec in schema.properties.items():
        for label in spec.all_labels():
            entries.append((iri, label))
    return LabelIndex(entries)


def json_linking(docs, kg: Graph, schema: OntologySchema, cfg: SimilarityConfig = SimilarityConfig()) -> list[KeDoc]:
    """Surface triples from key paths, with objects linked to KG entities and keys to properties."""
    entities = entity_label_index(kg)
    props = property_label_index(schema)
    out = []
    for i, doc in enumerate(docs):
        if not isinstance(doc, dict):
            raise ValueError(f"document {i} is not a JSON object")
        triples: list = []
        objects: list = []
        keys: set = set()

        def walk(obj: dict) -> str:
            head = object_form(obj)
            objects.append(head)
            for key, value in obj.items():
                items = value if isinstance(value, list) else [value]
                for item in _flatten(items):
                    if item is None:
                        continue
                    tail = walk(item) if isinstance(item, dict) else _scalar_text(item)
                    if tail:
                        triples.append(SurfaceTriple(head, key, tail))
                        keys.add(key)
            return head

        walk(doc)
        links = []
        for form in sorted(set(objects)):
            hit = entities.best(form, cfg.linkThreshold) if form else None
            if hit:
                links.append(Link(form, hit[0], hit[1]))
        for key in sorted(keys):
            hit = props.best(key, cfg.linkThreshold)
            if hit:
                links.append(Link(key, hit[0], hit[1]))
        text = json.dumps(doc, sort_keys=True, ensure_ascii=False)
        out.append(KeDoc(text, tuple(triples), tuple(links)))
    return out


# -- materialization -------------------------------------------------------------

def typed_literal(value: str, datatype: str) -> Literal:
    """Literal in ``datatype`` when ``value`` is a valid lexical form for it, else xsd:string."""
    value = value.strip()
    if valid_lexical(value, datatype):
        return Literal(canonical_lexical(value, datatype), datatype)
    return Literal(value, XSD_STRING)


def mint_new(form: str) -> Iri:
    """Deterministic IRI for an entity form that linked to nothing."""
    key = normalize(form).replace(" ", "_")
    if not key:
        key = "h" + hashlib.sha1(form.encode("utf-8")).hexdigest()[:16]
    return Iri(NEW_NS + quote(key, safe="_"))


def generate_rdf_ke(kedocs, schema: OntologySchema) -> Graph:
    """Resolve surface forms through their best links and emit ontology-level triples."""
    triples: set = set()
    for doc in kedocs:
        entity_link: dict = {}
        rel_link: dict = {}
        for ln in sorted(doc.links, key=lambda ln: (-ln.score, ln.link)):
            if ln.link in schema.properties:
                rel_link.setdefault(ln.form, ln.link)
            else:
                entity_link.setdefault(ln.form, ln.link)

        def entity(form: str) -> Iri:
            if form in entity_link:
                return Iri(entity_link[form])
            iri = mint_new(form)
            triples.add(Triple(iri, Iri(RDFS_LABEL), Literal(form.strip())))
            return iri

        for st in doc.triples:
            prop = rel_link.get(st.rel)
            if prop is None or not st.head.strip() or not st.tail.strip():
                continue
            spec = schema.properties[prop]
            if prop == RDF_TYPE:
                continue
            head = entity(st.head)
            if spec.is_relation:
                tail = entity(st.tail)
            else:
                rng = spec.range if str(spec.range).startswith(XSD) else XSD_STRING
                tail = typed_literal(st.tail, rng)
            triples.add(Triple(head, Iri(prop), tail))
    return Graph(triples)
