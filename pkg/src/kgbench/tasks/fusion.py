"""Entity fusion with a current-KG-first policy, plus match-set merging."""

from __future__ import annotations

from typing import Callable, Optional

from ..exchange import MatchSet
from ..namespaces import RDF_TYPE
from ..ontology import OntologySchema, infer_types
from ..rdf import Graph, Iri, Literal, Triple


def _source_terms(g: Graph) -> set:
    out: set = set()
    for t in g.triple_set:
        out.add(t.s)
        out.add(t.p)
        if not isinstance(t.o, Literal):
            out.add(t.o)
    return out


def _rewrite_maps(source: Graph, matches: MatchSet, warn: Callable[[str], None]) -> tuple[dict, dict]:
    """Orient each match as source term -> replacement; strongest match per source term wins."""
    present = _source_terms(source)
    ent_map: dict = {}
    rel_map: dict = {}
    for r in sorted(matches, key=lambda r: (-r.score, r.type, r.id1, r.id2)):
        if r.id1 == r.id2:
            continue
        in1, in2 = r.id1 in present, r.id2 in present
        if in1 == in2:
            where = "both ids occur" if in1 else "neither id occurs"
            warn(f"skipped {r.type} match {r.id1} <-> {r.id2}: {where} in the source")
            continue
        old, new = (r.id1, r.id2) if in1 else (r.id2, r.id1)
        target = ent_map if r.type == "entity" else rel_map
        target.setdefault(old, Iri(new))
    return ent_map, rel_map


def _conforms(t: Triple, schema: OntologySchema) -> bool:
    """Only ontology vocabulary survives: known predicate, matching object kind, schema classes."""
    spec = schema.properties.get(t.p)
    if spec is None:
        return False
    if t.p == RDF_TYPE:
        return not isinstance(t.o, Literal) and t.o in schema.classes
    return spec.is_relation != isinstance(t.o, Literal)


def fusion_first(seed: Graph, source: Graph, matches: MatchSet, schema: OntologySchema,
                 warn: Optional[Callable[[str], None]] = None) -> Graph:
    warn = warn or (lambda msg: None)
    ent_map, rel_map = _rewrite_maps(source, matches, warn)
    rewritten = set()
    for t in source.triple_set:
        p = rel_map.get(t.p, t.p)
        if isinstance(t.o, Literal):
            o = t.o
        elif p == RDF_TYPE:
            o = rel_map.get(t.o, ent_map.get(t.o, t.o))
        else:
            o = ent_map.get(t.o, t.o)
        nt = Triple(ent_map.get(t.s, t.s), p, o)
        if _conforms(nt, schema):
            rewritten.add(nt)

    functional = {iri for iri, spec in schema.properties.items() if spec.is_functional}
    taken = {(t.s, t.p) for t in seed.triple_set if t.p in functional}
    kept = []
    for t in Graph(rewritten):  # canonical order decides among source values
        if t.p in functional:
            key = (t.s, t.p)
            if key in taken:
                continue
            taken.add(key)
        kept.append(t)
    return infer_types(seed.union(Graph(kept)), schema)


def select_first(seed: Graph, source: Graph, schema: OntologySchema,
                 warn: Optional[Callable[[str], None]] = None) -> Graph:
    return fusion_first(seed, source, MatchSet(), schema, warn)


def merge_matches(a: MatchSet, b: MatchSet) -> MatchSet:
    return a.merge(b)
