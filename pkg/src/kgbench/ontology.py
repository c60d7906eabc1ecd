"""Ontology schema model and type materialization."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .namespaces import (
    KGB_MAX_CARDINALITY,
    OWL_CLASS,
    OWL_DATATYPE_PROPERTY,
    OWL_DISJOINT_WITH,
    OWL_EQUIVALENT_CLASS,
    OWL_EQUIVALENT_PROPERTY,
    OWL_OBJECT_PROPERTY,
    OWL_THING,
    RDF_PROPERTY,
    RDF_TYPE,
    RDFS_CLASS,
    RDFS_DOMAIN,
    RDFS_LABEL,
    RDFS_RANGE,
    SKOS_ALT_LABEL,
    XSD,
)
from .rdf import Graph, Iri, Literal, Triple


class OntologyError(ValueError):
    pass


class PropertyKind(str, Enum):
    RELATION = "relation"
    ATTRIBUTE = "attribute"


@dataclass(frozen=True)
class PropertySpec:
    iri: str
    kind: PropertyKind
    domain: str
    range: str
    max_cardinality: Optional[int] = None
    label: str = ""
    alt_labels: tuple[str, ...] = ()
    equivalents: tuple[str, ...] = ()

    @property
    def is_relation(self) -> bool:
        return self.kind is PropertyKind.RELATION

    @property
    def is_functional(self) -> bool:
        return self.max_cardinality == 1

    def all_labels(self) -> list[str]:
        out = [self.label] if self.label else []
        return out + [a for a in self.alt_labels if a not in out]


@dataclass(frozen=True)
class OntologySchema:
    classes: frozenset
    disjoint_pairs: frozenset  # frozensets of two class IRIs
    properties: dict = field(default_factory=dict)  # iri -> PropertySpec
    class_labels: dict = field(default_factory=dict)
    class_equivalents: dict = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash((self.classes, self.disjoint_pairs, tuple(sorted(self.properties))))

    def get(self, iri: str) -> Optional[PropertySpec]:
        return self.properties.get(iri)

    def is_disjoint(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.disjoint_pairs

    def relations(self) -> list[PropertySpec]:
        return [self.properties[k] for k in sorted(self.properties) if self.properties[k].is_relation]

    def attributes(self) -> list[PropertySpec]:
        return [self.properties[k] for k in sorted(self.properties) if not self.properties[k].is_relation]

    def domain_properties(self) -> list[PropertySpec]:
        """Properties with a concrete class domain (excludes rdf:type and rdfs:label)."""
        return [self.properties[k] for k in sorted(self.properties) if self.properties[k].domain in self.classes]


_SPECIAL_RANGES = {RDFS_CLASS}
_SPECIAL_DOMAINS = {OWL_THING}


def _single(g: Graph, s, p, what: str, required: bool = True):
    objs = g.objects(s, p)
    if len(objs) > 1:
        raise OntologyError(f"duplicate {what} declaration for {s}")
    if not objs:
        if required:
            raise OntologyError(f"property {s} lacks {what}")
        return None
    return objs[0]


def load_ontology(g: Graph) -> OntologySchema:
    classes = {t.s for t in g.match(p=RDF_TYPE, o=OWL_CLASS)} | {t.s for t in g.match(p=RDF_TYPE, o=RDFS_CLASS)}
    if not classes:
        raise OntologyError("no classes declared")

    disjoint = set()
    for t in g.match(p=OWL_DISJOINT_WITH):
        for c in (t.s, t.o):
            if c not in classes:
                raise OntologyError(f"disjointness references unknown class {c}")
        disjoint.add(frozenset((t.s, t.o)))

    kinds: dict[str, PropertyKind] = {}
    for marker, kind in ((OWL_OBJECT_PROPERTY, PropertyKind.RELATION), (OWL_DATATYPE_PROPERTY, PropertyKind.ATTRIBUTE)):
        for t in g.match(p=RDF_TYPE, o=marker):
            if t.s in kinds:
                raise OntologyError(f"duplicate property declaration for {t.s}")
            kinds[t.s] = kind
    for t in g.match(p=RDF_TYPE, o=RDF_PROPERTY):
        if t.s not in kinds:
            raise OntologyError(f"property {t.s} is neither an object nor a datatype property")

    properties = {}
    for iri in sorted(kinds):
        kind = kinds[iri]
        domain = _single(g, iri, RDFS_DOMAIN, "domain")
        rng = _single(g, iri, RDFS_RANGE, "range")
        if domain not in classes and domain not in _SPECIAL_DOMAINS:
            raise OntologyError(f"property {iri} has unknown domain class {domain}")
        if kind is PropertyKind.RELATION:
            if rng not in classes and rng not in _SPECIAL_RANGES:
                raise OntologyError(f"relation {iri} has range {rng}, which is not a declared class")
        elif not str(rng).startswith(XSD):
            raise OntologyError(f"attribute {iri} has range {rng}, which is not an xsd datatype")
        card = _single(g, iri, KGB_MAX_CARDINALITY, "max cardinality", required=False)
        max_card = None
        if card is not None:
            try:
                max_card = int(card.lexical if isinstance(card, Literal) else "x")
            except ValueError:
                raise OntologyError(f"invalid max cardinality on {iri}") from None
            if max_card < 1:
                raise OntologyError(f"max cardinality of {iri} must be >= 1")
        label = _single(g, iri, RDFS_LABEL, "label", required=False)
        alts = tuple(o.lexical for o in g.objects(iri, SKOS_ALT_LABEL) if isinstance(o, Literal))
        equivalents = tuple(str(o) for o in g.objects(iri, OWL_EQUIVALENT_PROPERTY))
        properties[iri] = PropertySpec(
            iri=Iri(iri),
            kind=kind,
            domain=Iri(domain),
            range=Iri(rng),
            max_cardinality=max_card,
            label=label.lexical if isinstance(label, Literal) else "",
            alt_labels=alts,
            equivalents=equivalents,
        )

    class_labels = {}
    class_equivalents = {}
    for c in classes:
        lbl = g.value(c, RDFS_LABEL)
        class_labels[c] = lbl.lexical if isinstance(lbl, Literal) else ""
        class_equivalents[c] = tuple(str(o) for o in g.objects(c, OWL_EQUIVALENT_CLASS))

    return OntologySchema(
        classes=frozenset(classes),
        disjoint_pairs=frozenset(disjoint),
        properties=properties,
        class_labels=class_labels,
        class_equivalents=class_equivalents,
    )


def infer_types(g: Graph, schema: OntologySchema) -> Graph:
    """Add rdf:type triples for untyped entities from property domains/ranges.

    An entity that already has any rdf:type is left alone. When evidence
    disagrees, the first triple in canonical order decides.
    """
    typed = {t.s for t in g.match(p=RDF_TYPE)}
    assigned: dict = {}
    for t in g:
        spec = schema.properties.get(t.p)
        if spec is None or t.p == RDF_TYPE:
            continue
        if spec.domain in schema.classes and t.s not in typed and t.s not in assigned:
            assigned[t.s] = spec.domain
        if (
            spec.is_relation
            and not isinstance(t.o, Literal)
            and spec.range in schema.classes
            and t.o not in typed
            and t.o not in assigned
        ):
            assigned[t.o] = spec.range
    if not assigned:
        return g
    return g.union(Graph(Triple(Iri(e), Iri(RDF_TYPE), Iri(c)) for e, c in assigned.items()))
