"""The fixed movie-domain ontology: 3 classes and 25 properties."""

from __future__ import annotations

from ..namespaces import (
    KGB_MAX_CARDINALITY,
    ONTOLOGY_NS,
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
    XSD_DATE,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)
from ..ontology import OntologySchema, PropertyKind, load_ontology
from ..rdf import Graph, Iri, Literal, Triple

FILM = ONTOLOGY_NS + "Film"
PERSON = ONTOLOGY_NS + "Person"
COMPANY = ONTOLOGY_NS + "Company"
CLASSES = {FILM: "film", PERSON: "person", COMPANY: "company"}
CLASS_EQUIVALENTS = {
    FILM: "http://dbpedia.org/ontology/Film",
    PERSON: "http://dbpedia.org/ontology/Person",
    COMPANY: "http://dbpedia.org/ontology/Company",
}


def o(name: str) -> str:
    return ONTOLOGY_NS + name


R, A = PropertyKind.RELATION, PropertyKind.ATTRIBUTE

# (local name, kind, domain, range, max cardinality, label, alt labels)
PROPERTY_TABLE = [
    ("director", R, FILM, PERSON, None, "director", ("directed by", "helmer", "film director")),
    ("starring", R, FILM, PERSON, None, "starring", ("starred", "cast", "actors", "stars")),
    ("producer", R, FILM, PERSON, None, "producer", ("produced by",)),
    ("writer", R, FILM, PERSON, None, "writer", ("written by", "screenplay")),
    ("musicComposer", R, FILM, PERSON, None, "music composer", ("music by", "composer", "composed by")),
    ("cinematography", R, FILM, PERSON, None, "cinematography", ("cinematographer", "photographed by")),
    ("productionCompany", R, FILM, COMPANY, None, "production company", ("studio", "production")),
    ("distributor", R, FILM, COMPANY, None, "distributor", ("distributed by",)),
    ("releaseDate", A, FILM, XSD_DATE, 1, "release date", ("released", "released in", "release")),
    ("runtime", A, FILM, XSD_INTEGER, 1, "runtime", ("runs for", "running time", "duration")),
    ("budget", A, FILM, XSD_DOUBLE, 1, "budget", ("cost",)),
    ("gross", A, FILM, XSD_DOUBLE, 1, "gross", ("box office", "revenue")),
    ("genre", A, FILM, XSD_STRING, None, "genre", ()),
    ("language", A, FILM, XSD_STRING, None, "language", ()),
    ("country", A, FILM, XSD_STRING, None, "country", ()),
    ("birthDate", A, PERSON, XSD_DATE, 1, "birth date", ("born on", "date of birth")),
    ("deathDate", A, PERSON, XSD_DATE, 1, "death date", ("died on",)),
    ("birthPlace", A, PERSON, XSD_STRING, None, "birth place", ("born in", "place of birth")),
    ("nationality", A, PERSON, XSD_STRING, None, "nationality", ()),
    ("occupation", A, PERSON, XSD_STRING, None, "occupation", ()),
    ("foundingDate", A, COMPANY, XSD_DATE, 1, "founding date", ("founded", "established")),
    ("headquarters", A, COMPANY, XSD_STRING, None, "headquarters", ("based in",)),
    ("industry", A, COMPANY, XSD_STRING, None, "industry", ()),
]


def ontology_graph() -> Graph:
    """Serialize the ontology; blank-node-free, cardinality as a direct annotation."""
    T = Triple
    I = Iri
    triples = []
    names = sorted(CLASSES)
    for c in names:
        triples += [
            T(I(c), I(RDF_TYPE), I(OWL_CLASS)),
            T(I(c), I(RDFS_LABEL), Literal(CLASSES[c])),
            T(I(c), I(OWL_EQUIVALENT_CLASS), I(CLASS_EQUIVALENTS[c])),
        ]
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            triples.append(T(I(a), I(OWL_DISJOINT_WITH), I(b)))
    for name, kind, domain, rng, card, label, alts in PROPERTY_TABLE:
        p = I(o(name))
        marker = OWL_OBJECT_PROPERTY if kind is R else OWL_DATATYPE_PROPERTY
        triples += [
            T(p, I(RDF_TYPE), I(RDF_PROPERTY)),
            T(p, I(RDF_TYPE), I(marker)),
            T(p, I(RDFS_DOMAIN), I(domain)),
            T(p, I(RDFS_RANGE), I(rng)),
            T(p, I(RDFS_LABEL), Literal(label)),
            T(p, I(OWL_EQUIVALENT_PROPERTY), I("http://dbpedia.org/ontology/" + name)),
        ]
        triples += [T(p, I(SKOS_ALT_LABEL), Literal(a)) for a in alts]
        if card is not None:
            triples.append(T(p, I(KGB_MAX_CARDINALITY), Literal(str(card), XSD_INTEGER)))
    # the two standard properties counted in the schema size
    lab, typ = I(RDFS_LABEL), I(RDF_TYPE)
    triples += [
        T(lab, I(RDF_TYPE), I(OWL_DATATYPE_PROPERTY)),
        T(lab, I(RDFS_DOMAIN), I(OWL_THING)),
        T(lab, I(RDFS_RANGE), I(XSD_STRING)),
        T(lab, I(RDFS_LABEL), Literal("label")),
        T(lab, I(SKOS_ALT_LABEL), Literal("name")),
        T(lab, I(SKOS_ALT_LABEL), Literal("title")),
        T(typ, I(RDF_TYPE), I(OWL_OBJECT_PROPERTY)),
        T(typ, I(RDFS_DOMAIN), I(OWL_THING)),
        T(typ, I(RDFS_RANGE), I(RDFS_CLASS)),
        T(typ, I(RDFS_LABEL), Literal("type")),
    ]
    return Graph(triples)


def benchmark_schema() -> OntologySchema:
    return load_ontology(ontology_graph())
