"""IRI constants shared across the package."""

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
OWL = "http://www.w3.org/2002/07/owl#"
SKOS = "http://www.w3.org/2004/02/skos/core#"

RDF_TYPE = RDF + "type"
RDF_LANGSTRING = RDF + "langString"
RDF_PROPERTY = RDF + "Property"
RDFS_LABEL = RDFS + "label"
RDFS_DOMAIN = RDFS + "domain"
RDFS_RANGE = RDFS + "range"
RDFS_CLASS = RDFS + "Class"
RDFS_LITERAL = RDFS + "Literal"
OWL_CLASS = OWL + "Class"
OWL_THING = OWL + "Thing"
OWL_OBJECT_PROPERTY = OWL + "ObjectProperty"
OWL_DATATYPE_PROPERTY = OWL + "DatatypeProperty"
OWL_DISJOINT_WITH = OWL + "disjointWith"
OWL_EQUIVALENT_CLASS = OWL + "equivalentClass"
OWL_EQUIVALENT_PROPERTY = OWL + "equivalentProperty"
SKOS_ALT_LABEL = SKOS + "altLabel"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DOUBLE = XSD + "double"
XSD_DECIMAL = XSD + "decimal"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATE = XSD + "date"
XSD_GYEAR = XSD + "gYear"

# Benchmark vocabulary.
KGB = "http://kgb.example.org/"
KGB_SCHEMA = KGB + "schema#"
# Direct max-cardinality annotation; replaces the OWL restriction pattern,
# which would need blank nodes.
KGB_MAX_CARDINALITY = KGB_SCHEMA + "maxCardinality"

ONTOLOGY_NS = KGB + "ontology/"
RESOURCE_NS = KGB + "resource/"
GENERIC_NS = KGB + "generic/"
GENERIC_TYPE_NS = KGB + "generic/type/"
NEW_NS = KGB + "new/"


def source_resource_ns(index: int) -> str:
    """Entity namespace of the shaded RDF copy of source split ``index``."""
    return f"{KGB}source{index}/resource/"


def source_ontology_ns(index: int) -> str:
    """Vocabulary namespace of the shaded RDF copy of source split ``index``."""
    return f"{KGB}source{index}/ontology/"


def local_name(iri: str) -> str:
    """Part of an IRI after the last ``#`` or ``/``."""
    cut = max(iri.rfind("#"), iri.rfind("/"))
    return iri[cut + 1:] if cut >= 0 else iri
