"""Built-in tasks and the default registry."""

from __future__ import annotations

from ..exchange import DataFormat as F
from ..pipeline.spec import Registry, TaskSignature
from .align import graph_align
from .config import SimilarityConfig, config_schema
from .csvtasks import csv_record_link, csv_schema_match, tabularize
from .fusion import fusion_first, merge_matches, select_first
from .jsontasks import generate_rdf_ke, json_linking, json_to_rdf, typed_literal
from .text import entity_link, relation_link, text_extract

__all__ = [
    "SimilarityConfig",
    "csv_record_link",
    "csv_schema_match",
    "default_registry",
    "entity_link",
    "fusion_first",
    "generate_rdf_ke",
    "graph_align",
    "json_linking",
    "json_to_rdf",
    "merge_matches",
    "relation_link",
    "select_first",
    "tabularize",
    "text_extract",
    "typed_literal",
]


def _schema(ctx):
    if ctx is None or ctx.schema is None:
        raise RuntimeError("this task needs the benchmark ontology")
    return ctx.schema


def _sim(cfg) -> SimilarityConfig:
    return SimilarityConfig.from_config(cfg)


_BUILTINS = [
    (TaskSignature("tabularize", (F.RDF,), (F.CSV,)), lambda v, c, x: [tabularize(v[0])]),
    (
        TaskSignature("csv_record_link", (F.CSV, F.CSV), (F.JSON_ER,), config_schema("csvRecordThreshold")),
        lambda v, c, x: [csv_record_link(v[0], v[1], _sim(c))],
    ),
    (
        TaskSignature("csv_schema_match", (F.CSV, F.CSV), (F.JSON_ER,), config_schema("csvSchemaThreshold")),
        lambda v, c, x: [csv_schema_match(v[0], v[1], _sim(c))],
    ),
    (TaskSignature("json_to_rdf", (F.JSON,), (F.RDF,)), lambda v, c, x: [json_to_rdf(v[0])]),
    (
        TaskSignature("json_linking", (F.JSON, F.RDF), (F.JSON_KE,), config_schema("linkThreshold")),
        lambda v, c, x: [json_linking(v[0], v[1], _schema(x), _sim(c))],
    ),
    (
        TaskSignature("generate_rdf_ke", (F.JSON_KE,), (F.RDF,)),
        lambda v, c, x: [generate_rdf_ke(v[0], _schema(x))],
    ),
    (
        TaskSignature(
            "graph_align", (F.RDF, F.RDF), (F.JSON_ER,),
            config_schema("entityThreshold", "relationThreshold", "maxIterations"),
        ),
        lambda v, c, x: [graph_align(v[0], v[1], _sim(c))],
    ),
    (
        TaskSignature("fusion_first", (F.RDF, F.RDF, F.JSON_ER), (F.RDF,)),
        lambda v, c, x: [fusion_first(v[0], v[1], v[2], _schema(x), x.warn)],
    ),
    (
        TaskSignature("select_first", (F.RDF, F.RDF), (F.RDF,)),
        lambda v, c, x: [select_first(v[0], v[1], _schema(x), x.warn)],
    ),
    (
        TaskSignature("merge_matches", (F.JSON_ER, F.JSON_ER), (F.JSON_ER,)),
        lambda v, c, x: [merge_matches(v[0], v[1])],
    ),
    (TaskSignature("text_extract", (F.TEXT,), (F.JSON_KE,)), lambda v, c, x: [text_extract(v[0])]),
    (
        TaskSignature("entity_link", (F.JSON_KE, F.RDF), (F.JSON_KE,), config_schema("linkThreshold")),
        lambda v, c, x: [entity_link(v[0], v[1], _sim(c))],
    ),
    (
        TaskSignature("relation_link", (F.JSON_KE,), (F.JSON_KE,), config_schema("linkThreshold")),
        lambda v, c, x: [relation_link(v[0], _schema(x), _sim(c))],
    ),
]

# Reachable only through the service backend; same contracts as their builtin peers.
_SERVICE_ONLY = [
    TaskSignature("llm_extract", (F.TEXT,), (F.JSON_KE,)),
    TaskSignature("llm_mapping", (F.JSON, F.RDF), (F.RDF,)),
    TaskSignature("llm_matcher", (F.RDF, F.RDF), (F.JSON_ER,)),
]


def default_registry() -> Registry:
    reg = Registry()
    for sig, impl in _BUILTINS:
        reg.register(sig, impl)
    for sig in _SERVICE_ONLY:
        reg.register(sig)
    return reg
