"""Statistical, semantic and reference metrics for integrated KGs."""

from __future__ import annotations

import json
import math
import re
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional
from urllib.parse import quote

from .datatypes import valid_lexical
from .exchange import DataFormat, GroundTruthBundle, MatchRecord, MatchSet, dump_json, parse_ke_docs, parse_match_set
from .namespaces import (
    GENERIC_NS,
    KGB,
    ONTOLOGY_NS,
    RDF_TYPE,
    RDFS_LABEL,
    RESOURCE_NS,
)
from .ontology import OntologySchema
from .rdf import Graph, Iri, Literal, Triple, graph_stats_primitives, read_graph
from .similarity import LabelIndex, trigram_similarity

FUZZY_LABEL_THRESHOLD = 0.9
FUZZY_VALUE_THRESHOLD = 0.8
_SHADED = re.compile(re.escape(KGB) + r"source\d+/(resource|ontology)/")


# -- statistics ------------------------------------------------------------------

@dataclass
class StatReport:
    factCount: int = 0
    entityCount: int = 0
    relationNameCount: int = 0
    typeCount: int = 0
    untypedCount: int = 0
    density: float = 0.0


def compute_statistics(kg: Graph, schema: Optional[OntologySchema] = None) -> StatReport:
    entities, predicates, classes = graph_stats_primitives(kg)
    typed = {t.s for t in kg.match(p=RDF_TYPE)}
    edges = sum(1 for t in kg.triple_set if t.p != RDF_TYPE and not isinstance(t.o, Literal))
    n = len(entities)
    density = edges / (n * (n - 1)) if n > 1 else 0.0
    return StatReport(len(kg), n, len(predicates), len(classes), len(entities - typed), min(1.0, density))


# -- semantic ----------------------------------------------------------------------

@dataclass
class SemReport:
    disjointTypesScore: float = 1.0
    domainScore: float = 1.0
    rangeScore: float = 1.0
    directionScore: float = 1.0
    literalTypeScore: float = 1.0
    literalFormatScore: float = 1.0
    violationCounts: dict = field(default_factory=dict)

    @property
    def scores(self) -> tuple:
        return (
            self.disjointTypesScore, self.domainScore, self.rangeScore,
            self.directionScore, self.literalTypeScore, self.literalFormatScore,
        )

    @property
    def average(self) -> float:
        return math.fsum(self.scores) / 6.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["average"] = self.average
        return d


def _ratio(bad: int, total: int) -> float:
    return 1.0 - bad / total if total else 1.0


def compute_semantic(kg: Graph, schema: OntologySchema) -> SemReport:
    types: dict = defaultdict(set)
    for t in kg.match(p=RDF_TYPE):
        types[t.s].add(t.o)
    disjoint = 0
    for classes in types.values():
        cs = sorted(classes)
        if any(schema.is_disjoint(a, b) for i, a in enumerate(cs) for b in cs[i + 1:]):
            disjoint += 1

    rel_total = dom_bad = rng_bad = dir_bad = 0
    attr_total = lt_bad = lf_bad = 0
    for t in kg.triple_set:
        if t.p == RDF_TYPE:
            continue
        spec = schema.properties.get(t.p)
        if spec is None:
            continue
        if spec.is_relation:
            rel_total += 1
            s_types = types.get(t.s, ())
            o_types = () if isinstance(t.o, Literal) else types.get(t.o, ())
            d_ok = spec.domain in s_types
            r_ok = spec.range in o_types
            dom_bad += not d_ok
            rng_bad += not r_ok
            if not (d_ok and r_ok) and not isinstance(t.o, Literal):
                if spec.domain in o_types and spec.range in s_types:
                    dir_bad += 1
        else:
            attr_total += 1
            if not isinstance(t.o, Literal):
                lt_bad += 1
                lf_bad += 1
                continue
            lt_bad += t.o.datatype != spec.range
            lf_bad += not valid_lexical(t.o.lexical, spec.range)
    return SemReport(
        disjointTypesScore=_ratio(disjoint, len(types)),
        domainScore=_ratio(dom_bad, rel_total),
        rangeScore=_ratio(rng_bad, rel_total),
        directionScore=_ratio(dir_bad, rel_total),
        literalTypeScore=_ratio(lt_bad, attr_total),
        literalFormatScore=_ratio(lf_bad, attr_total),
        violationCounts={
            "disjointTypes": disjoint,
            "domain": dom_bad,
            "range": rng_bad,
            "direction": dir_bad,
            "literalType": lt_bad,
            "literalFormat": lf_bad,
            "typedEntities": len(types),
            "relationTriples": rel_total,
            "attributeTriples": attr_total,
        },
    )


# -- reference -------------------------------------------------------------------

@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def _prf(hits_p: int, produced: int, hits_r: int, expected: int) -> PRF:
    # empty produced set: precision 1 by convention; empty gold: recall 1
    return PRF(hits_p / produced if produced else 1.0, hits_r / expected if expected else 1.0)


def unshade(iri: str) -> str:
    """Map a shaded source IRI back to its reference namespace."""
    m = _SHADED.match(iri)
    if m is None:
        return iri
    base = RESOURCE_NS if m.group(1) == "resource" else ONTOLOGY_NS
    return base + iri[m.end():]


def _pair_key(r) -> tuple:
    a, b = sorted((r.id1, r.id2))
    return (r.type, a, b)


def evaluate_match_set(produced: MatchSet, gold: MatchSet) -> dict:
    got = {_pair_key(r) for r in produced}
    want = {_pair_key(r) for r in gold}
    hits = len(got & want)
    return _prf(hits, len(got), hits, len(want)).to_dict()


@dataclass
class PipelineArtifacts:
    """Intermediate outputs of one run that feed task-specific metrics."""

    source_format: DataFormat
    matches: Optional[MatchSet] = None
    kedocs: Optional[list] = None


@dataclass
class RefReport:
    entityMatch: Optional[dict] = None
    ontologyMatch: Optional[dict] = None
    matchPooled: Optional[dict] = None
    entityLinking: Optional[dict] = None
    relationLinking: Optional[dict] = None
    sourceEntityCoverage: dict = field(default_factory=dict)
    fuzzySourceEntityCoverage: dict = field(default_factory=dict)
    referenceCoverage: dict = field(default_factory=dict)
    fuzzyReferenceCoverage: dict = field(default_factory=dict)
    fuzzyValueReferenceCoverage: dict = field(default_factory=dict)
    fuzzy: str = "trigram"

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def _label_map(g: Graph) -> dict:
    out: dict = {}
    for t in g.match(p=RDFS_LABEL):
        if isinstance(t.o, Literal):
            cur = out.get(t.s)
            if cur is None or t.o.lexical < cur:
                out[t.s] = t.o.lexical
    return out


def _by_label(g: Graph) -> set:
    labels = _label_map(g)

    def term(x):
        if isinstance(x, Literal):
            return ("L", x.lexical, x.datatype, x.lang)
        return ("E", labels[x]) if x in labels else ("I", str(x))

    return {(term(t.s), t.p, term(t.o)) for t in g.triple_set}


def _coverage(produced: set, reference: set, seed: set) -> PRF:
    got = produced - seed
    want = reference - seed
    hits = len(got & want)
    return _prf(hits, len(got), hits, len(want))


def _fuzzy_value_coverage(produced: set, reference: set, seed: set) -> PRF:
    got = produced - seed
    want = reference - seed

    def grouped(triples):
        out = defaultdict(list)
        for s, p, o in triples:
            if o[0] == "L":
                out[(s, p)].append(o[1])
        return out

    got_lits, want_lits = grouped(got), grouped(want)

    def matched(triples, exact, other_lits):
        n = 0
        for tr in triples:
            if tr in exact:
                n += 1
            elif tr[2][0] == "L" and any(
                trigram_similarity(tr[2][1], v) >= FUZZY_VALUE_THRESHOLD for v in other_lits.get((tr[0], tr[1]), ())
            ):
                n += 1
        return n

    return _prf(matched(got, want, want_lits), len(got), matched(want, got, got_lits), len(want))


def unshade_graph(g: Graph) -> Graph:
    def term(x):
        return x if isinstance(x, Literal) else Iri(unshade(x))

    return Graph(Triple(term(t.s), term(t.p), term(t.o)) for t in g.triple_set)


def current_reference(bench_dir, increment: int) -> Graph:
    """Seed split plus the un-shaded splits integrated up to ``increment``."""
    bench_dir = Path(bench_dir)
    parts = [read_graph(bench_dir / "seed_region.nt")]
    for j in range(1, increment + 1):
        parts.append(unshade_graph(read_graph(bench_dir / f"source{j}" / "source.nt")))
    return parts[0].union(*parts[1:])


def compute_reference(kg: Graph, bundle: GroundTruthBundle, reference_kg: Graph, seed_region: Graph,
                      artifacts: Optional[PipelineArtifacts] = None, previous_kg: Optional[Graph] = None,
                      schema: Optional[OntologySchema] = None) -> RefReport:
    """Reference metrics for one increment.

    ``reference_kg`` is the reference restricted to the splits integrated so
    far; ``previous_kg`` is KG_{i-1}, used to restrict gold matches and links
    to entities that could have been found.
    """
    report = RefReport()
    seed = seed_region.triple_set
    report.referenceCoverage = _coverage(kg.triple_set, reference_kg.triple_set, seed).to_dict()
    fk, fr, fs = _by_label(kg), _by_label(reference_kg), _by_label(seed_region)
    report.fuzzyReferenceCoverage = _coverage(fk, fr, fs).to_dict()
    report.fuzzyValueReferenceCoverage = _fuzzy_value_coverage(fk, fr, fs).to_dict()

    # source entities with their expected type; any shaded copy of an id counts as that id
    typed = defaultdict(set)
    tracked = defaultdict(set)
    for t in kg.match(p=RDF_TYPE):
        typed[t.s].add(t.o)
        tracked[unshade(t.s)].add(t.o)
    expected = bundle.expected_entities
    exact_hits = sum(1 for e in expected if e["type"] in tracked.get(e["id"], ()))
    report.sourceEntityCoverage = {"recall": exact_hits / len(expected) if expected else 1.0}
    by_class = defaultdict(list)
    for s, label in _label_map(kg).items():
        for c in typed.get(s, ()):
            by_class[c].append((s, label))
    indexes = {c: LabelIndex(entries) for c, entries in by_class.items()}
    fuzzy_hits = 0
    for e in expected:
        idx = indexes.get(e["type"])
        if idx is not None and idx.best(e["label"], FUZZY_LABEL_THRESHOLD):
            fuzzy_hits += 1
    report.fuzzySourceEntityCoverage = {"recall": fuzzy_hits / len(expected) if expected else 1.0}

    if artifacts is None:
        return report
    prev_entities = set()
    if previous_kg is not None:
        ents, _, _ = graph_stats_primitives(previous_kg)
        prev_entities = {unshade(e) for e in ents}

    fmt = artifacts.source_format
    if fmt is DataFormat.RDF and artifacts.matches is not None:
        produced = MatchSet.of(MatchRecord(unshade(r.id1), r.id2, r.type, r.score) for r in artifacts.matches)
        gold_ent = MatchSet.of(r for r in bundle.expected_matches.entities() if r.id1 in prev_entities)
        gold_rel = MatchSet(tuple(bundle.expected_matches.relations()))
        report.entityMatch = evaluate_match_set(MatchSet(tuple(produced.entities())), gold_ent)
        report.ontologyMatch = evaluate_match_set(MatchSet(tuple(produced.relations())), gold_rel)
        report.matchPooled = evaluate_match_set(produced, MatchSet(gold_ent.records + gold_rel.records))
    if fmt is DataFormat.TEXT and artifacts.kedocs is not None:
        report.entityLinking = _entity_linking(artifacts.kedocs, bundle.film_links, prev_entities)
    if fmt is DataFormat.JSON:
        report.relationLinking = _relation_linking(artifacts, bundle.gold_keymap)
    return report


def _entity_linking(kedocs: list, film_links: list, linkable: set) -> dict:
    """Film links of the current split, scored only for films already in the previous KG."""
    produced = hits = expected = 0
    for g in film_links:
        if g["id"] not in linkable:
            continue
        expected += 1
        doc = g["doc"]
        best = kedocs[doc].best_links().get(g["form"]) if doc < len(kedocs) else None
        if best is None:
            continue
        produced += 1
        hits += unshade(best.link) == g["id"]
    return _prf(hits, produced, hits, expected).to_dict()


def _last_key(path: str) -> str:
    parts = [p for p in path.split(".") if not p.isdigit()]
    return parts[-1]


def _relation_linking(artifacts: PipelineArtifacts, keymaps: list) -> Optional[dict]:
    total = correct = 0
    if artifacts.kedocs is not None:
        for i, km in enumerate(keymaps):
            links = artifacts.kedocs[i].links if i < len(artifacts.kedocs) else ()
            best: dict = {}
            for ln in sorted(links, key=lambda ln: (-ln.score, ln.link)):
                if ln.link.startswith(ONTOLOGY_NS) or ln.link.startswith(RDFS_LABEL):
                    best.setdefault(ln.form, ln.link)
            for path, prop in km.items():
                total += 1
                correct += best.get(_last_key(path)) == prop
    elif artifacts.matches is not None:
        mapping: dict = {}
        for r in sorted(artifacts.matches.relations(), key=lambda r: -r.score):
            for a, b in ((r.id1, r.id2), (r.id2, r.id1)):
                if a.startswith(GENERIC_NS):
                    mapping.setdefault(a, b)
        for km in keymaps:
            for path, prop in km.items():
                total += 1
                key_iri = GENERIC_NS + quote(_last_key(path), safe="")
                correct += mapping.get(key_iri) == prop
    else:
        return None
    return {"accuracy": correct / total if total else 1.0}


# -- combined per-increment report -------------------------------------------------

@dataclass
class EvalReport:
    pipeline: str
    increment: int
    sourceFormat: str
    statistics: StatReport
    semantic: SemReport
    reference: RefReport
    referenceStatistics: StatReport
    durationSeconds: float = 0.0
    cumulativeDurationSeconds: float = 0.0
    maxPeakMemoryBytes: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "increment": self.increment,
            "sourceFormat": self.sourceFormat,
            "statistics": asdict(self.statistics),
            "semantic": self.semantic.to_dict(),
            "reference": self.reference.to_dict(),
            "referenceStatistics": asdict(self.referenceStatistics),
            "durationSeconds": self.durationSeconds,
            "cumulativeDurationSeconds": self.cumulativeDurationSeconds,
            "maxPeakMemoryBytes": self.maxPeakMemoryBytes,
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        sem = dict(d["semantic"])
        sem.pop("average", None)
        return cls(
            pipeline=d["pipeline"],
            increment=int(d["increment"]),
            sourceFormat=d["sourceFormat"],
            statistics=StatReport(**d["statistics"]),
            semantic=SemReport(**sem),
            reference=RefReport(**d["reference"]),
            referenceStatistics=StatReport(**d["referenceStatistics"]),
            durationSeconds=d.get("durationSeconds", 0.0),
            cumulativeDurationSeconds=d.get("cumulativeDurationSeconds", 0.0),
            maxPeakMemoryBytes=d.get("maxPeakMemoryBytes"),
        )

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_dict(json.loads(text))

    @classmethod
    def read(cls, path) -> "EvalReport":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def collect_artifacts(report, work_dir, registry) -> PipelineArtifacts:
    """Pick the last match set and the last KE documents a run produced."""
    fmt = DataFormat(report.source_format) if report.source_format else DataFormat.RDF
    arts = PipelineArtifacts(fmt)
    work_dir = Path(work_dir)
    for rec in report.per_task:
        if rec.task not in registry:
            continue
        outputs = registry.signature(rec.task).outputs
        for out_fmt, rel in zip(outputs, rec.artifact_paths):
            path = work_dir / rel
            if not path.is_file():
                continue
            if out_fmt is DataFormat.JSON_ER:
                arts.matches = parse_match_set(path.read_text(encoding="utf-8"))
            elif out_fmt is DataFormat.JSON_KE:
                arts.kedocs = parse_ke_docs(path.read_text(encoding="utf-8"))
    return arts


def evaluate_increment(bench_dir, increment: int, kg: Graph, previous_kg: Graph, schema: OntologySchema,
                       report=None, work_dir=None, registry=None, cumulative_seconds: float = 0.0) -> EvalReport:
    """All three metric families for KG_i, plus run cost when a run report is given."""
    bench_dir = Path(bench_dir)
    reference = current_reference(bench_dir, increment)
    seed_region = read_graph(bench_dir / "seed_region.nt")
    bundle = GroundTruthBundle.read(bench_dir / f"source{increment}" / "gt")
    artifacts = None
    fmt = "RDF"
    if report is not None:
        fmt = report.source_format or fmt
        if work_dir is not None and registry is not None:
            artifacts = collect_artifacts(report, work_dir, registry)
    ref = compute_reference(kg, bundle, reference, seed_region, artifacts, previous_kg, schema)
    duration = report.total_duration_seconds if report is not None else 0.0
    return EvalReport(
        pipeline=report.pipeline if report is not None else "",
        increment=increment,
        sourceFormat=fmt,
        statistics=compute_statistics(kg, schema),
        semantic=compute_semantic(kg, schema),
        reference=ref,
        referenceStatistics=compute_statistics(reference, schema),
        durationSeconds=duration,
        cumulativeDurationSeconds=cumulative_seconds + duration,
        maxPeakMemoryBytes=report.max_peak_memory_bytes if report is not None else None,
    )
