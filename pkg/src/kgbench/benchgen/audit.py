"""Re-derive the construction constraints of a bundle on disk and list what breaks them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..exchange import GroundTruthBundle
from ..namespaces import ONTOLOGY_NS, RDF_TYPE, RESOURCE_NS, source_ontology_ns, source_resource_ns
from ..rdf import Graph, Literal, read_graph, rename_namespace
from .generate import BenchConfig, pair_overlaps
from .ontology_def import FILM

SIZE_TOLERANCE = 0.05
OVERLAP_TOLERANCE = 2


@dataclass
class AuditReport:
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, check: str, message: str) -> None:
        self.violations.append({"check": check, "message": message})

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "violations": self.violations}


def _films(g: Graph) -> set:
    return {t.s for t in g.match(p=RDF_TYPE, o=FILM)}


def split_subgraph(reference: Graph, films: set) -> Graph:
    """Reference triples about the given films and the entities they point to."""
    subjects = set(films)
    for f in films:
        for t in reference.match(s=f):
            if t.p != RDF_TYPE and not isinstance(t.o, Literal):
                subjects.add(t.o)
    return Graph(t for s in sorted(subjects) for t in reference.match(s=s))


def unshade_split(g: Graph, index: int) -> Graph:
    g = rename_namespace(g, source_resource_ns(index), RESOURCE_NS)
    return rename_namespace(g, source_ontology_ns(index), ONTOLOGY_NS)


def json_key_paths(doc: dict, prefix: str = "") -> set:
    """Key paths as the generator's key maps spell them: list indices only for several objects."""
    paths = set()
    for key, value in doc.items():
        path = prefix + key
        objs = [v for v in (value if isinstance(value, list) else [value]) if isinstance(v, dict)]
        if len(objs) <= 1:
            paths.add(path)
        for k, obj in enumerate(objs):
            sub = f"{path}.{k}" if len(objs) > 1 else path
            paths.add(sub)
            paths |= json_key_paths(obj, sub + ".")
    return paths


def _terms(g: Graph) -> set:
    out = set()
    for t in g.triple_set:
        out.update((t.s, t.p))
        if not isinstance(t.o, Literal):
            out.add(t.o)
    return out


def audit(bench_dir) -> AuditReport:
    bench = Path(bench_dir)
    rep = AuditReport()
    try:
        manifest = json.loads((bench / "manifest.json").read_text(encoding="utf-8"))
        cfg = BenchConfig(**manifest["config"])
        reference = read_graph(bench / "reference.nt")
        ontology = read_graph(bench / "ontology.nt")
        seed = read_graph(bench / "seed.nt")
        seed_region = read_graph(bench / "seed_region.nt")
    except (OSError, KeyError, TypeError, ValueError) as exc:
        rep.fail("bundle", f"cannot load bundle: {exc}")
        return rep

    expected_size = cfg.split_size
    overlaps = pair_overlaps(cfg)
    seed_films = _films(seed)
    split_films = [seed_films]
    sizes = [len(seed_films)]
    if seed != split_subgraph(reference, seed_films):
        rep.fail("seed", "seed.nt differs from the reference subgraph of its films")
    if seed_region != seed:
        rep.fail("seed", "seed_region.nt differs from seed.nt")
    ontology_terms = {t.s for t in ontology.triple_set}
    reference_terms = _terms(reference)

    for i in range(1, cfg.nSplits):
        d = bench / f"source{i}"
        try:
            shaded = read_graph(d / "source.nt")
            docs = json.loads((d / "source.json").read_text(encoding="utf-8"))
            gt = GroundTruthBundle.read(d / "gt")
        except (OSError, ValueError) as exc:
            rep.fail("bundle", f"source{i}: {exc}")
            continue
        plain = unshade_split(shaded, i)
        films = _films(plain)
        split_films.append(films)
        sizes.append(len(films))
        if plain != split_subgraph(reference, films):
            rep.fail("shading", f"source{i}: un-shaded graph is not the reference subgraph of its films")
        source_terms = _terms(shaded)

        for r in gt.expected_matches:
            if r.type == "entity":
                if r.id1 not in reference_terms or r.id2 not in source_terms:
                    rep.fail("gold", f"source{i}: entity match {r.id1} <-> {r.id2} names a missing id")
            elif r.id1 not in ontology_terms or r.id2 != _shade_class(r.id1, i):
                rep.fail("gold", f"source{i}: relation match {r.id1} <-> {r.id2} is not a shaded ontology term")
        typed = {(t.s, t.o) for t in shaded.match(p=RDF_TYPE)}
        for e in gt.expected_entities:
            if (e.get("sourceId"), _shade_class(e["type"], i)) not in typed:
                rep.fail("expected", f"source{i}: expected entity {e['id']} is missing from the source")
        if len(gt.gold_keymap) != len(docs):
            rep.fail("keymap", f"source{i}: {len(gt.gold_keymap)} key maps for {len(docs)} documents")
        for k, (doc, km) in enumerate(zip(docs, gt.gold_keymap)):
            missing = json_key_paths(doc) - set(km)
            if missing:
                rep.fail("keymap", f"source{i} doc {k}: key paths without gold property: {sorted(missing)[:3]}")
        for link in gt.film_links:
            if link["id"] not in films or not 0 <= link["doc"] < len(docs):
                rep.fail("links", f"source{i}: film link {link} does not point into the split")

    low, high = expected_size * (1 - SIZE_TOLERANCE), expected_size * (1 + SIZE_TOLERANCE)
    for i, n in enumerate(sizes):
        if not low <= n <= high:
            rep.fail("size", f"split {i} holds {n} films, expected about {expected_size}")
    achieved = {}
    for (i, j), want in sorted(overlaps.items()):
        if j >= len(split_films):
            continue
        got = len(split_films[i] & split_films[j])
        achieved[f"{i}-{j}"] = got
        if abs(got - want) > OVERLAP_TOLERANCE:
            rep.fail("overlap", f"splits {i}/{j} share {got} films, expected {want}")
    rep.checks = {"splitFilms": sizes, "expectedSplitFilms": expected_size, "filmOverlaps": achieved}
    return rep


def _shade_class(iri: str, index: int) -> str:
    if iri.startswith(ONTOLOGY_NS):
        return source_ontology_ns(index) + iri[len(ONTOLOGY_NS):]
    return iri
