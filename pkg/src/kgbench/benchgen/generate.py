"""Benchmark bundle generation: splits, shaded RDF, JSON, text and ground truth."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import asdict, dataclass
from itertools import combinations
from pathlib import Path

from ..exchange import GroundTruthBundle, MatchRecord, MatchSet, dump_json
from ..namespaces import ONTOLOGY_NS, RDFS_LABEL, RESOURCE_NS, source_ontology_ns, source_resource_ns
from ..rdf import Graph, rename_namespace, serialize_ntriples
from .ontology_def import CLASSES, PROPERTY_TABLE, ontology_graph, o
from .synth import COMPANY_RELATIONS, Entity, ReferenceData, synthesize

RNG_ALGORITHM = "python random.Random (MT19937)"


class BenchConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    nFilms: int = 100
    nSplits: int = 4
    filmOverlapRate: float = 0.05
    rngSeed: int = 42
    ambiguityRate: float = 0.2
    distractorRate: float = 0.35
    factRate: float = 0.7

    def __post_init__(self):
        if self.nSplits < 2:
            raise BenchConfigError("nSplits must be at least 2")
        if self.nFilms < self.nSplits * 10:
            raise BenchConfigError(f"nFilms must be >= {self.nSplits * 10}")
        if not 0.0 < self.filmOverlapRate < 0.5:
            raise BenchConfigError("filmOverlapRate must lie in (0, 0.5)")
        for name in ("ambiguityRate", "distractorRate", "factRate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise BenchConfigError(f"{name} must lie in [0, 1]")
        if not 0 <= self.rngSeed < 2**64:
            raise BenchConfigError("rngSeed must be a 64-bit unsigned integer")

    @property
    def split_size(self) -> int:
        return self.nFilms // self.nSplits


def pair_overlaps(cfg: BenchConfig) -> dict:
    """Films shared by each split pair; pairs involving the seed (split 0) get the remainder first."""
    pairs = list(combinations(range(cfg.nSplits), 2))
    total = round(len(pairs) * cfg.filmOverlapRate * cfg.split_size)
    base, extra = divmod(total, len(pairs))
    ordered = sorted(pairs, key=lambda p: (p[0] != 0, p))
    out = {p: base for p in pairs}
    for p in ordered[:extra]:
        out[p] += 1
    for i in range(cfg.nSplits):
        shared = sum(k for p, k in out.items() if i in p)
        if shared > cfg.split_size:
            raise BenchConfigError("overlap infeasible for this split size")
    return out


def distinct_films(cfg: BenchConfig) -> int:
    return cfg.nSplits * cfg.split_size - sum(pair_overlaps(cfg).values())


def partition(films: list, cfg: BenchConfig, rng: random.Random) -> list[list]:
    """Assign films to splits: each split holds split_size films, pairs share their overlap."""
    order = list(films)
    rng.shuffle(order)
    splits: list = [[] for _ in range(cfg.nSplits)]
    pos = 0
    for (i, j), k in sorted(pair_overlaps(cfg).items()):
        for f in order[pos:pos + k]:
            splits[i].append(f)
            splits[j].append(f)
        pos += k
    for s in splits:
        need = cfg.split_size - len(s)
        s.extend(order[pos:pos + need])
        pos += need
    assert pos == len(order)
    return [sorted(s, key=lambda e: e.iri) for s in splits]


def split_entities(ref: ReferenceData, films: list) -> list[Entity]:
    related = sorted({t for f in films for t in ref.related(f)})
    return list(films) + [ref.entity(t) for t in related]


def entities_graph(entities) -> Graph:
    return Graph(t for e in entities for t in e.triples())


def shade(g: Graph, index: int) -> Graph:
    g = rename_namespace(g, RESOURCE_NS, source_resource_ns(index))
    return rename_namespace(g, ONTOLOGY_NS, source_ontology_ns(index))


def shaded_iri(iri: str, index: int) -> str:
    for old, new in ((RESOURCE_NS, source_resource_ns(index)), (ONTOLOGY_NS, source_ontology_ns(index))):
        if iri.startswith(old):
            return new + iri[len(old):]
    return iri


# -- JSON --------------------------------------------------------------------------

def _json_value(lex: str, dt: str):
    if dt.endswith("#integer"):
        return int(lex)
    if dt.endswith("#double"):
        return float(lex)
    return lex


def _attr_block(e: Entity, keymap: dict, prefix: str, label_key: str) -> dict:
    obj = {label_key: e.label}
    keymap[prefix + label_key] = RDFS_LABEL
    for name in sorted(e.attrs):
        values = [_json_value(lex, dt) for lex, dt in e.attrs[name]]
        obj[name] = values[0] if len(values) == 1 else values
        keymap[prefix + name] = o(name)
    return obj


def film_document(ref: ReferenceData, film: Entity, rng: random.Random, rate: float) -> tuple[dict, dict]:
    """Nested JSON record for one film plus its key-path -> property map."""
    keymap: dict = {}
    doc = _attr_block(film, keymap, "", "title")
    if "runtime" in doc and rng.random() < rate:
        minutes = doc["runtime"]
        doc["runtime"] = f"{minutes // 60}h {minutes % 60}m"
    if "gross" in doc and rng.random() < rate:
        doc["revenue"] = doc.pop("gross")
        doc.pop("budget", None)
        keymap.pop("budget", None)
        keymap["revenue"] = keymap.pop("gross")
    for rel in sorted(film.rels):
        objs = []
        many = len(film.rels[rel]) > 1
        for k, target in enumerate(film.rels[rel]):
            e = ref.entity(target)
            prefix = f"{rel}.{k}." if many else f"{rel}."
            keymap[prefix[:-1]] = o(rel)
            obj = _attr_block(e, keymap, prefix, "name")
            if rel not in COMPANY_RELATIONS and rng.random() < rate:
                key = "deathDate" if "deathDate" in obj and rng.random() < 0.5 else "birthDate"
                obj["date"] = obj.pop(key)
                keymap[prefix + "date"] = keymap.pop(prefix + key)
            objs.append(obj)
        doc[rel] = objs[0] if len(objs) == 1 else objs
    return doc, dict(sorted(keymap.items()))


# -- text --------------------------------------------------------------------------

DISTRACTORS = [
    "Critics praised {t} for its bold visual style.",
    "Directed by {d}, {t} premiered to mixed reviews.",
    "The production of {t} faced several delays.",
    "Many viewers consider {t} a landmark of the {g} genre.",
    "Audiences in {c} embraced {t} during its first weekend.",
    "{t} was shot in only {n} weeks.",
    "Its score, composed with great care, remains popular.",
    "{a} later described the shoot as exhausting.",
]


def _names(ref: ReferenceData, iris) -> list[str]:
    return [ref.entity(i).label for i in iris]


def _join(items: list[str]) -> str:
    return items[0] if len(items) == 1 else ", ".join(items[:-1]) + " and " + items[-1]


def film_abstract(ref: ReferenceData, film: Entity, rng: random.Random, cfg: BenchConfig) -> str:
    t = film.label
    facts = []
    rels = film.rels
    for d in _names(ref, rels.get("director", [])):
        facts.append(f"{t} was directed by {d}.")
    if rels.get("starring"):
        facts.append(f"{t} starred {_join(_names(ref, rels['starring']))}.")
    if rels.get("producer"):
        facts.append(f"{t} was produced by {_join(_names(ref, rels['producer']))}.")
    if rels.get("writer"):
        facts.append(f"{t} was written by {_join(_names(ref, rels['writer']))}.")
    for c in _names(ref, rels.get("distributor", [])):
        facts.append(f"{t} was distributed by {c}.")
    for m in _names(ref, rels.get("musicComposer", [])):
        facts.append(f"{t} featured music composed by {m}.")
    facts.append(f"{t} was released in {film.attrs['releaseDate'][0][0][:4]}.")
    facts.append(f"{t} runs for {film.attrs['runtime'][0][0]} minutes.")
    for iri in rels.get("director", []) + rels.get("starring", [])[:1]:
        p = ref.entity(iri)
        facts.append(f"{p.label} was born in {p.attrs['birthPlace'][0][0]}.")
    kept = [s for s in facts if rng.random() < cfg.factRate]
    n_distract = sum(1 for _ in range(len(facts)) if rng.random() < cfg.distractorRate)
    persons = _names(ref, rels.get("director", [])) or [t]
    for _ in range(n_distract):
        tmpl = rng.choice(DISTRACTORS)
        kept.insert(
            rng.randint(0, len(kept)),
            tmpl.format(
                t=t, d=persons[0], a=persons[-1], g=film.attrs["genre"][0][0].lower(),
                c=film.attrs["country"][0][0], n=rng.randint(4, 30),
            ),
        )
    return " ".join(kept) if kept else f"{t} is a film."


# -- bundle ------------------------------------------------------------------------

def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def ground_truth(ref: ReferenceData, entities: list, films: list, index: int, docs_films: list) -> GroundTruthBundle:
    records = []
    for e in entities:
        records.append(MatchRecord(e.iri, shaded_iri(e.iri, index), "entity", 1.0))
    for name, *_ in PROPERTY_TABLE:
        records.append(MatchRecord(o(name), shaded_iri(o(name), index), "relation", 1.0))
    for c in sorted(CLASSES):
        records.append(MatchRecord(c, shaded_iri(c, index), "relation", 1.0))
    expected = [
        {"id": e.iri, "type": e.cls, "label": e.label, "sourceId": shaded_iri(e.iri, index)}
        for e in sorted(entities, key=lambda e: e.iri)
    ]
    links = [{"doc": i, "form": f.label, "id": f.iri} for i, f in enumerate(docs_films)]
    return GroundTruthBundle(MatchSet.of(records), expected, [], links)


def generate(cfg: BenchConfig, out_dir) -> dict:
    """Write a complete bundle under ``out_dir``; returns the manifest."""
    out = Path(out_dir)
    rng = random.Random(cfg.rngSeed)
    ref = synthesize(distinct_films(cfg), rng)
    splits = partition(ref.films, cfg, rng)

    _write(out / "ontology.nt", serialize_ntriples(ontology_graph()))
    all_entities = ref.films + [ref.persons[k] for k in sorted(ref.persons)] + [ref.companies[k] for k in sorted(ref.companies)]
    _write(out / "reference.nt", serialize_ntriples(entities_graph(all_entities)))
    split_graphs = [entities_graph(split_entities(ref, s)) for s in splits]
    seed_text = serialize_ntriples(split_graphs[0])
    _write(out / "seed.nt", seed_text)
    _write(out / "seed_region.nt", seed_text)

    for i in range(1, cfg.nSplits):
        d = out / f"source{i}"
        films = splits[i]
        entities = split_entities(ref, films)
        _write(d / "source.nt", serialize_ntriples(shade(split_graphs[i], i)))
        srng = random.Random(f"{cfg.rngSeed}:json:{i}")
        docs, keymaps = [], []
        for f in films:
            doc, km = film_document(ref, f, srng, cfg.ambiguityRate)
            docs.append(doc)
            keymaps.append(km)
        _write(d / "source.json", dump_json(docs))
        trng = random.Random(f"{cfg.rngSeed}:text:{i}")
        _write(d / "source.txt", "\n\n".join(film_abstract(ref, f, trng, cfg) for f in films) + "\n")
        gt = ground_truth(ref, entities, films, i, films)
        gt.gold_keymap = keymaps
        gt.write(d / "gt")

    manifest = {
        "config": asdict(cfg),
        "rng": RNG_ALGORITHM,
        "counts": {
            "films": len(ref.films),
            "persons": len(ref.persons),
            "companies": len(ref.companies),
            "splitFilms": [len(s) for s in splits],
        },
        "overlap": overlap_summary(ref, splits),
    }
    files = sorted(p for p in out.rglob("*") if p.is_file() and p.name != "manifest.json")
    manifest["checksums"] = {p.relative_to(out).as_posix(): _sha256(p) for p in files}
    _write(out / "manifest.json", dump_json(manifest))
    return manifest


def overlap_summary(ref: ReferenceData, splits: list) -> dict:
    films = [{f.iri for f in s} for s in splits]
    ents = [{e.iri for e in split_entities(ref, s)} for s in splits]
    pairs = {}
    for i, j in combinations(range(len(splits)), 2):
        pairs[f"{i}-{j}"] = {
            "films": len(films[i] & films[j]),
            "filmRate": len(films[i] & films[j]) / len(films[j]),
            "entities": len(ents[i] & ents[j]),
            "entityRate": len(ents[i] & ents[j]) / len(ents[j]),
        }
    return pairs


def load_manifest(bench_dir) -> dict:
    return json.loads((Path(bench_dir) / "manifest.json").read_text(encoding="utf-8"))
