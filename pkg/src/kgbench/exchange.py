"""Intermediate exchange formats and ground-truth files.

JSON_ER files hold a top-level array of match records; JSON_KE files hold a
top-level array of documents (one per input document).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional


class DataFormat(str, Enum):
    RDF = "RDF"
    JSON = "JSON"
    TEXT = "TEXT"
    CSV = "CSV"
    JSON_ER = "JSON_ER"
    JSON_KE = "JSON_KE"

    @property
    def extension(self) -> str:
        return FORMAT_EXTENSIONS[self]


FORMAT_EXTENSIONS = {
    DataFormat.RDF: ".nt",
    DataFormat.JSON: ".json",
    DataFormat.TEXT: ".txt",
    DataFormat.CSV: ".csv",
    DataFormat.JSON_ER: ".json",
    DataFormat.JSON_KE: ".json",
}


class ExchangeError(ValueError):
    """Validation failure; ``index`` names the offending record when known."""

    def __init__(self, message: str, index: Optional[int] = None):
        prefix = f"record {index}: " if index is not None else ""
        super().__init__(prefix + message)
        self.index = index


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _check_score(value: Any, index: Optional[int], what: str = "score") -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ExchangeError(f"{what} must be a number", index)
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ExchangeError(f"{what} {value} outside [0, 1]", index)
    return value


def _check_id(value: Any, index: Optional[int], key: str) -> str:
    if isinstance(value, bool):
        raise ExchangeError(f"{key} must be a string or number", index)
    if isinstance(value, (int, float)):
        value = str(value)
    if not isinstance(value, str) or not value:
        raise ExchangeError(f"{key} must be a non-empty string or number", index)
    return value


# -- JSON_ER -----------------------------------------------------------------

MATCH_TYPES = ("entity", "relation")


@dataclass(frozen=True, order=True)
class MatchRecord:
    id1: str
    id2: str
    type: str
    score: float

    def __post_init__(self):
        if self.type not in MATCH_TYPES:
            raise ExchangeError(f"unknown match type {self.type!r}")
        _check_score(self.score, None)

    def to_dict(self) -> dict:
        return {"id1": self.id1, "id2": self.id2, "type": self.type, "score": self.score}


@dataclass(frozen=True)
class MatchSet:
    records: tuple = ()

    @classmethod
    def of(cls, records: Iterable[MatchRecord]) -> "MatchSet":
        """Deduplicate on (type, id1, id2) keeping the best score; canonical order."""
        best: dict = {}
        for r in records:
            key = (r.type, r.id1, r.id2)
            if key not in best or r.score > best[key].score:
                best[key] = r
        return cls(tuple(best[k] for k in sorted(best)))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def entities(self) -> list[MatchRecord]:
        return [r for r in self.records if r.type == "entity"]

    def relations(self) -> list[MatchRecord]:
        return [r for r in self.records if r.type == "relation"]

    def merge(self, other: "MatchSet") -> "MatchSet":
        return MatchSet.of(list(self.records) + list(other.records))


def match_set_from_json(data: Any) -> MatchSet:
    if not isinstance(data, list):
        raise ExchangeError("JSON_ER document must be an array")
    records = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise ExchangeError("match record must be an object", i)
        for key in ("id1", "id2", "type", "score"):
            if key not in item:
                raise ExchangeError(f"missing key {key!r}", i)
        extra = set(item) - {"id1", "id2", "type", "score"}
        if extra:
            raise ExchangeError(f"unexpected keys {sorted(extra)}", i)
        if item["type"] not in MATCH_TYPES:
            raise ExchangeError(f"unknown type {item['type']!r}", i)
        records.append(
            MatchRecord(
                _check_id(item["id1"], i, "id1"),
                _check_id(item["id2"], i, "id2"),
                item["type"],
                _check_score(item["score"], i),
            )
        )
    return MatchSet.of(records)


def parse_match_set(text: str) -> MatchSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExchangeError(f"invalid JSON: {exc}") from None
    return match_set_from_json(data)


def serialize_match_set(ms: MatchSet) -> str:
    return dump_json([r.to_dict() for r in MatchSet.of(ms.records).records])


# -- JSON_KE -----------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceTriple:
    head: str
    rel: str
    tail: str

    def to_dict(self) -> dict:
        return {"head": self.head, "rel": self.rel, "tail": self.tail}


@dataclass(frozen=True, order=True)
class Link:
    form: str
    link: str
    score: float

    def to_dict(self) -> dict:
        return {"form": self.form, "link": self.link, "score": self.score}


@dataclass(frozen=True)
class KeDoc:
    text: str = ""
    triples: tuple = ()
    links: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(sorted(self.links)))

    def best_links(self) -> dict[str, Link]:
        """Highest-scoring link per form; ties go to the smaller IRI."""
        out: dict[str, Link] = {}
        for ln in self.links:
            cur = out.get(ln.form)
            if cur is None or ln.score > cur.score or (ln.score == cur.score and ln.link < cur.link):
                out[ln.form] = ln
        return out

    def with_links(self, extra: Iterable[Link]) -> "KeDoc":
        merged = {(ln.form, ln.link): ln for ln in self.links}
        for ln in extra:
            key = (ln.form, ln.link)
            if key not in merged or ln.score > merged[key].score:
                merged[key] = ln
        return KeDoc(self.text, self.triples, tuple(merged.values()))

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "triples": [t.to_dict() for t in self.triples],
            "links": [ln.to_dict() for ln in self.links],
        }


def ke_doc_from_json(item: Any, index: Optional[int] = None) -> KeDoc:
    if not isinstance(item, dict):
        raise ExchangeError("KE document must be an object", index)
    for key in ("text", "triples", "links"):
        if key not in item:
            raise ExchangeError(f"missing key {key!r}", index)
    if not isinstance(item["text"], str):
        raise ExchangeError("text must be a string", index)
    if not isinstance(item["triples"], list) or not isinstance(item["links"], list):
        raise ExchangeError("triples and links must be arrays", index)
    triples = []
    for t in item["triples"]:
        if not isinstance(t, dict) or set(t) != {"head", "rel", "tail"}:
            raise ExchangeError("triple must have exactly head, rel, tail", index)
        if not all(isinstance(t[k], str) for k in ("head", "rel", "tail")):
            raise ExchangeError("triple fields must be strings", index)
        triples.append(SurfaceTriple(t["head"], t["rel"], t["tail"]))
    links = []
    for ln in item["links"]:
        if not isinstance(ln, dict) or set(ln) != {"form", "link", "score"}:
            raise ExchangeError("link must have exactly form, link, score", index)
        if not isinstance(ln["form"], str) or not ln["form"]:
            raise ExchangeError("link form must be a non-empty string", index)
        links.append(Link(ln["form"], _check_id(ln["link"], index, "link"), _check_score(ln["score"], index)))
    return KeDoc(item["text"], tuple(triples), tuple(links))


def parse_ke_docs(text: str) -> list[KeDoc]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExchangeError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ExchangeError("JSON_KE document must be an array of KE documents")
    return [ke_doc_from_json(item, i) for i, item in enumerate(data)]


def parse_ke_doc(text: str) -> KeDoc:
    """Parse a single KE document object."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExchangeError(f"invalid JSON: {exc}") from None
    return ke_doc_from_json(data)


def serialize_ke_doc(doc: KeDoc) -> str:
    return dump_json(doc.to_dict())


def serialize_ke_docs(docs: Iterable[KeDoc]) -> str:
    return dump_json([d.to_dict() for d in docs])


# -- ground truth --------------------------------------------------------------

@dataclass
class GroundTruthBundle:
    """Gold data for one (seed, source) pair.

    ``expected_entities`` items carry ``id``, ``type``, ``label`` and
    ``sourceId`` (the shaded IRI of the same entity in the RDF source).
    ``gold_keymap`` holds one key-path map per JSON document, in document order.
    ``film_links`` items carry ``doc``, ``form`` and ``id``.
    """

    expected_matches: MatchSet = field(default_factory=MatchSet)
    expected_entities: list = field(default_factory=list)
    gold_keymap: list = field(default_factory=list)
    film_links: list = field(default_factory=list)

    FILES = ("matches.er.json", "expected_entities.json", "gold_keymap.json", "film_links.json")

    def write(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        (d / "matches.er.json").write_text(serialize_match_set(self.expected_matches), encoding="utf-8")
        (d / "expected_entities.json").write_text(dump_json(self.expected_entities), encoding="utf-8")
        (d / "gold_keymap.json").write_text(dump_json(self.gold_keymap), encoding="utf-8")
        (d / "film_links.json").write_text(dump_json(self.film_links), encoding="utf-8")

    @classmethod
    def read(cls, directory) -> "GroundTruthBundle":
        d = Path(directory)
        matches = parse_match_set((d / "matches.er.json").read_text(encoding="utf-8"))
        entities = json.loads((d / "expected_entities.json").read_text(encoding="utf-8"))
        for i, e in enumerate(entities):
            if not isinstance(e, dict) or not {"id", "type", "label"} <= set(e):
                raise ExchangeError("expected entity needs id, type, label", i)
        keymap_path = d / "gold_keymap.json"
        keymap = json.loads(keymap_path.read_text(encoding="utf-8")) if keymap_path.exists() else []
        links_path = d / "film_links.json"
        links = json.loads(links_path.read_text(encoding="utf-8")) if links_path.exists() else []
        return cls(matches, entities, keymap, links)
