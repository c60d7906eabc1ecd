"""RDF terms, an indexed immutable graph, and N-Triples I/O.

Only IRIs and literals are supported; blank nodes are rejected by the parser.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional, Union

from .namespaces import RDF_LANGSTRING, RDF_TYPE, XSD_STRING

_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_LANG = re.compile(r"^[a-zA-Z]+(-[a-zA-Z0-9]+)*$")


class Iri(str):
    """An absolute IRI. Behaves as the underlying string."""

    __slots__ = ()

    def __new__(cls, value: str) -> "Iri":
        if isinstance(value, Iri):
            return value
        if not value or _IRI_FORBIDDEN.search(value) or not _SCHEME.match(value):
            raise ValueError(f"invalid IRI: {value!r}")
        return str.__new__(cls, value)

    def __repr__(self) -> str:
        return f"Iri({str.__repr__(self)})"

    def n3(self) -> str:
        return f"<{self}>"


class Literal(NamedTuple):
    lexical: str
    datatype: str = XSD_STRING
    lang: Optional[str] = None

    @classmethod
    def of(cls, lexical: str, datatype: str = XSD_STRING, lang: Optional[str] = None) -> "Literal":
        if lang is not None:
            if not _LANG.match(lang):
                raise ValueError(f"invalid language tag: {lang!r}")
            return cls(lexical, RDF_LANGSTRING, lang)
        if datatype == RDF_LANGSTRING:
            raise ValueError("rdf:langString literal requires a language tag")
        return cls(lexical, Iri(datatype), None)

    def n3(self) -> str:
        body = '"' + escape_literal(self.lexical) + '"'
        if self.lang is not None:
            return f"{body}@{self.lang}"
        if self.datatype == XSD_STRING:
            return body
        return f"{body}^^<{self.datatype}>"


Term = Union[Iri, Literal]


class Triple(NamedTuple):
    s: Iri
    p: Iri
    o: Term

    def n3(self) -> str:
        return f"{self.s.n3()} {self.p.n3()} {term_n3(self.o)} ."


def term_n3(term: Term) -> str:
    return term.n3()


def is_literal(term: object) -> bool:
    return isinstance(term, Literal)


def triple_key(t: Triple) -> tuple[str, str, str]:
    """Canonical sort key: code-point order of the serialized terms."""
    return ("<" + t.s + ">", "<" + t.p + ">", term_n3(t.o))


class Graph:
    """Immutable set of triples with subject/predicate/object indexes.

    Iteration is in canonical order, so insertion order is never observable.
    """

    __slots__ = ("_triples", "_sorted", "_by_s", "_by_p", "_by_o")

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples = frozenset(triples)
        self._sorted: Optional[tuple[Triple, ...]] = None
        self._by_s: Optional[dict] = None
        self._by_p: Optional[dict] = None
        self._by_o: Optional[dict] = None

    def _build_indexes(self) -> None:
        by_s: dict = {}
        by_p: dict = {}
        by_o: dict = {}
        for t in self._triples:
            by_s.setdefault(t.s, []).append(t)
            by_p.setdefault(t.p, []).append(t)
            by_o.setdefault(t.o, []).append(t)
        self._by_s, self._by_p, self._by_o = by_s, by_p, by_o

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._triples, key=triple_key))
        return iter(self._sorted)

    def __contains__(self, t: object) -> bool:
        return t in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"<Graph with {len(self)} triples>"

    def __or__(self, other: "Graph") -> "Graph":
        return self.union(other)

    def __sub__(self, other: "Graph") -> "Graph":
        return Graph(self._triples - other._triples)

    def __and__(self, other: "Graph") -> "Graph":
        return Graph(self._triples & other._triples)

    @property
    def triple_set(self) -> frozenset:
        return self._triples

    def union(self, *others: "Graph") -> "Graph":
        out = set(self._triples)
        for g in others:
            out.update(g._triples)
        return Graph(out)

    def match(self, s=None, p=None, o=None) -> list[Triple]:
        """All triples matching the pattern; ``None`` is a wildcard."""
        if self._by_s is None:
            self._build_indexes()
        candidates = None
        for term, index in ((s, self._by_s), (p, self._by_p), (o, self._by_o)):
            if term is None:
                continue
            bucket = index.get(term, ())
            if candidates is None or len(bucket) < len(candidates):
                candidates = bucket
        if candidates is None:
            return list(self)
        return [
            t for t in candidates
            if (s is None or t.s == s) and (p is None or t.p == p) and (o is None or t.o == o)
        ]

    def objects(self, s, p) -> list[Term]:
        return sorted((t.o for t in self.match(s, p, None)), key=term_n3)

    def value(self, s, p) -> Optional[Term]:
        objs = self.objects(s, p)
        return objs[0] if objs else None

    def subjects(self) -> list[Iri]:
        if self._by_s is None:
            self._build_indexes()
        return sorted(self._by_s)

    def predicates(self) -> list[Iri]:
        if self._by_p is None:
            self._build_indexes()
        return sorted(self._by_p)

    def has_subject(self, s) -> bool:
        if self._by_s is None:
            self._build_indexes()
        return s in self._by_s

    def has_object(self, o) -> bool:
        if self._by_o is None:
            self._build_indexes()
        return o in self._by_o


class NTriplesError(ValueError):
    def __init__(self, line_no: int, line: str, reason: str):
        super().__init__(f"line {line_no}: {reason}: {line!r}")
        self.line_no = line_no
        self.line = line
        self.reason = reason


_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\", "b": "\b", "f": "\f", "'": "'"}
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.S)


def _unescape(text: str) -> str:
    def repl(m: re.Match) -> str:
        code = m.group(1)
        if code[0] in "uU" and len(code) > 1:
            return chr(int(code[1:], 16))
        if code in _ESCAPES:
            return _ESCAPES[code]
        raise ValueError(f"invalid escape \\{code}")

    return _ESCAPE_RE.sub(repl, text)


def _unescape_iri(text: str) -> str:
    if "\\" not in text:
        return text

    def repl(m: re.Match) -> str:
        code = m.group(1)
        if code[0] in "uU" and len(code) > 1:
            return chr(int(code[1:], 16))
        raise ValueError(f"invalid IRI escape \\{code}")

    return _ESCAPE_RE.sub(repl, text)


def escape_literal(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


_IRIREF = r'<((?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)>'
_LITERAL = r'"((?:[^"\\\n\r]|\\.)*)"(?:\^\^' + _IRIREF + r"|@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*))?"
_LINE = re.compile(
    r"^[ \t]*" + _IRIREF + r"[ \t]*" + _IRIREF + r"[ \t]*(?:" + _IRIREF + r"|" + _LITERAL
    + r")[ \t]*\.[ \t]*(?:#.*)?$"
)
_CONTROL = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f\x7f]")


def _parse_line(line: str) -> Triple:
    m = _LINE.match(line)
    if m is None:
        if "_:" in line:
            raise ValueError("blank nodes are not supported")
        raise ValueError("malformed triple")
    s_raw, p_raw, o_iri, lex, dt, lang = m.groups()
    s = Iri(_unescape_iri(s_raw))
    p = Iri(_unescape_iri(p_raw))
    if o_iri is not None:
        return Triple(s, p, Iri(_unescape_iri(o_iri)))
    if _CONTROL.search(lex):
        raise ValueError("raw control character in literal")
    lexical = _unescape(lex)
    if lang is not None:
        return Triple(s, p, Literal.of(lexical, lang=lang))
    return Triple(s, p, Literal.of(lexical, _unescape_iri(dt) if dt else XSD_STRING))


def parse_ntriples(text: str) -> Graph:
    """Parse N-Triples text. Fails on the first malformed line."""
    triples = set()
    for n, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            triples.add(_parse_line(line))
        except ValueError as exc:
            raise NTriplesError(n, line, str(exc)) from None
    return Graph(triples)


def serialize_ntriples(g: Graph) -> str:
    return "".join(t.n3() + "\n" for t in g)


def read_graph(path) -> Graph:
    return parse_ntriples(Path(path).read_text(encoding="utf-8"))


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(serialize_ntriples(g), encoding="utf-8")


def _rename(term, old: str, new: str):
    if isinstance(term, str) and term.startswith(old):
        return Iri(new + term[len(old):])
    return term


def rename_namespace(g: Graph, old: str, new: str) -> Graph:
    """Replace the prefix ``old`` by ``new`` in every IRI that starts with it."""
    if not old:
        raise ValueError("namespace prefix to replace must be non-empty")
    return Graph(
        Triple(_rename(t.s, old, new), _rename(t.p, old, new), _rename(t.o, old, new)) for t in g
    )


def graph_stats_primitives(g: Graph) -> tuple[set, set, set]:
    """Entities, predicates and asserted classes of ``g``.

    Entities are subjects plus IRI objects of non-type triples; class IRIs
    reached only through rdf:type are not entities.
    """
    entities: set = set()
    predicates: set = set()
    classes: set = set()
    for t in g.triple_set:
        entities.add(t.s)
        predicates.add(t.p)
        if t.p == RDF_TYPE:
            classes.add(t.o)
        elif not isinstance(t.o, Literal):
            entities.add(t.o)
    return entities, predicates, classes


def labels_of(g: Graph, predicates: Iterable[str]) -> dict[Iri, list[str]]:
    """Map entity -> sorted lexical forms of its label-like literals."""
    out: dict[Iri, set] = {}
    for p in predicates:
        for t in g.match(p=p):
            if isinstance(t.o, Literal):
                out.setdefault(t.s, set()).add(t.o.lexical)
    return {k: sorted(v) for k, v in out.items()}
