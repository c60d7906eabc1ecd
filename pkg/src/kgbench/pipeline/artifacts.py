"""Reading, checking and writing port artifacts by DataFormat."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

from ..exchange import (
    DataFormat,
    ExchangeError,
    KeDoc,
    MatchSet,
    dump_json,
    match_set_from_json,
    ke_doc_from_json,
    serialize_ke_docs,
    serialize_match_set,
)
from ..rdf import Graph, NTriplesError, parse_ntriples, serialize_ntriples


class PortFormatError(ValueError):
    """An artifact does not conform to the DataFormat its port declares."""

    def __init__(self, fmt: DataFormat, message: str, where: str = ""):
        loc = f"{where}: " if where else ""
        super().__init__(f"{loc}not valid {fmt.value}: {message}")
        self.format = fmt
        self.where = where


def parse_csv(text: str) -> list[list[str]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or not rows[0]:
        raise ValueError("missing header row")
    width = len(rows[0])
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise ValueError(f"row {i} has {len(row)} cells, header has {width}")
    return rows


def write_csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def split_documents(text: str) -> list[str]:
    """TEXT documents are separated by one or more blank lines."""
    docs, cur = [], []
    for line in text.splitlines():
        if line.strip():
            cur.append(line.strip())
        elif cur:
            docs.append(" ".join(cur))
            cur = []
    if cur:
        docs.append(" ".join(cur))
    return docs


def decode(fmt: DataFormat, text: str, where: str = "") -> Any:
    """Parse artifact text into its in-memory value; raises PortFormatError."""
    try:
        if fmt is DataFormat.RDF:
            return parse_ntriples(text)
        if fmt is DataFormat.JSON:
            data = json.loads(text)
            if not isinstance(data, list) or not all(isinstance(d, dict) for d in data):
                raise ValueError("expected an array of objects")
            return data
        if fmt is DataFormat.TEXT:
            return text
        if fmt is DataFormat.CSV:
            parse_csv(text)
            return text
        if fmt is DataFormat.JSON_ER:
            return match_set_from_json(json.loads(text))
        if fmt is DataFormat.JSON_KE:
            data = json.loads(text)
            if not isinstance(data, list):
                raise ValueError("expected an array of KE documents")
            return [ke_doc_from_json(item, i) for i, item in enumerate(data)]
    except (NTriplesError, ExchangeError, ValueError) as exc:
        raise PortFormatError(fmt, str(exc), where) from None
    raise PortFormatError(fmt, "unsupported format", where)


def encode(fmt: DataFormat, value: Any, where: str = "") -> str:
    """Serialize an in-memory value, checking it matches the declared format."""
    if fmt is DataFormat.RDF and isinstance(value, Graph):
        return serialize_ntriples(value)
    if fmt is DataFormat.JSON and isinstance(value, list):
        return dump_json(value)
    if fmt in (DataFormat.TEXT, DataFormat.CSV) and isinstance(value, str):
        if fmt is DataFormat.CSV:
            decode(fmt, value, where)
        return value
    if fmt is DataFormat.JSON_ER and isinstance(value, MatchSet):
        return serialize_match_set(value)
    if fmt is DataFormat.JSON_KE and isinstance(value, list) and all(isinstance(d, KeDoc) for d in value):
        return serialize_ke_docs(value)
    raise PortFormatError(fmt, f"task produced {type(value).__name__}", where)


def read_artifact(fmt: DataFormat, path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise PortFormatError(fmt, f"not UTF-8 ({exc})", str(p)) from None
    return decode(fmt, text, str(p))


def write_artifact(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")
