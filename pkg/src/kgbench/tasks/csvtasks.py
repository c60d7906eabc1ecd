"""RDF to CSV conversion plus CSV record linkage and schema matching."""

from __future__ import annotations

from collections import defaultdict

from ..exchange import MatchRecord, MatchSet
from ..namespaces import RDF_TYPE, RDFS_LABEL, local_name
from ..pipeline.artifacts import parse_csv, write_csv
from ..rdf import Graph, Literal
from ..similarity import jaccard, tokens, trigram_similarity
from .config import SimilarityConfig

MULTI_SEP = "|"
RESERVED_COLUMNS = ("id", "type")


def _cell(term) -> str:
    return term.lexical if isinstance(term, Literal) else str(term)


def tabularize(kg: Graph) -> str:
    """One row per subject; columns id, type, then one per predicate IRI."""
    predicates = sorted({t.p for t in kg.triple_set if t.p != RDF_TYPE})
    rows = [["id", "type", *predicates]]
    for s in sorted(kg.subjects()):
        by_p: dict = defaultdict(set)
        for t in kg.match(s=s):
            by_p[t.p].add(_cell(t.o))
        row = [s, MULTI_SEP.join(sorted(by_p.get(RDF_TYPE, ())))]
        row += [MULTI_SEP.join(sorted(by_p.get(p, ()))) for p in predicates]
        rows.append(row)
    return write_csv(rows)


class CsvTable:
    def __init__(self, text: str):
        rows = parse_csv(text)
        self.header = rows[0]
        if "id" not in self.header:
            raise ValueError("CSV has no id column")
        self.rows = rows[1:]
        self.id_col = self.header.index("id")

    def label_col(self):
        for i, h in enumerate(self.header):
            if h == RDFS_LABEL or h.lower() in ("label", "name", "title"):
                return i
        return None

    def values(self, row, col) -> list[str]:
        cell = row[col]
        return [v for v in cell.split(MULTI_SEP) if v] if cell else []


def _value_tokens(value: str) -> set:
    # IRIs compare by local name so that shaded copies stay comparable
    if "://" in value:
        value = local_name(value)
    return tokens(value)


def _row_tokens(table: CsvTable, row) -> set:
    out: set = set()
    for col in range(len(table.header)):
        if col == table.id_col:
            continue
        for v in table.values(row, col):
            out |= _value_tokens(v)
    return out


def csv_record_link(a: str, b: str, cfg: SimilarityConfig = SimilarityConfig()) -> MatchSet:
    """Clean-clean entity matching: label-token blocking, Jaccard scoring, greedy 1:1."""
    ta, tb = CsvTable(a), CsvTable(b)
    la, lb = ta.label_col(), tb.label_col()
    if la is None or lb is None:
        return MatchSet()
    blocks: dict = defaultdict(list)
    for i, row in enumerate(ta.rows):
        for tok in {t for v in ta.values(row, la) for t in tokens(v)}:
            blocks[tok].append(i)
    tok_a = [_row_tokens(ta, r) for r in ta.rows]
    scored = []
    for j, row in enumerate(tb.rows):
        cands = {i for v in tb.values(row, lb) for t in tokens(v) for i in blocks.get(t, ())}
        if not cands:
            continue
        tb_tokens = _row_tokens(tb, row)
        for i in cands:
            score = jaccard(tok_a[i], tb_tokens)
            if score >= cfg.csvRecordThreshold:
                scored.append((-score, ta.rows[i][ta.id_col], row[tb.id_col]))
    scored.sort()
    used_a, used_b, out = set(), set(), []
    for neg, ida, idb in scored:
        if ida in used_a or idb in used_b:
            continue
        used_a.add(ida)
        used_b.add(idb)
        out.append(MatchRecord(ida, idb, "entity", -neg))
    return MatchSet.of(out)


def _column_values(table: CsvTable, col: int) -> set:
    return {local_name(v) if "://" in v else v for row in table.rows for v in table.values(row, col)}


def csv_schema_match(a: str, b: str, cfg: SimilarityConfig = SimilarityConfig()) -> MatchSet:
    """Best column of ``a`` for every column of ``b``, scored by name or instance overlap."""
    ta, tb = CsvTable(a), CsvTable(b)
    cols_a = [i for i, h in enumerate(ta.header) if h not in RESERVED_COLUMNS]
    vals_a = {i: _column_values(ta, i) for i in cols_a}
    out = []
    for j, hb in enumerate(tb.header):
        if hb in RESERVED_COLUMNS:
            continue
        vb = _column_values(tb, j)
        best = None
        for i in cols_a:
            ha = ta.header[i]
            score = max(trigram_similarity(local_name(ha), local_name(hb)), jaccard(vals_a[i], vb))
            if best is None or score > best[0] or (score == best[0] and ha < best[1]):
                best = (score, ha)
        if best is not None and best[0] >= cfg.csvSchemaThreshold:
            out.append(MatchRecord(best[1], hb, "relation", best[0]))
    return MatchSet.of(out)
