"""Iterative joint entity/relation alignment of two RDF graphs.

Entity evidence starts from shared literal values weighted by inverse
document frequency. Each round then scores source predicates against seed
predicates by how many triples between already-matched endpoints they
reproduce, and adds the agreement along aligned predicates as neighbour
evidence. IRIs present in both graphs are treated as pre-matched.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict

from ..exchange import MatchRecord, MatchSet
from ..namespaces import RDF_TYPE
from ..rdf import Graph, Literal
from .config import SimilarityConfig

# Values shared by more entities than this are not used to generate candidate pairs.
BLOCKING_CAP = 50
MIN_NEIGHBOUR_EVIDENCE = 2


class _Side:
    def __init__(self, g: Graph):
        self.values: dict = defaultdict(set)
        self.out: dict = defaultdict(list)  # s -> [(p, o)]
        self.lit_preds: dict = defaultdict(lambda: defaultdict(set))  # s -> lexical -> {p}
        self.obj_preds: dict = defaultdict(lambda: defaultdict(set))  # s -> object -> {p}
        self.types: dict = defaultdict(set)
        self.entities: set = set()
        for t in g:
            self.entities.add(t.s)
            if t.p == RDF_TYPE:
                self.types[t.s].add(t.o)
                continue
            self.out[t.s].append((t.p, t.o))
            if isinstance(t.o, Literal):
                self.values[t.s].add(t.o.lexical)
                self.lit_preds[t.s][t.o.lexical].add(t.p)
            else:
                self.entities.add(t.o)
                self.obj_preds[t.s][t.o].add(t.p)


def _argmax(scores: dict):
    return min(scores.items(), key=lambda kv: (-kv[1], kv[0]))


def graph_align(seed: Graph, source: Graph, cfg: SimilarityConfig = SimilarityConfig()) -> MatchSet:
    if len(seed) == 0 or len(source) == 0:
        raise ValueError("graph_align needs two non-empty graphs")
    a, b = _Side(seed), _Side(source)
    anchors = a.entities & b.entities
    n_entities = len(a.entities | b.entities)
    df: Counter = Counter()
    for side in (a, b):
        for vals in side.values.values():
            df.update(vals)
    idf = {v: math.log(1.0 + n_entities / c) for v, c in df.items()}
    norm = math.log(1.0 + n_entities)

    def weight(side: _Side, e) -> float:
        return math.fsum(idf[v] for v in side.values.get(e, ()))

    postings: dict = defaultdict(list)
    for e in sorted(a.values):
        for v in a.values[e]:
            if df[v] <= BLOCKING_CAP:
                postings[v].append(e)

    literal: dict = {}
    for f in sorted(b.entities - anchors):
        vf = b.values.get(f)
        if not vf:
            continue
        cands = {e for v in vf if df[v] <= BLOCKING_CAP for e in postings.get(v, ())}
        if not cands:
            continue
        wf = weight(b, f)
        scored = {}
        for e in cands:
            shared = a.values[e] & vf
            denom = max(weight(a, e), wf)
            scored[e] = math.fsum(idf[v] for v in shared) / denom if denom > 0 else 0.0
        literal[f] = scored

    scores = {f: dict(s) for f, s in literal.items()}
    rel_best: dict = {}
    confident: dict = {}
    for _ in range(cfg.maxIterations):
        confident = {x: x for x in anchors}
        for f, s in scores.items():
            e, sc = _argmax(s)
            if sc >= cfg.entityThreshold:
                confident[f] = e
        rel_best = _relation_scores(a, b, confident, cfg.relationThreshold)
        updated = {}
        for f, cands in literal.items():
            row = {}
            for e, lit in cands.items():
                nb = _neighbour(a, b, f, e, rel_best, confident, idf, norm)
                row[e] = 1.0 - (1.0 - lit) * (1.0 - nb)
            updated[f] = row
        if updated == scores:
            break
        scores = updated

    records = []
    for f in sorted(scores):
        e, sc = _argmax(scores[f])
        if sc >= cfg.entityThreshold:
            records.append(MatchRecord(e, f, "entity", min(1.0, sc)))
    final = {x: x for x in anchors}
    final.update({r.id2: r.id1 for r in records})
    for p, (q, sc) in rel_best.items():
        if p != q:
            records.append(MatchRecord(q, p, "relation", sc))
    for c, (d, sc) in _class_scores(a, b, final, cfg.relationThreshold).items():
        if c != d:
            records.append(MatchRecord(d, c, "relation", sc))
    return MatchSet.of(records)


def _relation_scores(a: _Side, b: _Side, confident: dict, threshold: float) -> dict:
    resolvable: Counter = Counter()
    satisfied: dict = defaultdict(Counter)
    for f, edges in b.out.items():
        e = confident.get(f)
        if e is None:
            continue
        for p, o in edges:
            if isinstance(o, Literal):
                qs = a.lit_preds.get(e, {}).get(o.lexical, ())
            elif o in confident:
                qs = a.obj_preds.get(e, {}).get(confident[o], ())
            else:
                continue
            resolvable[p] += 1
            for q in qs:
                satisfied[p][q] += 1
    best = {}
    for p in sorted(satisfied):
        q, n = min(satisfied[p].items(), key=lambda kv: (-kv[1], kv[0]))
        sc = n / resolvable[p]
        if sc >= threshold:
            best[p] = (q, sc)
    return best


def _neighbour(a: _Side, b: _Side, f, e, rel_best: dict, confident: dict, idf: dict, norm: float) -> float:
    total, hit, count = [], [], 0
    lit_e = a.lit_preds.get(e, {})
    obj_e = a.obj_preds.get(e, {})
    for p, o in b.out.get(f, ()):
        aligned = rel_best.get(p)
        if aligned is None:
            continue
        q = aligned[0]
        if isinstance(o, Literal):
            w = idf[o.lexical] / norm
            ok = q in lit_e.get(o.lexical, ())
        elif o in confident:
            w = 1.0
            ok = q in obj_e.get(confident[o], ())
        else:
            continue
        count += 1
        total.append(w)
        if ok:
            hit.append(w)
    if count < MIN_NEIGHBOUR_EVIDENCE:
        return 0.0
    denom = math.fsum(total)
    return math.fsum(hit) / denom if denom > 0 else 0.0


def _class_scores(a: _Side, b: _Side, matched: dict, threshold: float) -> dict:
    """Source class -> (seed class, share of its matched instances typed with it)."""
    members: Counter = Counter()
    agree: dict = defaultdict(Counter)
    for f, classes in b.types.items():
        e = matched.get(f)
        if e is None:
            continue
        for c in classes:
            members[c] += 1
            for d in a.types.get(e, ()):
                agree[c][d] += 1
    out = {}
    for c in sorted(agree):
        d, n = min(agree[c].items(), key=lambda kv: (-kv[1], kv[0]))
        sc = n / members[c]
        if sc >= threshold:
            out[c] = (d, sc)
    return out
