"""Group metrics, weighted totals and pipeline ranking."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .exchange import dump_json


class RankingError(ValueError):
    pass


@dataclass(frozen=True)
class WeightScheme:
    name: str
    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != 4:
            raise RankingError(f"scheme {self.name!r} needs four weights")
        if any(x < 0 or math.isnan(x) for x in w):
            raise RankingError(f"scheme {self.name!r} has a negative weight")
        if abs(math.fsum(w) - 1.0) > 1e-9:
            raise RankingError(f"weights of scheme {self.name!r} sum to {math.fsum(w)}, not 1")
        object.__setattr__(self, "weights", w)


SCHEMES = {
    "equal": WeightScheme("equal", (0.25, 0.25, 0.25, 0.25)),
    "quantity": WeightScheme("quantity", (0.50, 0.10, 0.10, 0.30)),
    "quality": WeightScheme("quality", (0.0, 0.50, 0.50, 0.0)),
    "reference": WeightScheme("reference", (0.0, 0.20, 0.80, 0.0)),
    "efficiency": WeightScheme("efficiency", (0.20, 0.20, 0.20, 0.40)),
}


def scheme(name_or_scheme) -> WeightScheme:
    if isinstance(name_or_scheme, WeightScheme):
        return name_or_scheme
    try:
        return SCHEMES[name_or_scheme]
    except KeyError:
        raise RankingError(f"unknown scheme {name_or_scheme!r}; known: {', '.join(SCHEMES)}") from None


def normalize(value: float, reference: float, kind: str) -> float:
    """``count``: value relative to the reference size, capped at 1.
    ``resource``: the cohort minimum over value, so the cheapest scores 1.
    """
    if kind == "count":
        if reference <= 0:
            raise RankingError("count normalization needs a positive reference")
        return min(value / reference, 1.0)
    if kind == "resource":
        if value <= 0:
            raise RankingError("resource normalization needs a positive value")
        return min(reference / value, 1.0)
    raise RankingError(f"unknown normalization kind {kind!r}")


@dataclass(frozen=True)
class GroupScores:
    size: float
    consistency: float
    integration: float
    efficiency: float

    def as_tuple(self) -> tuple:
        return (self.size, self.consistency, self.integration, self.efficiency)


@dataclass(frozen=True)
class Minima:
    """Cohort minima used by resource normalization."""

    duration: float
    memory: Optional[float] = None


def _mean(*xs) -> float:
    return math.fsum(xs) / len(xs)


def _f1(prf: Optional[dict]) -> Optional[float]:
    if prf is None:
        return None
    p, r = prf["precision"], prf["recall"]
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def integration_extra(ref: dict, source_format: str) -> float:
    """The source-specific third term of the integration score."""
    if source_format == "RDF":
        value = _f1(ref.get("matchPooled"))
        what = "entity/ontology matching"
    elif source_format == "JSON":
        rl = ref.get("relationLinking")
        value = None if rl is None else rl["accuracy"]
        what = "relation linking"
    elif source_format == "TEXT":
        el = ref.get("entityLinking")
        value = None if el is None else el["recall"]
        what = "entity linking"
    else:
        raise RankingError(f"no integration score for source format {source_format}")
    if value is None:
        raise RankingError(f"{source_format} pipeline lacks its {what} metric")
    return value


def group_scores(stat: dict, sem: dict, ref: dict, duration: float, memory: Optional[float],
                 reference_stat: dict, minima: Minima, source_format: str) -> GroupScores:
    size = _mean(
        normalize(stat["factCount"], reference_stat["factCount"], "count"),
        normalize(stat["density"], reference_stat["density"], "count"),
    )
    consistency = _mean(
        sem["disjointTypesScore"],
        _mean(sem["domainScore"], sem["rangeScore"]),
        sem["directionScore"],
        _mean(sem["literalTypeScore"], sem["literalFormatScore"]),
    )
    integration = _mean(
        _f1(ref["fuzzyReferenceCoverage"]),
        ref["sourceEntityCoverage"]["recall"],
        integration_extra(ref, source_format),
    )
    eff = [normalize(duration, minima.duration, "resource")]
    if memory is not None and minima.memory is not None:
        eff.append(normalize(memory, minima.memory, "resource"))
    return GroupScores(size, consistency, integration, _mean(*eff))


def total_score(groups: GroupScores, scheme_) -> float:
    w = scheme(scheme_).weights
    return math.fsum(a * b for a, b in zip(w, groups.as_tuple()))


@dataclass
class PipelineScore:
    pipeline: str
    groups: GroupScores
    total: float

    def to_dict(self) -> dict:
        return {"pipeline": self.pipeline, **asdict(self.groups), "total": self.total}


def rank(scores: list, scheme_) -> list:
    """Order (pipeline, GroupScores) pairs by descending total; names break ties."""
    sch = scheme(scheme_)
    out = [PipelineScore(name, g, total_score(g, sch)) for name, g in scores]
    return sorted(out, key=lambda s: (-s.total, s.pipeline))


def latest_reports(reports: list) -> list:
    """The highest increment per pipeline."""
    best: dict = {}
    for r in reports:
        cur = best.get(r.pipeline)
        if cur is None or r.increment > cur.increment:
            best[r.pipeline] = r
    return [best[k] for k in sorted(best)]


def memory_available(reports: list) -> bool:
    return all(r.maxPeakMemoryBytes for r in latest_reports(reports))


def cohort_groups(reports: list) -> list:
    """Group scores for the latest increment of each pipeline in ``reports`` (EvalReports).

    Peak memory enters the efficiency score only when every pipeline reports it.
    """
    latest = latest_reports(reports)
    if not latest:
        raise RankingError("no evaluation reports to rank")
    durations = [max(r.cumulativeDurationSeconds, 1e-9) for r in latest]
    memories = [r.maxPeakMemoryBytes for r in latest]
    mem_ok = all(m for m in memories)
    minima = Minima(min(durations), min(memories) if mem_ok else None)
    out = []
    for r, d in zip(latest, durations):
        g = group_scores(
            asdict(r.statistics), r.semantic.to_dict(), r.reference.to_dict(), d,
            r.maxPeakMemoryBytes if mem_ok else None, asdict(r.referenceStatistics), minima, r.sourceFormat,
        )
        out.append((r.pipeline, g))
    return out


def ranking_table(groups: list, schemes: Optional[list] = None, memory_used: bool = True) -> dict:
    """Per-pipeline group scores with totals and ranks under each scheme."""
    names = schemes or list(SCHEMES)
    rows = {name: {"pipeline": name, **asdict(g), "totals": {}, "ranks": {}} for name, g in groups}
    for sname in names:
        for pos, ps in enumerate(rank(groups, sname), start=1):
            rows[ps.pipeline]["totals"][sname] = ps.total
            rows[ps.pipeline]["ranks"][sname] = pos
    first = names[0]
    ordered = sorted(rows.values(), key=lambda r: (r["ranks"][first], r["pipeline"]))
    return {"schemes": {n: list(scheme(n).weights) for n in names}, "memoryUsed": memory_used, "rows": ordered}


def format_table(table: dict) -> str:
    """Aligned plain-text rendering of :func:`ranking_table`."""
    names = list(table["schemes"])
    header = ["pipeline", "GM1", "GM2", "GM3", "GM4"] + names
    lines = [header]
    for r in table["rows"]:
        cells = [r["pipeline"]] + [f"{r[k]:.3f}" for k in ("size", "consistency", "integration", "efficiency")]
        cells += [f"{r['totals'][n]:.3f} ({r['ranks'][n]})" for n in names]
        lines.append(cells)
    widths = [max(len(row[i]) for row in lines) for i in range(len(header))]
    fmt = lambda row: "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))  # noqa: E731
    out = [fmt(lines[0]), "  ".join("-" * w for w in widths)] + [fmt(row) for row in lines[1:]]
    return "\n".join(out) + "\n"


def table_json(table: dict) -> str:
    return dump_json(table)
