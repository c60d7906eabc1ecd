"""``kgb`` command line: gen, validate, run, eval, rank, audit."""

from __future__ import annotations

import argparse
import csv
import glob
import os
import re
import sys
from pathlib import Path

from .benchgen.audit import audit
from .benchgen.generate import BenchConfig, BenchConfigError, generate
from .exchange import ExchangeError, dump_json
from .metrics import EvalReport, evaluate_increment
from .ontology import load_ontology
from .pipeline import InvalidPipelineError, PipelineError, RunReport, validate_pipeline
from .pipeline.spec import SpecError
from .rdf import NTriplesError, read_graph
from .ranking import SCHEMES, RankingError, cohort_groups, format_table, memory_available, ranking_table
from .runner import WORKDIR_ENV, load_layout, run_increments
from .tasks import default_registry

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2
_KG_NAME = re.compile(r"kg_(\d+)\.nt$")


def _err(msg: str) -> None:
    print(f"kgb: {msg}", file=sys.stderr)


def _parse_sets(items) -> dict:
    out: dict = {}
    for item in items or ():
        target, eq, value = item.partition("=")
        task, dot, key = target.partition(".")
        if not eq or not dot or not task or not key:
            raise SpecError(f"--set expects TASK.KEY=VALUE, got {item!r}")
        out.setdefault(task, {})[key] = value
    return out


def cmd_gen(args) -> int:
    cfg = BenchConfig(
        nFilms=args.films, rngSeed=args.seed, filmOverlapRate=args.overlap, ambiguityRate=args.ambiguity,
        distractorRate=args.distractors,
    )
    manifest = generate(cfg, args.out)
    counts = manifest["counts"]
    print(f"wrote {args.out}: {counts['films']} films, {counts['persons']} persons, "
          f"{counts['companies']} companies, split films {counts['splitFilms']}")
    return EXIT_OK


def cmd_validate(args) -> int:
    layout = load_layout(args.spec)
    registry = default_registry()
    bad = False
    for k, stage in enumerate(layout.stages):
        result = validate_pipeline(stage, registry)
        label = stage.name if len(layout.stages) == 1 else f"{layout.name} stage {k + 1} ({stage.name})"
        if result.ok:
            print(f"{label}: ok")
        else:
            bad = True
            print(f"{label}: {len(result.violations)} violation(s)")
            for v in result.violations:
                print(f"  {v}")
    return EXIT_INVALID if bad else EXIT_OK


def cmd_run(args) -> int:
    if args.increments < 1:
        _err("increments must be ≥ 1")
        return EXIT_INVALID
    layout = load_layout(args.spec)
    registry = default_registry()
    for stage in layout.stages:
        result = validate_pipeline(stage, registry)
        if not result.ok:
            print(f"{stage.name}: {len(result.violations)} violation(s)")
            for v in result.violations:
                print(f"  {v}")
            return EXIT_INVALID
    results = run_increments(layout, args.bench, args.increments, args.out, registry,
                             clean=args.clean, overrides=_parse_sets(args.set))
    for path, report in results:
        print(f"increment {report.increment}: {path} ({len(read_graph(path))} triples, "
              f"{report.total_duration_seconds:.2f}s)")
        for w in report.warnings:
            print(f"  warning: {w}")
    return EXIT_OK


def _kg_files(pattern: str) -> list:
    found = []
    for p in sorted(glob.glob(pattern)):
        m = _KG_NAME.search(Path(p).name)
        if m:
            found.append((int(m.group(1)), Path(p)))
    return sorted(found)


SUMMARY_COLUMNS = [
    ("increment", lambda r: r.increment),
    ("facts", lambda r: r.statistics.factCount),
    ("entities", lambda r: r.statistics.entityCount),
    ("relations", lambda r: r.statistics.relationNameCount),
    ("types", lambda r: r.statistics.typeCount),
    ("untyped", lambda r: r.statistics.untypedCount),
    ("density", lambda r: r.statistics.density),
    ("semanticAverage", lambda r: r.semantic.average),
    ("refPrecision", lambda r: r.reference.fuzzyReferenceCoverage["precision"]),
    ("refRecall", lambda r: r.reference.fuzzyReferenceCoverage["recall"]),
    ("sourceEntities", lambda r: r.reference.sourceEntityCoverage["recall"]),
    ("durationSeconds", lambda r: r.durationSeconds),
]


def cmd_eval(args) -> int:
    from .plots import growth_plot

    bench, out = Path(args.bench), Path(args.out)
    kgs = _kg_files(args.kg)
    if not kgs:
        _err(f"no kg_<i>.nt files match {args.kg}")
        return EXIT_RUNTIME
    artifacts = Path(args.artifacts)
    work_root = Path(args.workdir or os.environ.get(WORKDIR_ENV) or artifacts)
    schema = load_ontology(read_graph(bench / "ontology.nt"))
    registry = default_registry()
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    cumulative = 0.0
    for i, kg_path in kgs:
        prev_path = kg_path.with_name(f"kg_{i - 1}.nt") if i > 1 else bench / "seed.nt"
        if not prev_path.is_file():
            _err(f"increment {i}: previous KG {prev_path} not found")
            return EXIT_RUNTIME
        run_path = artifacts / f"run_{i}.report.json"
        run = RunReport.from_json(run_path.read_text(encoding="utf-8")) if run_path.is_file() else None
        work = work_root / f"work_{i}"
        rep = evaluate_increment(
            bench, i, read_graph(kg_path), read_graph(prev_path), schema, run,
            work if work.is_dir() else None, registry, cumulative,
        )
        cumulative = rep.cumulativeDurationSeconds
        (out / f"eval_{i}.json").write_text(rep.to_json(), encoding="utf-8")
        reports.append(rep)
        print(f"increment {i}: facts {rep.statistics.factCount}, entities {rep.statistics.entityCount}, "
              f"semantic avg {rep.semantic.average:.3f}")
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([name for name, _ in SUMMARY_COLUMNS])
        for r in reports:
            w.writerow([f(r) for _, f in SUMMARY_COLUMNS])
    growth_plot(reports, out / "growth.png")
    return EXIT_OK


def cmd_rank(args) -> int:
    from .plots import ranking_plot

    paths = sorted(glob.glob(args.reports))
    if not paths:
        _err(f"no reports match {args.reports}")
        return EXIT_RUNTIME
    reports = [EvalReport.read(p) for p in paths]
    names = list(SCHEMES) if args.all else [args.scheme]
    for n in names:
        if n not in SCHEMES:
            raise RankingError(f"unknown scheme {n!r}; known: {', '.join(SCHEMES)}")
    mem = memory_available(reports)
    table = ranking_table(cohort_groups(reports), names, memory_used=mem)
    for n in names:
        print(f"{n}: ({', '.join(str(w) for w in SCHEMES[n].weights)})")
    if not mem:
        print("efficiency score uses duration only (peak memory not reported by every pipeline)")
    print(format_table(table), end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "ranking.json").write_text(dump_json(table), encoding="utf-8")
        (out / "ranking.txt").write_text(format_table(table), encoding="utf-8")
        with open(out / "ranking.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["pipeline", "GM1", "GM2", "GM3", "GM4"] + [f"total_{n}" for n in names] + [f"rank_{n}" for n in names])
            for r in table["rows"]:
                w.writerow([r["pipeline"], r["size"], r["consistency"], r["integration"], r["efficiency"]]
                           + [r["totals"][n] for n in names] + [r["ranks"][n] for n in names])
        ranking_plot(table, out / "ranking.png")
    return EXIT_OK


def cmd_audit(args) -> int:
    report = audit(args.bench)
    print(dump_json(report.to_dict()), end="")
    return EXIT_OK if report.ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kgb", description="Incremental KG construction benchmark")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a benchmark bundle")
    g.add_argument("--films", type=int, default=100)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--out", required=True)
    g.add_argument("--overlap", type=float, default=0.05, help="film overlap rate between splits")
    g.add_argument("--ambiguity", type=float, default=0.2)
    g.add_argument("--distractors", type=float, default=0.35)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="statically check a pipeline spec")
    v.add_argument("--spec", required=True)
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="run a pipeline over increments 1..N")
    r.add_argument("--spec", required=True)
    r.add_argument("--bench", required=True)
    r.add_argument("--increments", type=int, default=3)
    r.add_argument("--out", required=True)
    r.add_argument("--clean", action="store_true", help="delete per-increment work directories")
    r.add_argument("--set", action="append", metavar="TASK.KEY=VALUE", help="override a task config value")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("eval", help="compute metric reports for run outputs")
    e.add_argument("--bench", required=True)
    e.add_argument("--kg", required=True, help="glob of kg_<i>.nt files")
    e.add_argument("--artifacts", required=True, help="directory holding run_<i>.report.json")
    e.add_argument("--workdir", help=f"root of work_<i> directories (default: ${WORKDIR_ENV} or --artifacts)")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_eval)

    k = sub.add_parser("rank", help="rank pipelines from eval reports")
    k.add_argument("--reports", required=True, help="glob of eval_<i>.json files")
    grp = k.add_mutually_exclusive_group(required=True)
    grp.add_argument("--scheme")
    grp.add_argument("--all", action="store_true")
    k.add_argument("--out", help="directory for ranking.{json,txt,csv,png}")
    k.set_defaults(func=cmd_rank)

    a = sub.add_parser("audit", help="check a bundle's construction constraints")
    a.add_argument("--bench", required=True)
    a.set_defaults(func=cmd_audit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, InvalidPipelineError, BenchConfigError) as exc:
        _err(str(exc))
        return EXIT_INVALID
    except (PipelineError, RankingError, ExchangeError, NTriplesError, OSError, ValueError, KeyError) as exc:
        _err(str(exc))
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
