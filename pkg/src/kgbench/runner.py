"""Incremental execution: thread KG_{i-1} as the seed of run i."""

from __future__ import annotations

import json
import os
import shutil
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .exchange import DataFormat
from .ontology import load_ontology
from .pipeline import PipelineError, PipelineSpec, Registry, RunReport, execute_pipeline, pipeline_from_dict
from .pipeline.spec import SpecError
from .rdf import read_graph

SOURCE_FILES = {DataFormat.RDF: "source.nt", DataFormat.JSON: "source.json", DataFormat.TEXT: "source.txt"}
WORKDIR_ENV = "KGB_WORKDIR"


@dataclass(frozen=True)
class Layout:
    """One or more pipeline stages; increment i runs stage (i-1) mod len(stages)."""

    name: str
    stages: tuple

    def stage(self, increment: int) -> PipelineSpec:
        return self.stages[(increment - 1) % len(self.stages)]


def builtin_layouts() -> list[str]:
    return sorted(p.name for p in resources.files("kgbench.layouts").iterdir() if p.name.endswith(".json"))


def _read_layout_json(path: Path):
    if not path.is_file():
        packaged = resources.files("kgbench.layouts") / path.name
        if packaged.is_file():
            return json.loads(packaged.read_text(encoding="utf-8")), None
        raise SpecError(f"layout file {path} not found")
    try:
        return json.loads(path.read_text(encoding="utf-8")), path.parent
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON: {exc}") from None


def load_layout(path) -> Layout:
    """Load a single pipeline spec or a composite ``{"name", "stages": [...]}`` file.

    Stage entries are inline specs or file names resolved next to the composite
    file, falling back to the packaged layouts.
    """
    path = Path(path)
    data, base = _read_layout_json(path)
    if isinstance(data, dict) and "stages" in data:
        stages = []
        for entry in data["stages"]:
            if isinstance(entry, str):
                sub, _ = _read_layout_json((base or Path(".")) / entry)
                stages.append(pipeline_from_dict(sub))
            else:
                stages.append(pipeline_from_dict(entry))
        if not stages:
            raise SpecError("composite layout has no stages")
        return Layout(str(data.get("name", path.stem)), tuple(stages))
    spec = pipeline_from_dict(data)
    return Layout(spec.name, (spec,))


def source_path(bench_dir, increment: int, fmt: DataFormat) -> Path:
    if fmt not in SOURCE_FILES:
        raise PipelineError("", f"no benchmark source of format {fmt.value}")
    return Path(bench_dir) / f"source{increment}" / SOURCE_FILES[fmt]


def run_increments(layout: Layout, bench_dir, increments: int, out_dir, registry: Registry,
                   clean: bool = False, overrides: Optional[dict] = None,
                   workdir_root=None) -> list[tuple[Path, RunReport]]:
    """Run increments 1..n, writing ``kg_<i>.nt`` and ``run_<i>.report.json`` into ``out_dir``."""
    if increments < 1:
        raise ValueError("increments must be >= 1")
    bench_dir, out_dir = Path(bench_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if workdir_root is None:
        workdir_root = os.environ.get(WORKDIR_ENV) or out_dir
    workdir_root = Path(workdir_root)
    schema = load_ontology(read_graph(bench_dir / "ontology.nt"))
    seed = bench_dir / "seed.nt"
    results = []
    for i in range(1, increments + 1):
        spec = layout.stage(i)
        src = source_path(bench_dir, i, spec.source_format)
        if not src.is_file():
            raise PipelineError("", f"increment {i}: source file {src} does not exist")
        workdir = workdir_root / f"work_{i}"
        if workdir.exists():
            shutil.rmtree(workdir)
        try:
            result, report = execute_pipeline(spec, seed, src, workdir, registry, schema, i, overrides)
        except PipelineError as exc:
            err = PipelineError("", f"increment {i}: {exc}")
            err.task_id = exc.task_id
            raise err from exc
        report.pipeline = layout.name
        kg_path = out_dir / f"kg_{i}.nt"
        shutil.copyfile(result, kg_path)
        (out_dir / f"run_{i}.report.json").write_text(report.to_json(), encoding="utf-8")
        if clean:
            shutil.rmtree(workdir)
        results.append((kg_path, report))
        seed = kg_path
    return results
