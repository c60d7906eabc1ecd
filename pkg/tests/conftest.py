from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from kgbench.benchgen.generate import BenchConfig, generate
from kgbench.benchgen.ontology_def import benchmark_schema
from kgbench.runner import load_layout, run_increments
from kgbench.tasks import default_registry

EX = "http://x.example/"


def iri(local: str) -> str:
    return EX + local


@pytest.fixture(scope="session")
def schema():
    return benchmark_schema()


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture(scope="session")
def bench100(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("bench") / "b100"
    generate(BenchConfig(nFilms=100, rngSeed=42), out)
    return out


class _Runs:
    """Lazily executed layouts over the shared 100-film bundle, one run per layout."""

    def __init__(self, bench: Path, root: Path):
        self.bench, self.root, self.cache = bench, root, {}

    def __call__(self, layout_file: str, increments: int = 3):
        key = (layout_file, increments)
        if key not in self.cache:
            out = self.root / f"{Path(layout_file).stem}_{increments}"
            if out.exists():
                shutil.rmtree(out)
            layout = load_layout(layout_file)
            self.cache[key] = (out, run_increments(layout, self.bench, increments, out, default_registry()))
        return self.cache[key]


@pytest.fixture(scope="session")
def runs(bench100, tmp_path_factory):
    return _Runs(bench100, tmp_path_factory.mktemp("runs"))


def pytest_terminal_summary(terminalreporter):
    from gate import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance gate")
        for line in RESULTS:
            terminalreporter.write_line(line)
