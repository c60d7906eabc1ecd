from __future__ import annotations

import json
import random
import sys
import threading
import time
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from kgbench.benchgen.generate import BenchConfig, generate
from kgbench.exchange import DataFormat
from kgbench.pipeline import (
    SEED,
    SOURCE,
    InvalidPipelineError,
    PipelineError,
    PipelineSpec,
    RunReport,
    ServiceError,
    SpecError,
    TaskSignature,
    TaskSpec,
    execute_pipeline,
    invoke_service_task,
    merged_config,
    pipeline_from_dict,
    validate_pipeline,
)
from kgbench.rdf import read_graph
from kgbench.runner import SOURCE_FILES, load_layout, run_increments

from pipegen import mutate, random_pipeline, run_checked

RDFA = [
    TaskSpec("align", "graph_align", "builtin", (SEED, SOURCE)),
    TaskSpec("fuse", "fusion_first", "builtin", (SEED, SOURCE, "align.out0")),
]


def spec_of(tasks, output="fuse.out0", fmt=DataFormat.RDF, name="p") -> PipelineSpec:
    return PipelineSpec(name, fmt, tuple(tasks), output)


@pytest.fixture(scope="module")
def small_bench(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("small") / "b40"
    generate(BenchConfig(nFilms=40, rngSeed=7), out)
    return out


# -- static validation -----------------------------------------------------------

def test_rdfa_structure_validates(registry):
    assert validate_pipeline(spec_of(RDFA), registry).ok


def test_csv_into_json_er_port(registry):
    tasks = [
        TaskSpec("tab", "tabularize", "builtin", (SEED,)),
        TaskSpec("fuse", "fusion_first", "builtin", (SEED, SOURCE, "tab.out0")),
    ]
    res = validate_pipeline(spec_of(tasks), registry)
    [v] = res.violations
    assert (v.kind, v.task_id, v.port, v.expected, v.actual) == ("format_mismatch", "fuse", "in2", "JSON_ER", "CSV")
    assert "expected JSON_ER, got CSV" in v.message


def test_forward_reference(registry):
    tasks = [
        TaskSpec("fuse", "fusion_first", "builtin", (SEED, SOURCE, "t9.out0")),
        TaskSpec("t9", "graph_align", "builtin", (SEED, SOURCE)),
    ]
    assert validate_pipeline(spec_of(tasks), registry).kinds() == {"forward_ref"}


def test_self_reference_is_forward(registry):
    tasks = [TaskSpec("a", "select_first", "builtin", (SEED, "a.out0"))]
    assert validate_pipeline(spec_of(tasks, "a.out0"), registry).kinds() == {"forward_ref"}


@pytest.mark.parametrize(
    "tasks, output, kind",
    [
        ([TaskSpec("x", "nope", "builtin", (SEED,))], "x.out0", "unknown_task"),
        ([TaskSpec("x", "select_first", "builtin", (SEED, "ghost.out0"))], "x.out0", "dangling_ref"),
        ([TaskSpec("x", "select_first", "builtin", (SEED,))], "x.out0", "arity"),
        ([TaskSpec("x", "graph_align", "builtin", (SEED, SOURCE))], "x.out0", "non_rdf_output"),
        ([TaskSpec("x", "select_first", "builtin", (SEED, SOURCE))], SEED, "non_rdf_output"),
        ([TaskSpec("x", "select_first", "builtin", (SEED, SOURCE))], "x.out1", "dangling_ref"),
        ([TaskSpec("x", "select_first", "ftp", (SEED, SOURCE))], "x.out0", "bad_backend"),
        ([TaskSpec("x", "select_first", "command", (SEED, SOURCE))], "x.out0", "bad_backend"),
        ([TaskSpec("x", "select_first", "service", (SEED, SOURCE))], "x.out0", "bad_backend"),
        ([TaskSpec("x", "llm_matcher", "builtin", (SEED, SOURCE))], "x.out0", "no_builtin"),
        (
            [TaskSpec("x", "select_first", "builtin", (SEED, SOURCE)), TaskSpec("x", "select_first", "builtin", (SEED, SEED))],
            "x.out0",
            "duplicate_id",
        ),
        ([TaskSpec("a.b", "select_first", "builtin", (SEED, SOURCE))], "a.b.out0", "bad_id"),
    ],
)
def test_violation_kinds(registry, tasks, output, kind):
    res = validate_pipeline(spec_of(tasks, output), registry)
    assert not res.ok
    assert kind in res.kinds()


def test_service_only_task_validates_on_service_backend(registry):
    tasks = [
        TaskSpec("m", "llm_matcher", "service", (SEED, SOURCE), {"endpoint": "http://127.0.0.1:1/x"}),
        TaskSpec("fuse", "fusion_first", "builtin", (SEED, SOURCE, "m.out0")),
    ]
    assert validate_pipeline(spec_of(tasks), registry).ok


def test_source_format_drives_source_port(registry):
    tasks = [TaskSpec("r", "json_to_rdf", "builtin", (SOURCE,))]
    assert validate_pipeline(spec_of(tasks, "r.out0", DataFormat.JSON), registry).ok
    res = validate_pipeline(spec_of(tasks, "r.out0", DataFormat.TEXT), registry)
    assert [(v.expected, v.actual) for v in res.violations] == [("JSON", "TEXT")]


def test_spec_file_shape():
    data = {
        "name": "n",
        "sourceFormat": "RDF",
        "tasks": [{"id": "a", "task": "select_first", "inputs": ["$seed", "$source"]}],
        "output": "a.out0",
    }
    spec = pipeline_from_dict(data)
    assert spec.tasks[0].backend == "builtin"
    assert pipeline_from_dict(json.loads(json.dumps(spec.to_dict()))) == spec


@pytest.mark.parametrize(
    "bad",
    [
        [],
        {"name": "n", "sourceFormat": "RDF", "tasks": []},
        {"name": "n", "sourceFormat": "XML", "tasks": [], "output": "a.out0"},
        {"name": "n", "sourceFormat": "RDF", "tasks": {}, "output": "a.out0"},
        {"name": "n", "sourceFormat": "RDF", "tasks": [{"id": "a"}], "output": "a.out0"},
        {"name": "n", "sourceFormat": "RDF", "tasks": [{"id": "a", "task": "t", "inputs": "x"}], "output": "a.out0"},
        {"name": "n", "sourceFormat": "RDF", "tasks": [{"id": "a", "task": "t", "config": []}], "output": "a.out0"},
    ],
)
def test_malformed_spec_rejected(bad):
    with pytest.raises(SpecError):
        pipeline_from_dict(bad)


def test_signature_needs_ports():
    with pytest.raises(SpecError):
        TaskSignature("x", (), (DataFormat.RDF,))


# -- builtin execution -------------------------------------------------------------

def test_rdfa_end_to_end(small_bench, registry, schema, tmp_path):
    result, report = execute_pipeline(
        spec_of(RDFA), small_bench / "seed.nt", small_bench / "source1" / "source.nt", tmp_path, registry, schema
    )
    assert result == tmp_path / "fuse.out0.nt"
    assert [r.task_id for r in report.per_task] == ["align", "fuse"]
    assert report.per_task[0].artifact_paths == ["align.out0.json"]
    assert all(r.peak_memory_bytes is None for r in report.per_task)
    assert report.max_peak_memory_bytes is None
    assert report.total_duration_seconds >= 0
    assert report.source_format == "RDF"
    assert len(read_graph(result)) > len(read_graph(small_bench / "seed.nt"))


def test_missing_source_fails_before_tasks(small_bench, registry, schema, tmp_path):
    with pytest.raises(PipelineError, match="does not exist"):
        execute_pipeline(spec_of(RDFA), small_bench / "seed.nt", tmp_path / "absent.nt", tmp_path / "w", registry, schema)
    assert not (tmp_path / "w").exists()


def test_unparseable_source_fails(small_bench, registry, schema, tmp_path):
    bad = tmp_path / "bad.nt"
    bad.write_text("<a> <b> .\n")
    with pytest.raises(PipelineError, match="not valid RDF"):
        execute_pipeline(spec_of(RDFA), small_bench / "seed.nt", bad, tmp_path / "w", registry, schema)


def test_invalid_spec_refused(small_bench, registry, schema, tmp_path):
    spec = spec_of([TaskSpec("x", "select_first", "builtin", (SEED,))], "x.out0")
    with pytest.raises(InvalidPipelineError) as info:
        execute_pipeline(spec, small_bench / "seed.nt", small_bench / "source1" / "source.nt", tmp_path, registry, schema)
    assert info.value.result.kinds() == {"arity"}
    assert not any(tmp_path.iterdir())


def test_failing_task_keeps_earlier_artifacts(small_bench, registry, schema, tmp_path):
    reg = registry.copy()

    def boom(values, cfg, ctx):
        raise RuntimeError("kaput")

    reg.register(TaskSignature("boom", (DataFormat.RDF,), (DataFormat.RDF,)), boom)
    tasks = [TaskSpec("align", "graph_align", "builtin", (SEED, SOURCE)), TaskSpec("b", "boom", "builtin", (SEED,))]
    with pytest.raises(PipelineError) as info:
        execute_pipeline(spec_of(tasks, "b.out0"), small_bench / "seed.nt", small_bench / "source1" / "source.nt",
                         tmp_path, reg, schema)
    assert info.value.task_id == "b"
    assert "kaput" in str(info.value)
    assert (tmp_path / "align.out0.json").is_file()


def test_builtin_wrong_output_type_is_port_error(small_bench, registry, schema, tmp_path):
    reg = registry.copy()
    reg.register(TaskSignature("liar", (DataFormat.RDF,), (DataFormat.RDF,)), lambda v, c, x: ["not a graph"])
    spec = spec_of([TaskSpec("l", "liar", "builtin", (SEED,))], "l.out0")
    with pytest.raises(ValueError, match="not valid RDF"):
        execute_pipeline(spec, small_bench / "seed.nt", small_bench / "source1" / "source.nt", tmp_path, reg, schema)


def test_builtin_determinism(small_bench, registry, schema, tmp_path):
    outs = []
    for k in range(2):
        result, _ = execute_pipeline(spec_of(RDFA), small_bench / "seed.nt", small_bench / "source1" / "source.nt",
                                     tmp_path / str(k), registry, schema)
        outs.append({p.name: p.read_bytes() for p in result.parent.iterdir()})
    assert outs[0] == outs[1]


def test_increment_must_be_positive(small_bench, registry, schema, tmp_path):
    with pytest.raises(PipelineError):
        execute_pipeline(spec_of(RDFA), small_bench / "seed.nt", small_bench / "source1" / "source.nt",
                         tmp_path, registry, schema, increment=0)


def test_incremental_threading(small_bench, registry, tmp_path):
    layout = load_layout("ssp_rdf_a.json")
    results = run_increments(layout, small_bench, 2, tmp_path, registry)
    assert [r.increment for _, r in results] == [1, 2]
    g1, g2 = read_graph(results[0][0]), read_graph(results[1][0])
    assert g1.triple_set <= g2.triple_set
    rep = RunReport.from_json((tmp_path / "run_2.report.json").read_text())
    assert rep.pipeline == "SSP_RDFa"
    assert RunReport.from_json(rep.to_json()).to_json() == rep.to_json()


def test_run_increments_rejects_zero(small_bench, registry, tmp_path):
    with pytest.raises(ValueError):
        run_increments(load_layout("ssp_rdf_a.json"), small_bench, 0, tmp_path, registry)


# -- config precedence ------------------------------------------------------------------

def test_config_precedence(registry):
    task = TaskSpec("align", "graph_align", "builtin", (SEED, SOURCE), {"entityThreshold": 0.9, "maxIterations": 3})
    assert merged_config(task, registry)["relationThreshold"] == 0.5
    assert merged_config(task, registry)["entityThreshold"] == 0.9
    cfg = merged_config(task, registry, {"align": {"entityThreshold": 0.8}, "other": {"maxIterations": 1}})
    assert (cfg["entityThreshold"], cfg["maxIterations"]) == (0.8, 3)


# -- command backend ----------------------------------------------------------------------

COPY_SCRIPT = """
import json, sys
args = sys.argv[1:]
flags = [a for a in args if a.startswith('--')]
paths = [a for a in args if not a.startswith('--')]
open(paths[-1], 'w').write(open(paths[0]).read())
open(paths[-1] + '.argv', 'w').write(json.dumps(args))
buf = bytearray(64 * 1024 * 1024)
sys.stderr.write('done')
"""


@pytest.fixture
def script(tmp_path):
    p = tmp_path / "copy.py"
    p.write_text(COPY_SCRIPT)
    return p


def test_command_backend(small_bench, registry, schema, tmp_path, script):
    cfg = {"command": [sys.executable, str(script)], "flag": True, "alpha": 2, "timeout": 30}
    spec = spec_of([TaskSpec("c", "select_first", "command", (SEED, SOURCE), cfg)], "c.out0")
    work = tmp_path / "w"
    result, report = execute_pipeline(spec, small_bench / "seed.nt", small_bench / "source1" / "source.nt",
                                      work, registry, schema)
    assert result.read_bytes() == (small_bench / "seed.nt").read_bytes()
    argv = json.loads((work / "c.out0.nt.argv").read_text())
    assert argv == [
        str(small_bench / "seed.nt"), str(small_bench / "source1" / "source.nt"), str(work / "c.out0.nt"),
        "--alpha=2", "--flag=true",
    ]
    rec = report.per_task[0]
    assert rec.peak_memory_bytes >= 64 * 1024 * 1024
    assert report.max_peak_memory_bytes == rec.peak_memory_bytes
    assert (work / rec.stderr_path).read_text() == "done"


def test_command_failure_reports_stderr(small_bench, registry, schema, tmp_path):
    cmd = [sys.executable, "-c", "import sys; sys.stderr.write('bad input'); sys.exit(3)"]
    spec = spec_of([TaskSpec("c", "select_first", "command", (SEED, SOURCE), {"command": cmd})], "c.out0")
    with pytest.raises(PipelineError) as info:
        execute_pipeline(spec, small_bench / "seed.nt", small_bench / "source1" / "source.nt", tmp_path, registry, schema)
    assert info.value.task_id == "c"
    assert "status 3" in str(info.value) and "bad input" in info.value.diagnostics


@pytest.mark.parametrize(
    "code, message",
    [
        ("pass", "did not write output"),
        ("open(__import__('sys').argv[-1], 'w').write('junk')", "not valid RDF"),
        ("import time; time.sleep(5)", "timed out"),
    ],
)
def test_command_output_problems(small_bench, registry, schema, tmp_path, code, message):
    cfg = {"command": [sys.executable, "-c", code], "timeout": 0.5}
    spec = spec_of([TaskSpec("c", "select_first", "command", (SEED, SOURCE), cfg)], "c.out0")
    with pytest.raises(PipelineError, match=message):
        execute_pipeline(spec, small_bench / "seed.nt", small_bench / "source1" / "source.nt", tmp_path, registry, schema)


# -- service backend -----------------------------------------------------------------------

class _Handler(BaseHTTPRequestHandler):
    requests: list = []

    def log_message(self, *args):
        pass

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).requests.append(body)
        mode = self.path.strip("/")
        if mode == "fail":
            return self._send(500, b"internal trouble")
        if mode == "slow":
            time.sleep(2)
        if mode == "badscore":
            content = json.dumps([{"id1": "a", "id2": "b", "type": "entity", "score": 1.5}])
            out = [{"name": "out0", "format": "JSON_ER", "content": content}]
        elif mode == "wrongformat":
            out = [{"name": "out0", "format": "CSV", "content": body["inputs"][0]["content"]}]
        elif mode == "twice":
            out = [{"name": "out0", "format": "RDF", "content": ""}] * 2
        elif mode == "garbage":
            return self._send(200, b"not json")
        else:
            out = [{"name": "out0", "format": "RDF", "content": body["inputs"][0]["content"]}]
        self._send(200, json.dumps({"outputs": out}).encode())

    def _send(self, status, payload):
        self.send_response(status)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)


@pytest.fixture(scope="module")
def service():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def _service_spec(endpoint, task="select_first", **cfg):
    return spec_of([TaskSpec("s", task, "service", (SEED, SOURCE), {"endpoint": endpoint, **cfg})], "s.out0")


def test_echo_service(small_bench, registry, schema, tmp_path, service):
    _Handler.requests.clear()
    spec = _service_spec(service + "/echo", mode="x")
    result, report = execute_pipeline(spec, small_bench / "seed.nt", small_bench / "source1" / "source.nt",
                                      tmp_path, registry, schema)
    assert result.read_bytes() == (small_bench / "seed.nt").read_bytes()
    [req] = _Handler.requests
    assert req["task"] == "select_first" and req["config"] == {"mode": "x"}
    assert [(i["name"], i["format"]) for i in req["inputs"]] == [("in0", "RDF"), ("in1", "RDF")]
    assert report.per_task[0].peak_memory_bytes is None


def test_service_500_names_task_and_body(small_bench, registry, schema, tmp_path, service):
    with pytest.raises(PipelineError) as info:
        execute_pipeline(_service_spec(service + "/fail"), small_bench / "seed.nt",
                         small_bench / "source1" / "source.nt", tmp_path, registry, schema)
    assert info.value.task_id == "s"
    assert "500" in str(info.value) and "internal trouble" in str(info.value)


@pytest.mark.parametrize(
    "mode, formats, message",
    [
        ("badscore", ["JSON_ER"], "score"),
        ("wrongformat", ["RDF"], "expected RDF"),
        ("twice", ["RDF"], "2 outputs"),
        ("garbage", ["RDF"], "malformed"),
    ],
)
def test_service_response_validation(service, mode, formats, message):
    with pytest.raises(ServiceError, match=message):
        invoke_service_task(f"{service}/{mode}", "t", [{"name": "in0", "format": "RDF", "content": ""}], {}, formats)


def test_service_timeout(service):
    with pytest.raises(ServiceError, match="timed out"):
        invoke_service_task(service + "/slow", "t", [{"name": "in0", "format": "RDF", "content": ""}], {}, ["RDF"], 0.3)


def test_service_unreachable():
    with pytest.raises(ServiceError):
        invoke_service_task("http://127.0.0.1:9/x", "t", [], {}, ["RDF"], 2)


# -- validation soundness / completeness --------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_random_valid_pipelines_run(small_bench, registry, schema, tmp_path, seed):
    rng = random.Random(seed)
    ok = 0
    for n in range(20):
        spec = random_pipeline(rng, registry)
        assert validate_pipeline(spec, registry).ok, spec
        ok += run_checked(spec, small_bench, tmp_path / f"{n}", registry, schema)
    assert ok >= 15


def test_mutants_are_rejected(registry):
    rng = random.Random(11)
    seen = set()
    n = 0
    while n < 300:
        out = mutate(random_pipeline(rng, registry), registry, rng)
        if out is None:
            continue
        mutant, fault = out
        assert not validate_pipeline(mutant, registry).ok, (fault, mutant)
        seen.add(fault)
        n += 1
    assert len(seen) == 7


def test_mutant_rejected_before_execution(small_bench, registry, schema, tmp_path):
    good = spec_of(RDFA)
    bad = replace(good, tasks=(RDFA[0], replace(RDFA[1], inputs=(SEED, SOURCE, SEED))))
    with pytest.raises(InvalidPipelineError):
        execute_pipeline(bad, small_bench / "seed.nt", small_bench / "source1" / "source.nt", tmp_path, registry, schema)
    assert not any(tmp_path.iterdir())
