"""Sequential, file-staged pipeline execution over three backends."""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..exchange import DataFormat, dump_json
from .artifacts import PortFormatError, decode, encode, read_artifact, write_artifact
from .spec import RESERVED_CONFIG, SEED, SOURCE, PipelineSpec, Registry, TaskSpec, parse_port
from .validate import ValidationResult, validate_pipeline

DEFAULT_SERVICE_TIMEOUT = 300.0
DEFAULT_COMMAND_TIMEOUT = 3600.0


class PipelineError(RuntimeError):
    """A task failed; artifacts written before the failure stay on disk."""

    def __init__(self, task_id: str, message: str, diagnostics: str = ""):
        text = f"task {task_id}: {message}" if task_id else message
        if diagnostics:
            text += f"\n{diagnostics}"
        super().__init__(text)
        self.task_id = task_id
        self.diagnostics = diagnostics


class InvalidPipelineError(PipelineError):
    def __init__(self, result: ValidationResult):
        lines = "\n".join(str(v) for v in result.violations)
        super().__init__("", "pipeline failed validation", lines)
        self.result = result


class ServiceError(RuntimeError):
    pass


@dataclass
class TaskContext:
    """What a builtin task may see besides its inputs."""

    task_id: str
    schema: Any = None
    warnings: list = field(default_factory=list)

    def warn(self, message: str) -> None:
        self.warnings.append(f"{self.task_id}: {message}")


@dataclass
class TaskRecord:
    task_id: str
    task: str
    backend: str
    duration_seconds: float
    artifact_paths: list
    peak_memory_bytes: Optional[int] = None
    stderr_path: Optional[str] = None

    def to_dict(self) -> dict:
        out = {
            "taskId": self.task_id,
            "task": self.task,
            "backend": self.backend,
            "durationSeconds": self.duration_seconds,
            "peakMemoryBytes": self.peak_memory_bytes,
            "artifactPaths": list(self.artifact_paths),
        }
        if self.stderr_path:
            out["stderrPath"] = self.stderr_path
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "TaskRecord":
        return cls(
            d["taskId"], d.get("task", ""), d.get("backend", "builtin"), float(d["durationSeconds"]),
            list(d.get("artifactPaths", [])), d.get("peakMemoryBytes"), d.get("stderrPath"),
        )


@dataclass
class RunReport:
    pipeline: str
    increment: int
    per_task: list = field(default_factory=list)
    result_path: str = ""
    warnings: list = field(default_factory=list)
    annotated_cost: Optional[str] = None
    source_format: Optional[str] = None

    @property
    def total_duration_seconds(self) -> float:
        return sum(t.duration_seconds for t in self.per_task)

    @property
    def max_peak_memory_bytes(self) -> Optional[int]:
        peaks = [t.peak_memory_bytes for t in self.per_task if t.peak_memory_bytes is not None]
        return max(peaks) if peaks else None

    def to_dict(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "increment": self.increment,
            "sourceFormat": self.source_format,
            "resultPath": self.result_path,
            "perTask": [t.to_dict() for t in self.per_task],
            "totalDurationSeconds": self.total_duration_seconds,
            "maxPeakMemoryBytes": self.max_peak_memory_bytes,
            "annotatedCost": self.annotated_cost,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        inc = int(d["increment"])
        if inc < 1:
            raise ValueError("increment must be >= 1")
        return cls(
            d["pipeline"], inc, [TaskRecord.from_dict(t) for t in d.get("perTask", [])],
            d.get("resultPath", ""), list(d.get("warnings", [])), d.get("annotatedCost"),
            d.get("sourceFormat"),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def merged_config(task: TaskSpec, registry: Registry, overrides: Optional[dict] = None) -> dict:
    """Registry default < spec file < explicit override."""
    cfg = registry.signature(task.task).defaults()
    cfg.update(task.config)
    if overrides:
        cfg.update(overrides.get(task.id, {}))
    return cfg


def _task_config(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if k not in RESERVED_CONFIG}


# -- service backend -----------------------------------------------------------

def invoke_service_task(endpoint: str, task_name: str, inputs: list, config: dict,
                        output_formats, timeout: float = DEFAULT_SERVICE_TIMEOUT) -> list[str]:
    """POST the request envelope and return the validated output contents."""
    body = json.dumps({"task": task_name, "config": config, "inputs": inputs}).encode("utf-8")
    req = urllib.request.Request(endpoint, data=body, method="POST", headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            status = resp.status
            payload = resp.read().decode("utf-8", errors="replace")
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode("utf-8", errors="replace")
        raise ServiceError(f"service returned status {exc.code}: {detail}") from None
    except (TimeoutError, OSError) as exc:
        reason = getattr(exc, "reason", exc)
        if isinstance(reason, TimeoutError) or "timed out" in str(reason):
            raise ServiceError(f"service timed out after {timeout} s") from None
        raise ServiceError(f"service unreachable: {reason}") from None
    if status != 200:
        raise ServiceError(f"service returned status {status}: {payload}")
    try:
        outputs = json.loads(payload)["outputs"]
    except (json.JSONDecodeError, KeyError, TypeError):
        raise ServiceError(f"malformed service response: {payload[:500]}") from None
    formats = [DataFormat(f) for f in output_formats]
    if not isinstance(outputs, list) or len(outputs) != len(formats):
        raise ServiceError(f"service returned {len(outputs) if isinstance(outputs, list) else '?'} outputs, expected {len(formats)}")
    contents = []
    for k, (item, fmt) in enumerate(zip(outputs, formats)):
        if not isinstance(item, dict) or not isinstance(item.get("content"), str):
            raise ServiceError(f"output {k} lacks string content")
        if item.get("format") != fmt.value:
            raise ServiceError(f"output {k} has format {item.get('format')!r}, expected {fmt.value}")
        try:
            decode(fmt, item["content"], f"service output {k}")
        except PortFormatError as exc:
            raise ServiceError(str(exc)) from None
        contents.append(item["content"])
    return contents


# -- command backend -----------------------------------------------------------

def _command_argv(command, in_paths, out_paths, cfg: dict) -> list[str]:
    argv = shlex.split(command) if isinstance(command, str) else [str(c) for c in command]
    argv += [str(p) for p in in_paths] + [str(p) for p in out_paths]
    for k in sorted(cfg):
        v = cfg[k]
        if isinstance(v, bool):
            v = "true" if v else "false"
        argv.append(f"--{k}={v}")
    return argv


def run_command(argv: list[str], stderr_path: Path, timeout: float) -> tuple[int, int]:
    """Run a child process; return (exit code, peak RSS in bytes)."""
    with open(stderr_path, "wb") as err:
        proc = subprocess.Popen(argv, stdin=subprocess.DEVNULL, stdout=subprocess.DEVNULL, stderr=err)
        deadline = time.monotonic() + timeout
        delay = 0.001
        while True:
            pid, status, usage = os.wait4(proc.pid, os.WNOHANG)
            if pid:
                break
            if time.monotonic() > deadline:
                proc.kill()
                os.wait4(proc.pid, 0)
                proc.returncode = -9
                raise TimeoutError(f"command timed out after {timeout} s")
            time.sleep(delay)
            delay = min(delay * 2, 0.02)
    code = os.waitstatus_to_exitcode(status)
    proc.returncode = code
    return code, int(usage.ru_maxrss) * 1024  # Linux reports kilobytes


# -- executor --------------------------------------------------------------------

def execute_pipeline(spec: PipelineSpec, seed_path, source_path, workdir, registry: Registry,
                     schema=None, increment: int = 1,
                     overrides: Optional[dict] = None) -> tuple[Path, RunReport]:
    result = validate_pipeline(spec, registry)
    if not result.ok:
        raise InvalidPipelineError(result)
    if increment < 1:
        raise PipelineError("", "increment must be >= 1")
    seed_path, source_path = Path(seed_path), Path(source_path)
    for label, path in (("seed", seed_path), ("source", source_path)):
        if not path.is_file():
            raise PipelineError("", f"{label} file {path} does not exist")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    paths: dict[str, Path] = {SEED: seed_path, SOURCE: source_path}
    formats: dict[str, DataFormat] = {SEED: DataFormat.RDF, SOURCE: spec.source_format}
    cache: dict[str, Any] = {}
    try:
        cache[SEED] = read_artifact(DataFormat.RDF, seed_path)
        cache[SOURCE] = read_artifact(spec.source_format, source_path)
    except PortFormatError as exc:
        raise PipelineError("", str(exc)) from None

    report = RunReport(spec.name, increment, source_format=spec.source_format.value)

    def rel(p: Path) -> str:
        try:
            return str(p.relative_to(workdir))
        except ValueError:
            return str(p)

    for task in spec.tasks:
        sig = registry.signature(task.task)
        cfg = merged_config(task, registry, overrides)
        out_paths = [workdir / f"{task.id}.out{k}{fmt.extension}" for k, fmt in enumerate(sig.outputs)]
        in_paths = [paths[r] for r in task.inputs]
        peak = None
        stderr_rel = None
        started = time.perf_counter()
        if task.backend == "builtin":
            ctx = TaskContext(task.id, schema)
            values = []
            for ref, fmt in zip(task.inputs, sig.inputs):
                if ref not in cache:
                    cache[ref] = read_artifact(fmt, paths[ref])
                values.append(cache[ref])
            try:
                produced = registry.implementation(task.task)(values, _task_config(cfg), ctx)
            except PortFormatError:
                raise
            except Exception as exc:  # task code failure is reported, not re-raised raw
                raise PipelineError(task.id, f"{type(exc).__name__}: {exc}") from exc
            if not isinstance(produced, (list, tuple)) or len(produced) != len(sig.outputs):
                raise PipelineError(task.id, f"produced {len(produced) if isinstance(produced, (list, tuple)) else 1} outputs, expected {len(sig.outputs)}")
            for k, (value, fmt, path) in enumerate(zip(produced, sig.outputs, out_paths)):
                write_artifact(path, encode(fmt, value, f"{task.id}.out{k}"))
                cache[f"{task.id}.out{k}"] = value
            report.warnings.extend(ctx.warnings)
        elif task.backend == "command":
            stderr_path = workdir / f"{task.id}.stderr.txt"
            stderr_rel = rel(stderr_path)
            argv = _command_argv(cfg["command"], in_paths, out_paths, _task_config(cfg))
            timeout = float(cfg.get("timeout") or DEFAULT_COMMAND_TIMEOUT)
            try:
                code, peak = run_command(argv, stderr_path, timeout)
            except (OSError, TimeoutError) as exc:
                raise PipelineError(task.id, str(exc)) from None
            if code != 0:
                diag = stderr_path.read_text(encoding="utf-8", errors="replace")
                raise PipelineError(task.id, f"command exited with status {code}", diag)
            for k, (fmt, path) in enumerate(zip(sig.outputs, out_paths)):
                if not path.is_file():
                    raise PipelineError(task.id, f"command did not write output {path.name}")
                try:
                    cache[f"{task.id}.out{k}"] = read_artifact(fmt, path)
                except PortFormatError as exc:
                    raise PipelineError(task.id, str(exc)) from None
        else:
            envelope = [
                {"name": f"in{k}", "format": fmt.value, "content": p.read_text(encoding="utf-8")}
                for k, (fmt, p) in enumerate(zip(sig.inputs, in_paths))
            ]
            timeout = float(cfg.get("timeout") or DEFAULT_SERVICE_TIMEOUT)
            try:
                contents = invoke_service_task(
                    cfg["endpoint"], task.task, envelope, _task_config(cfg), sig.outputs, timeout
                )
            except ServiceError as exc:
                raise PipelineError(task.id, str(exc)) from None
            for k, (text, fmt, path) in enumerate(zip(contents, sig.outputs, out_paths)):
                write_artifact(path, text)
                cache[f"{task.id}.out{k}"] = decode(fmt, text, str(path))
        duration = time.perf_counter() - started
        for k, (fmt, path) in enumerate(zip(sig.outputs, out_paths)):
            paths[f"{task.id}.out{k}"] = path
            formats[f"{task.id}.out{k}"] = fmt
        report.per_task.append(
            TaskRecord(task.id, task.task, task.backend, duration, [rel(p) for p in out_paths], peak, stderr_rel)
        )

    result_path = paths[spec.output]
    report.result_path = rel(result_path)
    return result_path, report


def output_task(spec: PipelineSpec) -> Optional[str]:
    parsed = parse_port(spec.output)
    return parsed[0] if parsed else None
