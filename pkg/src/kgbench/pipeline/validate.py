"""Static pipeline validation against registry signatures."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exchange import DataFormat
from .spec import BACKENDS, SEED, SOURCE, PipelineSpec, Registry, parse_port


@dataclass(frozen=True)
class Violation:
    kind: str  # unknown_task | dangling_ref | forward_ref | format_mismatch | arity | non_rdf_output | ...
    task_id: str
    port: str
    expected: str = ""
    actual: str = ""
    message: str = ""

    def __str__(self) -> str:
        return f"[{self.kind}] task {self.task_id or '-'} port {self.port or '-'}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "taskId": self.task_id,
            "port": self.port,
            "expected": self.expected,
            "actual": self.actual,
            "message": self.message,
        }


@dataclass
class ValidationResult:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


def validate_pipeline(spec: PipelineSpec, registry: Registry) -> ValidationResult:
    """Check every port reference resolves to an earlier output of the right format."""
    out: list[Violation] = []
    available: dict[str, DataFormat] = {SEED: DataFormat.RDF, SOURCE: spec.source_format}
    all_ids = [t.id for t in spec.tasks]
    seen: set = set()

    for position, task in enumerate(spec.tasks):
        if task.id in seen:
            out.append(Violation("duplicate_id", task.id, "", message=f"task id {task.id!r} used twice"))
        if task.id.startswith("$") or "." in task.id:
            out.append(Violation("bad_id", task.id, "", message="task ids may not start with '$' or contain '.'"))
        seen.add(task.id)
        if task.backend not in BACKENDS:
            out.append(Violation("bad_backend", task.id, "", message=f"unknown backend {task.backend!r}"))
        if task.task not in registry:
            out.append(Violation("unknown_task", task.id, "", message=f"unknown task {task.task!r}"))
            continue
        sig = registry.signature(task.task)
        if task.backend == "builtin" and not registry.has_builtin(task.task):
            out.append(Violation("no_builtin", task.id, "", message=f"task {task.task!r} has no builtin implementation"))
        if task.backend == "command" and not task.config.get("command"):
            out.append(Violation("bad_backend", task.id, "", message="command backend needs config.command"))
        if task.backend == "service" and not task.config.get("endpoint"):
            out.append(Violation("bad_backend", task.id, "", message="service backend needs config.endpoint"))
        if len(task.inputs) != len(sig.inputs):
            out.append(
                Violation(
                    "arity", task.id, "", str(len(sig.inputs)), str(len(task.inputs)),
                    f"expected {len(sig.inputs)} inputs, got {len(task.inputs)}",
                )
            )
        for k, (ref, expected) in enumerate(zip(task.inputs, sig.inputs)):
            port = f"in{k}"
            if ref in available:
                actual = available[ref]
                if actual != expected:
                    out.append(
                        Violation(
                            "format_mismatch", task.id, port, expected.value, actual.value,
                            f"expected {expected.value}, got {actual.value} from {ref}",
                        )
                    )
                continue
            parsed = parse_port(ref)
            if parsed is not None and parsed[0] in all_ids[position:]:
                out.append(Violation("forward_ref", task.id, port, message=f"{ref} refers to a task at or after this one"))
            else:
                out.append(Violation("dangling_ref", task.id, port, message=f"{ref} does not resolve"))
        for k, fmt in enumerate(sig.outputs):
            available[f"{task.id}.out{k}"] = fmt

    if spec.output not in available:
        parsed = parse_port(spec.output)
        kind = "dangling_ref"
        out.append(Violation(kind, "", "output", DataFormat.RDF.value, "", f"output {spec.output} does not resolve"))
    elif available[spec.output] != DataFormat.RDF or spec.output in (SEED, SOURCE):
        actual = available[spec.output]
        if spec.output in (SEED, SOURCE) and actual == DataFormat.RDF:
            out.append(Violation("non_rdf_output", "", "output", "RDF", "RDF", "output must be produced by a task"))
        else:
            out.append(
                Violation("non_rdf_output", "", "output", "RDF", actual.value, f"final output must be RDF, got {actual.value}")
            )
    return ValidationResult(out)
