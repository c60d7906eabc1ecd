"""Task signatures, the task registry, and declarative pipeline specs."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from ..exchange import DataFormat

SEED = "$seed"
SOURCE = "$source"
BACKENDS = ("builtin", "command", "service")
# Config keys consumed by the backends themselves and never forwarded to tasks.
RESERVED_CONFIG = {"command": "command", "endpoint": "service", "timeout": None}

_PORT = re.compile(r"^(?P<task>[^.\s]+)\.out(?P<k>\d+)$")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class TaskSignature:
    name: str
    inputs: tuple
    outputs: tuple
    config_schema: dict = field(default_factory=dict)  # key -> {"type": ..., "default": ...}
    description: str = ""

    def __post_init__(self):
        if not self.inputs or not self.outputs:
            raise SpecError(f"task {self.name} needs at least one input and one output")
        object.__setattr__(self, "inputs", tuple(DataFormat(f) for f in self.inputs))
        object.__setattr__(self, "outputs", tuple(DataFormat(f) for f in self.outputs))

    def defaults(self) -> dict:
        return {k: v.get("default") for k, v in self.config_schema.items()}


TaskFn = Callable[[list, dict, Any], list]


class Registry:
    """Task name -> signature (+ optional in-process implementation)."""

    def __init__(self):
        self._signatures: dict[str, TaskSignature] = {}
        self._impls: dict[str, TaskFn] = {}

    def register(self, signature: TaskSignature, impl: Optional[TaskFn] = None) -> None:
        if signature.name in self._signatures:
            raise SpecError(f"task {signature.name!r} already registered")
        self._signatures[signature.name] = signature
        if impl is not None:
            self._impls[signature.name] = impl

    def copy(self) -> "Registry":
        out = Registry()
        out._signatures = dict(self._signatures)
        out._impls = dict(self._impls)
        return out

    def __contains__(self, name: str) -> bool:
        return name in self._signatures

    def __iter__(self):
        return iter(sorted(self._signatures))

    def signature(self, name: str) -> TaskSignature:
        try:
            return self._signatures[name]
        except KeyError:
            raise SpecError(f"unknown task {name!r}") from None

    def implementation(self, name: str) -> Optional[TaskFn]:
        return self._impls.get(name)

    def has_builtin(self, name: str) -> bool:
        return name in self._impls


@dataclass(frozen=True)
class TaskSpec:
    id: str
    task: str
    backend: str = "builtin"
    inputs: tuple = ()
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "task": self.task,
            "backend": self.backend,
            "config": dict(self.config),
            "inputs": list(self.inputs),
        }


@dataclass(frozen=True)
class PipelineSpec:
    name: str
    source_format: DataFormat
    tasks: tuple
    output: str
    description: str = ""

    def task(self, task_id: str) -> Optional[TaskSpec]:
        for t in self.tasks:
            if t.id == task_id:
                return t
        return None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "sourceFormat": self.source_format.value,
            "tasks": [t.to_dict() for t in self.tasks],
            "output": self.output,
        }
        if self.description:
            out["description"] = self.description
        return out


def parse_port(ref: str) -> Optional[tuple[str, int]]:
    """Split ``"<taskId>.out<k>"`` into (taskId, k); ``None`` for reserved or malformed refs."""
    m = _PORT.match(ref)
    if m is None:
        return None
    return m.group("task"), int(m.group("k"))


def pipeline_from_dict(data: Any) -> PipelineSpec:
    if not isinstance(data, dict):
        raise SpecError("pipeline spec must be a JSON object")
    for key in ("name", "sourceFormat", "tasks", "output"):
        if key not in data:
            raise SpecError(f"pipeline spec missing {key!r}")
    try:
        fmt = DataFormat(data["sourceFormat"])
    except ValueError:
        raise SpecError(f"unknown sourceFormat {data['sourceFormat']!r}") from None
    if not isinstance(data["tasks"], list):
        raise SpecError("tasks must be an array")
    tasks = []
    for i, t in enumerate(data["tasks"]):
        if not isinstance(t, dict) or "id" not in t or "task" not in t:
            raise SpecError(f"task #{i} needs 'id' and 'task'")
        inputs = t.get("inputs", [])
        if not isinstance(inputs, list) or not all(isinstance(r, str) for r in inputs):
            raise SpecError(f"task {t['id']!r}: inputs must be a list of port references")
        config = t.get("config", {})
        if not isinstance(config, dict):
            raise SpecError(f"task {t['id']!r}: config must be an object")
        tasks.append(TaskSpec(str(t["id"]), str(t["task"]), str(t.get("backend", "builtin")), tuple(inputs), config))
    return PipelineSpec(str(data["name"]), fmt, tuple(tasks), str(data["output"]), str(data.get("description", "")))


def load_pipeline(path) -> PipelineSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON: {exc}") from None
    return pipeline_from_dict(data)
