"""Typed task registry, pipeline validation and execution."""

from .artifacts import PortFormatError, decode, encode, read_artifact, split_documents
from .engine import (
    InvalidPipelineError,
    PipelineError,
    RunReport,
    ServiceError,
    TaskContext,
    TaskRecord,
    execute_pipeline,
    invoke_service_task,
    merged_config,
)
from .spec import (
    SEED,
    SOURCE,
    PipelineSpec,
    Registry,
    SpecError,
    TaskSignature,
    TaskSpec,
    load_pipeline,
    parse_port,
    pipeline_from_dict,
)
from .validate import ValidationResult, Violation, validate_pipeline

__all__ = [
    "SEED",
    "SOURCE",
    "InvalidPipelineError",
    "PipelineError",
    "PipelineSpec",
    "PortFormatError",
    "Registry",
    "RunReport",
    "ServiceError",
    "SpecError",
    "TaskContext",
    "TaskRecord",
    "TaskSignature",
    "TaskSpec",
    "ValidationResult",
    "Violation",
    "decode",
    "encode",
    "execute_pipeline",
    "invoke_service_task",
    "load_pipeline",
    "merged_config",
    "parse_port",
    "pipeline_from_dict",
    "read_artifact",
    "split_documents",
    "validate_pipeline",
]
