"""Oscillatory binding-and-mapping simulator for affordance inference tasks."""

from .analysis import (
    JudgeThresholds,
    MatrixReport,
    Verdict,
    judge_inference,
    run_matrix,
    run_task,
    synchrony_index,
    time_to_criterion,
)
from .backend import HAVE_COMPILED, available_backends, default_backend
from .dynamics import Schedule, SimParams, TraceSet, inhibitor_step, leaky_integrate, make_schedule, run
from .mapping import MappingTable, accumulate_hypotheses, commit_mapping, mapping_input
from .model import (
    ArchConfig,
    Network,
    TaskSpec,
    TaskSpecError,
    build_network,
    flatten_relations,
    flatten_task,
    parse_task_spec,
    validate,
)
from .tasks import MatrixCell, builtin_task, matrix_cells

__version__ = "0.1.0"

__all__ = [
    "ArchConfig",
    "HAVE_COMPILED",
    "JudgeThresholds",
    "MappingTable",
    "MatrixCell",
    "MatrixReport",
    "Network",
    "Schedule",
    "SimParams",
    "TaskSpec",
    "TaskSpecError",
    "TraceSet",
    "Verdict",
    "accumulate_hypotheses",
    "available_backends",
    "build_network",
    "builtin_task",
    "commit_mapping",
    "default_backend",
    "flatten_relations",
    "flatten_task",
    "inhibitor_step",
    "judge_inference",
    "leaky_integrate",
    "make_schedule",
    "mapping_input",
    "matrix_cells",
    "parse_task_spec",
    "run",
    "run_matrix",
    "run_task",
    "synchrony_index",
    "time_to_criterion",
    "validate",
]
