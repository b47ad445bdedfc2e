"""Binary perceptron instances, the multiscale majority algorithm and solution-space paths."""

from .errors import PerceptronError
from .model import Instance, ModelKind, is_margin_solution, is_solution, margin_report, row_sums, sgn
from .generate import GenConfig, sample_instance
from .schedule import Schedule, build_schedule, custom_schedule, psi, solve_linear_cluster_d
from .solver import Policy, SolveOutcome, complete, init_round0, solve, step_round

__all__ = [
    "PerceptronError",
    "Instance",
    "ModelKind",
    "is_solution",
    "is_margin_solution",
    "margin_report",
    "row_sums",
    "sgn",
    "GenConfig",
    "sample_instance",
    "Schedule",
    "build_schedule",
    "custom_schedule",
    "psi",
    "solve_linear_cluster_d",
    "Policy",
    "SolveOutcome",
    "solve",
    "init_round0",
    "step_round",
    "complete",
]
