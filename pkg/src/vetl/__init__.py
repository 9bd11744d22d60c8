"""Trace-driven control plane for video ETL: offline categorization and forecasting, online knob planning and switching."""

from .core import (
    ConfigError,
    ContentCategorySet,
    InfeasiblePlanError,
    KnobConfiguration,
    Placement,
    PlanningHorizon,
    ProvisioningError,
    ResourceProvision,
    TaskGraph,
    load_config,
)
from .engine import MetricsReport, RunOptions, run_ablation, run_ingestion, run_optimum_baseline, run_static_baseline
from .modelfile import FittedModel, load_model, save_model
from .offline import fit
from .planner import KnobPlan, compute_budget, solve_knob_plan, solve_multi_stream_plan
from .workload import Trace, WorkloadModel, generate_trace, load_trace, save_trace

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContentCategorySet",
    "FittedModel",
    "InfeasiblePlanError",
    "KnobConfiguration",
    "KnobPlan",
    "MetricsReport",
    "Placement",
    "PlanningHorizon",
    "ProvisioningError",
    "ResourceProvision",
    "RunOptions",
    "TaskGraph",
    "Trace",
    "WorkloadModel",
    "compute_budget",
    "fit",
    "generate_trace",
    "load_config",
    "load_model",
    "load_trace",
    "run_ablation",
    "run_ingestion",
    "run_optimum_baseline",
    "run_static_baseline",
    "save_model",
    "save_trace",
    "solve_knob_plan",
    "solve_multi_stream_plan",
]
