"""Pydantic models for run configs, certificates and reports."""
from .config import (
    EnergyProfileConfig,
    GridConfig,
    ManualParameters,
    RunConfig,
    ScheduleConfig,
    Tolerances,
    parse_config,
    validate_config,
)
from .certificates import Certificate, CheckOut
from .report import InvariantVerdict, RunReport, StageSummary

__all__ = [
    "EnergyProfileConfig",
    "GridConfig",
    "ManualParameters",
    "RunConfig",
    "ScheduleConfig",
    "Tolerances",
    "parse_config",
    "validate_config",
    "Certificate",
    "CheckOut",
    "InvariantVerdict",
    "RunReport",
    "StageSummary",
]
