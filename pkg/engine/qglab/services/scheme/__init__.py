"""The inductive convex-integration stage q → q+1 and its parameter schedule."""
from .parameters import (
    InequalityCheck,
    InequalityReport,
    ManualSchedule,
    ParameterSchedule,
    Schedule,
    StageParameters,
    check_inequalities,
    make_schedule,
    wall_scale,
)
from .timing import EnergyProfile, TimePartition, chi, make_partition, normalize_base_energy
from .state import IterationState, StateSlice, check_slice, zero_slice
from .context import StageContext, prepare_stage
from .amplitudes import AmplitudeSet, amplitude_squares, make_amplitudes
from .perturbation import Perturbation, build_perturbation, expected_energy
from .residual import Residual, StressExtraction, assemble_residual, extract_stress
from .stage import StageResult, StageSample, StageTolerances, euler2d_stage, run_stage, select_check_times

__all__ = [
    "InequalityCheck",
    "InequalityReport",
    "ManualSchedule",
    "ParameterSchedule",
    "Schedule",
    "StageParameters",
    "check_inequalities",
    "make_schedule",
    "wall_scale",
    "EnergyProfile",
    "TimePartition",
    "chi",
    "make_partition",
    "normalize_base_energy",
    "IterationState",
    "StateSlice",
    "check_slice",
    "zero_slice",
    "StageContext",
    "prepare_stage",
    "AmplitudeSet",
    "amplitude_squares",
    "make_amplitudes",
    "Perturbation",
    "build_perturbation",
    "expected_energy",
    "Residual",
    "StressExtraction",
    "assemble_residual",
    "extract_stress",
    "StageResult",
    "StageSample",
    "StageTolerances",
    "euler2d_stage",
    "run_stage",
    "select_check_times",
]
