"""Run reports: per-stage summaries and the invariant ledger."""
from typing import Optional

from pydantic import BaseModel, Field

from .certificates import CheckOut


class InvariantVerdict(CheckOut):
    stage: Optional[int] = None


class StageSummary(BaseModel):
    q: int
    mode: str
    lam: int
    lam_next: int
    delta_next: float
    delta_after: float
    mu: float
    ell: float
    energy_scale: float
    zero_perturbation: bool
    check_times: list[float]
    stress_c0: float
    stress_c1: float
    stress_ratio: float  # ‖M̊_{q+1}‖_C⁰ / (ηδ_{q+2})
    error_norms: dict[str, float] = Field(default_factory=dict)
    estimates: dict[str, float] = Field(default_factory=dict)


class RunReport(BaseModel):
    command: str
    seed: int
    mode: str
    passed: bool
    stages: list[StageSummary] = Field(default_factory=list)
    ledger: list[InvariantVerdict] = Field(default_factory=list)
    failure: Optional[str] = None
    failed_assumption: Optional[str] = None
    config: dict = Field(default_factory=dict)
    timings: dict[str, float] = Field(default_factory=dict, exclude=True)

    def failures(self) -> list[InvariantVerdict]:
        return [v for v in self.ledger if v.enforced and not v.passed]
