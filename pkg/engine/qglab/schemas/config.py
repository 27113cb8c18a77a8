"""Run configuration: the JSON document consumed by run-stage, run and the verify suites."""
import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.errors import ConfigError

U64_MAX = 2 ** 64 - 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridConfig(_Strict):
    nx: int = 64
    ny: int = 64
    nz: int = 128
    dealias: Literal["two-thirds", "slicewise"] = "slicewise"

    @field_validator("nx", "ny", "nz")
    @classmethod
    def _even(cls, value: int) -> int:
        if value <= 0 or value % 2:
            raise ValueError(f"grid sizes must be positive even integers, got {value}")
        return value


class ScheduleConfig(_Strict):
    """λ_q = a^{cb^q} schedule; lattice defaults to 13 (qg3d) or 65 (euler2d)."""

    a: int
    b: float = Field(gt=1.0)
    c: float = Field(gt=2.5)
    beta: float = Field(gt=0.0, lt=1.0)
    alpha: float = Field(gt=0.0, lt=1.0)
    eta: float = Field(default=0.01, gt=0.0, lt=1.0)
    lattice: Optional[int] = Field(default=None, gt=0)


class ManualParameters(_Strict):
    lam0: int = Field(default=13, gt=0)
    lam1: int = Field(default=26, gt=0)
    delta1: float = Field(default=1.0, gt=0.0)
    delta2: float = Field(default=0.5, gt=0.0)
    mu1: float = Field(default=4.0, gt=0.0)
    eta: float = Field(default=0.01, gt=0.0, lt=1.0)
    ell0: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _monotone(self) -> "ManualParameters":
        if self.lam1 <= self.lam0:
            raise ValueError(f"lam1 must exceed lam0, got lam0={self.lam0}, lam1={self.lam1}")
        if self.delta2 >= self.delta1:
            raise ValueError(f"delta2 must be below delta1, got delta1={self.delta1}, delta2={self.delta2}")
        return self


class EnergyProfileConfig(_Strict):
    type: Literal["bump", "zero"] = "bump"
    center: float = 0.0
    width: float = Field(default=4.0, gt=0.0)
    height: float = Field(default=1.0, ge=0.0)


class Tolerances(_Strict):
    gradient: float = Field(default=1e-10, gt=0.0)
    reconstruction: float = Field(default=1e-9, gt=0.0)
    low_frequency: float = Field(default=1e-7, gt=0.0)
    cross_term: float = Field(default=1e-12, gt=0.0)
    energy_increment: float = Field(default=0.05, gt=0.0)
    energy_slack: float = Field(default=0.2, gt=0.0)
    weak_form: float = Field(default=1e-8, gt=0.0)
    flow_det: float = Field(default=1e-8, gt=0.0)
    contraction: float = Field(default=0.5, gt=0.0)

    def scaled(self, factor: float) -> "Tolerances":
        if factor <= 0:
            raise ConfigError(f"--tolerance-scale must be positive, got {factor}")
        values = {name: value * factor for name, value in self.model_dump().items() if name != "contraction"}
        return self.model_copy(update=values)


class RunConfig(_Strict):
    grid: GridConfig = Field(default_factory=GridConfig)
    schedule: Optional[ScheduleConfig] = None
    manual: Optional[ManualParameters] = None
    mode: Literal["qg3d", "euler2d"] = "qg3d"
    energy_profile: EnergyProfileConfig = Field(default_factory=EnergyProfileConfig)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output_dir: str = "default"
    seed: int = Field(default=0, ge=0, le=U64_MAX)
    stages: int = Field(default=1, ge=1)
    check_times: int = Field(default=6, ge=1)
    snapshots: bool = False

    @model_validator(mode="after")
    def _one_schedule(self) -> "RunConfig":
        if self.schedule is not None and self.manual is not None:
            raise ValueError("give either schedule or manual parameters, not both")
        if self.schedule is None and self.manual is None:
            self.manual = ManualParameters()
        if self.manual is not None and self.stages != 1:
            raise ValueError(f"manual parameters describe stage 0 only, got stages={self.stages}")
        return self

    @property
    def planar(self) -> bool:
        return self.mode == "euler2d"


def _key_path(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"]) or "<root>"


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON run config; ConfigError names the offending key path."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}")
    return validate_config(raw, source=str(path))


def validate_config(raw: dict, source: str = "<config>") -> RunConfig:
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(f"{source}: {_key_path(first)}: {first['msg']}")
