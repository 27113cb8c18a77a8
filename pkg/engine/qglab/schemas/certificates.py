"""Certificates printed and stored by the verify-* suites."""
from pydantic import BaseModel, Field


class CheckOut(BaseModel):
    name: str
    assumption: str
    passed: bool
    value: float
    bound: float
    enforced: bool = True
    detail: str = ""


class Certificate(BaseModel):
    suite: str
    seed: int
    passed: bool
    checks: list[CheckOut]
    details: dict = Field(default_factory=dict)
    # wall-clock seconds; logged, never persisted
    elapsed: float = Field(default=0.0, exclude=True)

    def failures(self) -> list[CheckOut]:
        return [c for c in self.checks if c.enforced and not c.passed]
