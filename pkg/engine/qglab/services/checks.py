"""Named pass/fail measurements shared by the verification suites and stage runs."""
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: float
    passed: bool
    assumption: str
    # informational checks are reported but never fail a run
    enforced: bool = True
    detail: str = ""


def at_most(name: str, value: float, bound: float, assumption: str, *, enforced: bool = True, detail: str = "") -> Check:
    value = float(value)
    passed = math.isfinite(value) and value <= bound
    return Check(name, value, float(bound), passed, assumption, enforced, detail)


def within(name: str, value: float, lower: float, upper: float, assumption: str, *, enforced: bool = True) -> Check:
    value = float(value)
    passed = math.isfinite(value) and lower <= value <= upper
    return Check(name, value, float(upper), passed, assumption, enforced, f"[{lower:.6e}, {upper:.6e}]")


def holds(name: str, condition: bool, assumption: str, *, enforced: bool = True, detail: str = "") -> Check:
    return Check(name, 0.0 if condition else 1.0, 0.0, bool(condition), assumption, enforced, detail)


def all_passed(checks) -> bool:
    return all(c.passed for c in checks if c.enforced)
