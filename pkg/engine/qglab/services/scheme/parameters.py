"""Parameter schedule λ_q, δ_q, μ_{q+1}, l_q, ℓ and the certification of the seven parameter inequalities."""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import structlog

from ...core.errors import ParameterError

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class StageParameters:
    """Everything stage q → q+1 reads from the schedule."""

    q: int
    lam: int
    lam_next: int
    delta_next: float
    delta_after: float
    mu: float
    ell: float
    l_next: int
    l_after: int
    eta: float

    @property
    def separation(self) -> float:
        return self.lam_next / self.lam


def wall_scale(q: int) -> int:
    """l_q = 2^{q+1}; the stage cutoffs sit at distance 1/l_q from the walls."""
    return 2 ** (q + 1)


@dataclass(frozen=True)
class ParameterSchedule:
    a: int
    b: float
    c: float
    beta: float
    alpha: float
    eta: float
    # λ_q is rounded up to a multiple of this (13 for the 3D families, 65 for the planar ones)
    lattice: int = 13

    def lam(self, q: int) -> int:
        try:
            value = math.exp(self.c * self.b ** q * math.log(self.a))
        except OverflowError:
            raise ParameterError(f"λ_{q} = {self.a}^({self.c}·{self.b}^{q}) overflows")
        return int(math.ceil(value / self.lattice - 1e-12)) * self.lattice

    def delta(self, q: int) -> float:
        return self.a ** (-(self.b ** q))

    def mu(self, q: int) -> float:
        """μ_{q+1} = δ_q^{1/4} δ_{q+1}^{1/4} λ_q^{1/2} λ_{q+1}^{1/2}, from the integerized λ."""
        return (self.delta(q) * self.delta(q + 1)) ** 0.25 * math.sqrt(self.lam(q) * self.lam(q + 1))

    def l(self, q: int) -> int:
        return wall_scale(q)

    def ell(self, q: int) -> float:
        return self.lam(q) ** -0.75 * self.lam(q + 1) ** -0.25

    @property
    def zeta_max(self) -> float:
        return 1.0 / (2.0 * self.c)

    def stage(self, q: int) -> StageParameters:
        return StageParameters(
            q=q,
            lam=self.lam(q),
            lam_next=self.lam(q + 1),
            delta_next=self.delta(q + 1),
            delta_after=self.delta(q + 2),
            mu=self.mu(q),
            ell=self.ell(q),
            l_next=self.l(q + 1),
            l_after=self.l(q + 2),
            eta=self.eta,
        )


@dataclass(frozen=True)
class ManualSchedule:
    """Desk-scale stage 0 with explicit λ_0, λ_1, δ_1, δ_2, μ_1."""

    lam0: int
    lam1: int
    delta1: float
    delta2: float
    mu1: float
    eta: float = 0.01
    ell0: float | None = None

    def __post_init__(self):
        if self.lam0 <= 0 or self.lam1 <= self.lam0:
            raise ParameterError(f"Manual schedule needs 0 < λ_0 < λ_1, got λ_0={self.lam0}, λ_1={self.lam1}")
        if not (self.delta1 > self.delta2 > 0):
            raise ParameterError(f"Manual schedule needs δ_1 > δ_2 > 0, got δ_1={self.delta1}, δ_2={self.delta2}")
        if self.mu1 <= 0 or not (0 < self.eta < 1):
            raise ParameterError(f"Manual schedule needs μ_1 > 0 and 0 < η < 1, got μ_1={self.mu1}, η={self.eta}")

    def l(self, q: int) -> int:
        return wall_scale(q)

    @property
    def zeta_max(self) -> float | None:
        return None

    def stage(self, q: int) -> StageParameters:
        if q != 0:
            raise ParameterError(f"A manual schedule only describes stage 0, not stage {q}")
        ell = self.ell0 if self.ell0 is not None else self.lam0 ** -0.75 * self.lam1 ** -0.25
        return StageParameters(
            q=0,
            lam=self.lam0,
            lam_next=self.lam1,
            delta_next=self.delta1,
            delta_after=self.delta2,
            mu=self.mu1,
            ell=ell,
            l_next=self.l(1),
            l_after=self.l(2),
            eta=self.eta,
        )


Schedule = Union[ParameterSchedule, ManualSchedule]


def make_schedule(a: int, b: float, c: float, beta: float, alpha: float, eta: float, lattice: int = 13) -> ParameterSchedule:
    if not isinstance(a, int) or a % lattice != 0 or a < 26:
        raise ParameterError(f"a must be a multiple of {lattice} with a >= 26, got {a}")
    if b <= 1:
        raise ParameterError(f"b must exceed 1, got {b}")
    if c <= 2.5:
        raise ParameterError(f"c must exceed 5/2, got {c}")
    if not (0 < alpha < beta < 1):
        raise ParameterError(f"Need 0 < α < β < 1, got α={alpha}, β={beta}")
    if not (0 < eta < 1):
        raise ParameterError(f"η must lie in (0, 1), got {eta}")
    schedule = ParameterSchedule(a=a, b=b, c=c, beta=beta, alpha=alpha, eta=eta, lattice=lattice)
    logger.debug("schedule.built", a=a, b=b, c=c, lam0=schedule.lam(0), zeta_max=schedule.zeta_max)
    return schedule


# --- inequality certification -------------------------------------------------------------

@dataclass(frozen=True)
class InequalityCheck:
    index: int
    form: str
    margin: float
    exact: bool

    @property
    def passed(self) -> bool:
        return self.margin <= 0


@dataclass(frozen=True)
class InequalityReport:
    q: int
    checks: tuple[InequalityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[int]:
        return [c.index for c in self.checks if not c.passed]


def _exact(value: float) -> Fraction:
    return Fraction(str(value))


def check_inequalities(schedule: ParameterSchedule, q: int) -> InequalityReport:
    """
    Logarithm-base-a reductions of the seven inequalities; margin <= 0 means the inequality holds.
    Forms 1, 2 and 4 to 7 do not depend on q and are evaluated in exact rational arithmetic.
    """
    b, c = _exact(schedule.b), _exact(schedule.c)
    beta, alpha = _exact(schedule.beta), _exact(schedule.alpha)
    quarter, half = Fraction(1, 4), Fraction(1, 2)
    forms = [
        ("b(1/4 - (1/2-β)c) + c/2 - 1/4", b * (quarter - (half - beta) * c) + c / 2 - quarter),
        ("b² - b(3/4 + c/2) + c/2 - 1/4", b * b - b * (Fraction(3, 4) + c / 2) + c / 2 - quarter),
        None,
        ("b² - b(c + 1/2) + c - 1/2", b * b - b * (c + half) + c - half),
        ("1 - (1-β)b", 1 - (1 - beta) * b),
        ("1 + α - (1-α)b", 1 + alpha - (1 - alpha) * b),
        ("c(1-b)/4", c * (1 - b) / 4),
    ]
    log_a = math.log(schedule.a)
    bf = schedule.b
    third = (q + 2) * math.log(2) / log_a - (1 + schedule.c) * bf ** (q + 1) - (math.log(schedule.eta) / log_a - bf ** (q + 2))

    checks = []
    for index, entry in enumerate(forms, start=1):
        if entry is None:
            checks.append(InequalityCheck(index, "(q+2)log_a 2 - (1+c)b^(q+1) - (log_a η - b^(q+2))", third, False))
        else:
            form, margin = entry
            checks.append(InequalityCheck(index, form, float(margin), True))
    report = InequalityReport(q=q, checks=tuple(checks))
    logger.debug("schedule.inequalities", q=q, failed=report.failed())
    return report
