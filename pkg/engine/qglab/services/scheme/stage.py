"""One inductive stage q → q+1 in 3D QG or 2D Euler mode, with its invariant ledger."""
import math
import time as clock
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

import numpy as np
import structlog

from ...core.errors import InductiveAssumptionError, PlanarityError
from ..checks import Check, at_most, holds, within
from ..exact_modes import families, interaction_gap, LATTICE_SCALE
from ..spectral import SpectralField, c0_norm, c1_norm, gradient, hdiv, holder_estimate, inner_product
from ..transport import displacement_bound
from .amplitudes import make_amplitudes
from .context import StageContext, prepare_stage
from .parameters import ParameterSchedule, Schedule, StageParameters, check_inequalities
from .perturbation import Perturbation, build_perturbation, expected_energy, family_shell
from .residual import Residual, StressExtraction, assemble_residual, extract_stress
from .state import IterationState, StateSlice, check_slice
from .timing import EnergyProfile

logger = structlog.get_logger(__name__)

WEAK_FORM_TESTS = 20
WEAK_FORM_BAND = 4
PLANAR_FREQUENCY_FACTOR = 2.2


@dataclass(frozen=True)
class StageTolerances:
    gradient: float = 1e-10
    reconstruction: float = 1e-9
    # multiplies δ_{q+1}
    low_frequency: float = 1e-7
    cross_term: float = 1e-12
    energy_increment: float = 0.05
    energy_slack: float = 0.2
    weak_form: float = 1e-8
    flow_det: float = 1e-8
    contraction: float = 0.5

    def scaled(self, factor: float) -> "StageTolerances":
        """Every error tolerance times factor; the contraction target is not a tolerance."""
        changes = {f.name: getattr(self, f.name) * factor for f in fields(self) if f.name != "contraction"}
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class SliceOutcome:
    slice: StateSlice
    previous: StateSlice
    perturbation: Perturbation | None = None
    residual: Residual | None = None
    extraction: StressExtraction | None = None


@dataclass(frozen=True)
class StageSample:
    t: float
    energy: float
    gap: float
    stress_c0: float
    stress_c1: float
    rho: float
    perturbation_energy: float = 0.0
    expected_energy: float = 0.0
    error_norms: dict[str, float] = field(default_factory=dict)


@dataclass(eq=False)
class StageResult:
    q: int
    planar: bool
    params: StageParameters
    context: StageContext
    state: IterationState
    samples: list[StageSample]
    checks: list[Check]
    estimates: dict[str, float]
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.enforced)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.enforced and not c.passed]


class StageEvaluator:
    """Builds level-(q+1) slices on demand and keeps the intermediate pieces for the ledger."""

    def __init__(self, context: StageContext, tolerances: StageTolerances):
        self.context = context
        self.tolerances = tolerances
        self._outcomes: dict[float, SliceOutcome] = {}

    def __call__(self, t: float) -> StateSlice:
        return self.outcome(t).slice

    def outcome(self, t: float) -> SliceOutcome:
        t = float(t)
        if t not in self._outcomes:
            self._outcomes[t] = self._evaluate(t)
        return self._outcomes[t]

    def _evaluate(self, t: float) -> SliceOutcome:
        context = self.context
        previous = context.state.at(t)
        amplitudes = make_amplitudes(context, t)
        if amplitudes.is_zero:
            return SliceOutcome(slice=replace(previous, time=t), previous=previous)
        perturbation = build_perturbation(context, amplitudes)
        residual = assemble_residual(previous, perturbation)
        extraction = extract_stress(
            residual, previous, context.cutoff, context.params.lam_next, self.tolerances.reconstruction
        )
        potential = previous.potential + perturbation.cut_potential
        grad_psi = previous.grad_psi + perturbation.gradient
        pressure, stress = extraction.pressure, extraction.stress
        if context.planar:
            potential, grad_psi, pressure, stress = (f.planar() for f in (potential, grad_psi, pressure, stress))
        new = StateSlice(
            time=t,
            potential=potential,
            grad_psi=grad_psi,
            pressure=pressure,
            stress=stress,
            reconstruction_error=extraction.reconstruction_error,
        )
        return SliceOutcome(new, previous, perturbation, residual, extraction)


def advance_state(context: StageContext, evaluator: StageEvaluator) -> IterationState:
    lam = context.params.lam_next
    bound = PLANAR_FREQUENCY_FACTOR * lam if context.planar else float(lam)
    return IterationState(
        context.q + 1,
        context.grid,
        evaluator,
        planar=context.planar,
        frequency_bound=bound,
        support_start=None if context.cutoff.unit else context.cutoff.support_start,
    )


def select_check_times(context: StageContext, limit: int) -> list[float]:
    """Anchors l/μ and midpoints (l+½)/μ where every active ρ_l > 0, thinned to `limit`, plus the profile center."""
    profile = context.profile
    if profile.is_zero:
        return [float(profile.center)]
    partition = context.partition
    candidates = []
    for l in partition.indices:
        for t in (partition.anchor(l), (l + 0.5) / partition.mu):
            if profile(t) <= 0.0:
                continue
            active = partition.active(t)
            if active and all(context.rho_anchor(m) > 0.0 for m in active):
                candidates.append(t)
    candidates = sorted(set(candidates))
    if len(candidates) > limit:
        picks = np.unique(np.linspace(0, len(candidates) - 1, max(limit, 1)).round().astype(int))
        candidates = [candidates[i] for i in picks]
    return sorted(set(candidates) | {float(profile.center)})


def _random_test_gradient(grid, rng: np.random.Generator) -> SpectralField:
    """∇φ for a real random trigonometric polynomial φ with |n_i| <= WEAK_FORM_BAND."""
    kx, ky, kz = grid.wavenumbers
    mask = (np.abs(kx) <= WEAK_FORM_BAND) & (np.abs(ky) <= WEAK_FORM_BAND) & (np.abs(kz) <= min(WEAK_FORM_BAND, grid.nz // 2 - 1))
    mask = np.broadcast_to(mask, grid.shape)
    coeffs = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * mask
    coeffs[0, 0, 0] = 0.0
    phi = SpectralField.from_samples(grid, SpectralField(grid, coeffs, False).samples().real)
    return gradient(phi)


def weak_form_defect(outcome: SliceOutcome, rng: np.random.Generator) -> float:
    """max over test gradients of |⟨X, ∇φ⟩ − ⟨∇̄·M̊_{q+1}, ∇φ⟩| / (‖X‖‖∇φ‖)."""
    remainder = outcome.extraction.remainder
    divergence = hdiv(outcome.extraction.stress)
    norm = math.sqrt(max(inner_product(remainder, remainder), 0.0))
    worst = 0.0
    for _ in range(WEAK_FORM_TESTS):
        test = _random_test_gradient(remainder.grid, rng)
        scale = norm * math.sqrt(inner_product(test, test))
        if scale == 0.0:
            continue
        worst = max(worst, abs(inner_product(remainder, test) - inner_product(divergence, test)) / scale)
    return worst


def _frequency_shell_excess(w: SpectralField, lower: float, upper: float) -> float:
    scale = w.scale()
    if scale == 0.0:
        return 0.0
    kbar2 = w.grid.horizontal_modulus_squared
    outside = np.broadcast_to((kbar2 < lower ** 2 * (1 - 1e-12)) | (kbar2 > upper ** 2 * (1 + 1e-12)), w.grid.shape)
    return float(np.max(np.abs(w.coeffs) * outside)) / scale


def _slice_checks(
    context: StageContext,
    state: IterationState,
    outcome: SliceOutcome,
    tolerances: StageTolerances,
    rng: np.random.Generator,
) -> tuple[list[Check], StageSample]:
    params = context.params
    t = outcome.slice.time
    new = outcome.slice
    checks = check_slice(new, state, tolerances.gradient)
    energy = context.profile(t)
    gap = energy - new.energy()
    rho = context.rho(t)
    norms: dict[str, float] = {}
    measured = expected = 0.0

    perturbation = outcome.perturbation
    if perturbation is not None:
        extraction = outcome.extraction
        norms = dict(extraction.norms)
        amplitudes = perturbation.amplitudes
        measured = perturbation.energy()
        expected = expected_energy(context, amplitudes)
        checks.append(at_most("stage.reconstruction", extraction.reconstruction_error, tolerances.reconstruction, "stress-reconstruction"))
        checks.append(
            at_most(
                "stage.low_frequency_cancellation",
                amplitudes.low_frequency_residual(),
                tolerances.low_frequency * params.delta_next,
                "low-frequency-cancellation",
            )
        )
        lower, upper = family_shell(context)
        checks.append(at_most("stage.perturbation_shell", _frequency_shell_excess(perturbation.potential, lower, upper), 1e-12, "frequency-support"))

        previous = outcome.previous
        cross = 0.0
        if not previous.grad_psi.is_zero():
            scale = math.sqrt(previous.energy() * measured)
            cross = abs(inner_product(previous.grad_psi, perturbation.gradient)) / scale if scale else 0.0
        checks.append(at_most("stage.cross_term", cross, tolerances.cross_term, "frequency-support"))

        increment = abs(measured - expected) / expected if expected else 0.0
        enforce_increment = context.state.trivial or params.separation >= 10
        checks.append(at_most("stage.energy_increment", increment, tolerances.energy_increment, "energy-increment", enforced=enforce_increment))
        checks.append(at_most("stage.weak_form", weak_form_defect(outcome, rng), tolerances.weak_form, "weak-formulation"))

        velocity = None if context.state.trivial else context.state.velocity(t)
        for anchor in amplitudes.anchors:
            checks.append(at_most("flow.det_error", anchor.flow.det_error(), tolerances.flow_det, "flow-window"))
            bound = 0.0 if velocity is None else 2.0 * displacement_bound(velocity, params.mu)
            checks.append(at_most("flow.displacement_bound", anchor.flow.jacobian_deviation(), bound, "flow-window", enforced=False))

        active = context.partition.active(t)
        if energy > 0.0 and active and all(context.rho_anchor(l) > 0.0 for l in active):
            slack = tolerances.energy_slack
            checks.append(
                within(
                    "stage.energy_window",
                    gap,
                    params.delta_after / 4 * (1 - slack),
                    3 * params.delta_after / 4 * (1 + slack),
                    "energy-increment",
                )
            )

    sample = StageSample(
        t=t,
        energy=energy,
        gap=gap,
        stress_c0=c0_norm(new.stress),
        stress_c1=c1_norm(new.stress),
        rho=rho,
        perturbation_energy=measured,
        expected_energy=expected,
        error_norms=norms,
    )
    return checks, sample


def _merge(checks: list[Check]) -> list[Check]:
    """One entry per name: the failing or largest measurement wins."""
    merged: dict[str, Check] = {}
    for c in checks:
        held = merged.get(c.name)
        if held is None or (held.passed and not c.passed) or (held.passed == c.passed and c.value > held.value):
            merged[c.name] = c
    return list(merged.values())


def _stage_checks(schedule: Schedule, context: StageContext) -> list[Check]:
    checks = []
    if isinstance(schedule, ParameterSchedule):
        report = check_inequalities(schedule, context.q)
        for item in report.checks:
            checks.append(at_most(f"schedule.inequality_{item.index}", item.margin, 0.0, "parameter-inequalities", detail=item.form))
    directions = [k for family in families(context.planar) for k in family.directions]
    gap = interaction_gap(directions)
    floor = Fraction(1, LATTICE_SCALE[context.planar] ** 2)
    checks.append(holds("modes.interaction_gap", gap >= floor, "frequency-modes", detail=f"min |k̄+k̄'|² = {gap}"))
    return checks


def _estimates(schedule: Schedule, params: StageParameters, slices: list[StateSlice]) -> dict[str, float]:
    grad_c0 = max(c0_norm(s.grad_psi) for s in slices)
    grad_c1 = max(c1_norm(s.grad_psi) for s in slices)
    stress_c0 = max(c0_norm(s.stress) for s in slices)
    stress_c1 = max(c1_norm(s.stress) for s in slices)
    root = math.sqrt(params.delta_next)
    out = {
        "grad_psi_c0_ratio": grad_c0 / root,
        "grad_psi_c1_ratio": grad_c1 / (root * params.lam_next),
        "stress_c0_ratio": stress_c0 / (params.eta * params.delta_after),
        "stress_c1_ratio": stress_c1 / (params.delta_after * params.lam_next),
    }
    if schedule.zeta_max is not None:
        out["zeta_max"] = schedule.zeta_max
        out["holder_proxy"] = max(holder_estimate(s.grad_psi, schedule.zeta_max / 2) for s in slices)
    return out


def _run(
    state: IterationState,
    schedule: Schedule,
    profile: EnergyProfile,
    *,
    planar: bool,
    tolerances: StageTolerances,
    check_times: int,
    strict: bool,
    seed: int,
) -> StageResult:
    started = clock.perf_counter()
    context = prepare_stage(state, schedule, profile, planar=planar)
    params = context.params
    evaluator = StageEvaluator(context, tolerances)
    new_state = advance_state(context, evaluator)
    rng = np.random.default_rng(seed)
    log = logger.bind(q=state.q, planar=planar)
    log.info("stage.started", lam_next=params.lam_next, mu=params.mu, delta_next=params.delta_next)

    checks = _stage_checks(schedule, context)
    samples = []
    slices = []
    old_stress = 0.0
    for t in select_check_times(context, check_times):
        outcome = evaluator.outcome(t)
        new_state.at(t)
        slice_checks, sample = _slice_checks(context, new_state, outcome, tolerances, rng)
        checks.extend(slice_checks)
        samples.append(sample)
        slices.append(outcome.slice)
        old_stress = max(old_stress, c0_norm(outcome.previous.stress))
        log.debug("stage.slice", t=t, gap=sample.gap, stress_c0=sample.stress_c0)

    new_stress = max(s.stress_c0 for s in samples)
    reference = max(old_stress, params.delta_after)
    checks.append(at_most("stage.stress_contraction", new_stress / reference, tolerances.contraction, "stress-contraction"))
    checks = _merge(checks)

    result = StageResult(
        q=state.q,
        planar=planar,
        params=params,
        context=context,
        state=new_state,
        samples=samples,
        checks=checks,
        estimates=_estimates(schedule, params, slices),
        elapsed=clock.perf_counter() - started,
    )
    log.info("stage.finished", passed=result.passed, elapsed=result.elapsed, stress_c0=new_stress)
    if strict and not result.passed:
        failed = result.failures()[0]
        raise InductiveAssumptionError(
            f"Stage {state.q} failed {failed.name}: {failed.value:.4e} vs bound {failed.bound:.4e}",
            assumption=failed.assumption,
        )
    return result


def run_stage(
    state: IterationState,
    schedule: Schedule,
    profile: EnergyProfile,
    *,
    tolerances: StageTolerances = StageTolerances(),
    check_times: int = 6,
    strict: bool = True,
    seed: int = 0,
) -> StageResult:
    """3D QG stage with the z-cutoff L_{q+1}."""
    return _run(state, schedule, profile, planar=False, tolerances=tolerances, check_times=check_times, strict=strict, seed=seed)


def euler2d_stage(
    state: IterationState,
    schedule: Schedule,
    profile: EnergyProfile,
    *,
    tolerances: StageTolerances = StageTolerances(),
    check_times: int = 6,
    strict: bool = True,
    seed: int = 0,
) -> StageResult:
    """2D Euler stage: planar families, L ≡ 1, z-independent output."""
    if not state.planar:
        raise PlanarityError("euler2d stages need a z-independent state")
    return _run(state, schedule, profile, planar=True, tolerances=tolerances, check_times=check_times, strict=strict, seed=seed)
