import dataclasses

import numpy as np
import pytest

from qglab.core.errors import InductiveAssumptionError, PlanarityError
from qglab.services.scheme import (
    EnergyProfile,
    IterationState,
    ManualSchedule,
    StageTolerances,
    StateSlice,
    check_slice,
    euler2d_stage,
    prepare_stage,
    run_stage,
    select_check_times,
    wall_scale,
)
from qglab.services.spectral import GridSpec, SpectralField, c0_norm, gradient

pytestmark = pytest.mark.slow

PLANAR_SCHEDULE = ManualSchedule(13, 65, 1.0, 0.5, 4.0)
BUMP = EnergyProfile(center=0.0, width=2.0, height=1.0)


def by_name(result):
    return {c.name: c for c in result.checks}


@pytest.fixture(scope="module")
def planar_result():
    state = IterationState.zero(GridSpec(256, 256, 2, "slicewise"), planar=True)
    return euler2d_stage(state, PLANAR_SCHEDULE, BUMP, check_times=3)


def test_zero_energy_stage_leaves_state_unchanged(slab_grid):
    state = IterationState.zero(slab_grid)
    result = run_stage(state, ManualSchedule(13, 26, 1.0, 0.5, 4.0), EnergyProfile(kind="zero"))
    assert result.passed
    assert [s.t for s in result.samples] == [0.0]
    assert all(s.perturbation_energy == 0.0 for s in result.samples)
    assert result.state.q == 1
    assert result.state.at(0.0).is_zero
    checks = by_name(result)
    assert checks["stage.stress_contraction"].value == 0.0
    assert checks["modes.interaction_gap"].passed


def test_check_times_of_zero_profile(slab_grid):
    context = prepare_stage(IterationState.zero(slab_grid), ManualSchedule(13, 26, 1.0, 0.5, 4.0), EnergyProfile(kind="zero"))
    assert select_check_times(context, 6) == [0.0]


def test_planar_stage_passes(planar_result):
    assert planar_result.passed, [c.name for c in planar_result.failures()]
    assert planar_result.planar
    assert len(planar_result.samples) >= 2


def test_planar_stage_pumps_the_prescribed_energy(planar_result):
    checks = by_name(planar_result)
    assert checks["stage.energy_increment"].value < 0.05
    assert checks["stage.energy_window"].passed
    assert checks["stage.cross_term"].value == 0.0
    assert checks["stage.weak_form"].passed
    assert checks["state.z_independent"].passed
    for sample in planar_result.samples:
        assert sample.perturbation_energy > 0.0


def test_planar_stage_contracts_the_stress(planar_result):
    checks = by_name(planar_result)
    assert checks["stage.stress_contraction"].value < 0.5
    assert planar_result.estimates["stress_c0_ratio"] >= 0.0
    assert "zeta_max" not in planar_result.estimates


def test_new_state_is_planar_and_band_limited(planar_result):
    state = planar_result.state
    assert state.planar
    assert state.frequency_bound == pytest.approx(2.2 * 65)
    assert state.support_start is None


def test_euler2d_needs_planar_state(slab_grid):
    with pytest.raises(PlanarityError):
        euler2d_stage(IterationState.zero(slab_grid), PLANAR_SCHEDULE, BUMP)


def test_strict_stage_raises_on_failed_invariant(planar_grid):
    state = IterationState.zero(planar_grid, planar=True)
    tight = dataclasses.replace(StageTolerances(), contraction=1e-30)
    with pytest.raises(InductiveAssumptionError) as info:
        euler2d_stage(state, PLANAR_SCHEDULE, BUMP, tolerances=tight, check_times=1)
    assert info.value.assumption == "stress-contraction"
    result = euler2d_stage(state, PLANAR_SCHEDULE, BUMP, tolerances=tight, check_times=1, strict=False)
    assert not result.passed
    assert result.failures()[0].name == "stage.stress_contraction"


class RelabelledSchedule:
    """Desk-scale stage-0 parameters reused for a later stage q."""

    zeta_max = None

    def __init__(self, base: ManualSchedule):
        self.base = base

    def l(self, q: int) -> int:
        return wall_scale(q)

    def stage(self, q: int):
        return dataclasses.replace(self.base.stage(0), q=q, l_next=wall_scale(q + 1), l_after=wall_scale(q + 2))


def cellular_state(grid: GridSpec, amplitude: float) -> IterationState:
    """Level-1 planar state with Ψ = A sin x sin y, a steady Laplacian eigenfunction."""
    x, y, _ = grid.mesh()
    potential = SpectralField.from_samples(grid, amplitude * np.sin(x) * np.sin(y)).planar()
    grad_psi = gradient(potential)

    def evaluate(t: float) -> StateSlice:
        return StateSlice(
            time=t,
            potential=potential,
            grad_psi=grad_psi,
            pressure=SpectralField.zeros(grid, (3,)),
            stress=SpectralField.zeros(grid, (3, 3)),
        )

    return IterationState(1, grid, evaluate, planar=True, frequency_bound=2.0)


@pytest.fixture(scope="module")
def second_stage_result():
    state = cellular_state(GridSpec(256, 256, 2, "slicewise"), 0.03)
    return euler2d_stage(state, RelabelledSchedule(PLANAR_SCHEDULE), BUMP, check_times=3, strict=False)


def test_second_stage_transports_along_the_old_flow(second_stage_result):
    result = second_stage_result
    assert result.q == 1
    assert result.state.q == 2
    assert not result.context.state.trivial
    # halfway between the anchors 0 and 1/μ both windows are active
    midpoint = 0.5 / result.params.mu
    assert result.context.partition.active(midpoint) == [0, 1]
    flows = [result.context.flow(l, midpoint) for l in (0, 1)]
    assert all(not flow.is_identity for flow in flows)
    assert all(flow.det_error() < 1e-8 for flow in flows)

    new = result.state.at(midpoint)
    assert all(c.passed for c in check_slice(new, result.state))
    assert c0_norm(new.stress) < 0.5 * result.params.delta_after


def test_second_stage_ledger_passes(second_stage_result):
    result = second_stage_result
    assert result.passed, [(c.name, c.value, c.bound) for c in result.failures()]
    checks = by_name(result)
    for name in (
        "stage.cross_term",
        "stage.reconstruction",
        "stage.weak_form",
        "stage.energy_window",
        "stage.stress_contraction",
        "flow.det_error",
        "state.frequency_support",
        "state.gradient_exact",
    ):
        assert checks[name].passed, name
    # the old and new frequencies are disjoint, so the cross term vanishes
    assert checks["stage.cross_term"].value == 0.0
    assert not checks["stage.energy_increment"].enforced


def test_second_stage_keeps_the_old_energy(second_stage_result):
    result = second_stage_result
    old = result.context.state.energy(0.0)
    assert old == pytest.approx(4.0 * np.pi ** 3 * 0.03 ** 2, rel=1e-9)
    for sample in result.samples:
        assert sample.perturbation_energy > 0.0
        assert sample.gap == pytest.approx(sample.energy - old - sample.perturbation_energy, abs=1e-9)


@pytest.fixture(scope="module")
def desk_result():
    state = IterationState.zero(GridSpec(64, 64, 128, "slicewise"))
    profile = EnergyProfile(center=0.0, width=4.0, height=1.0)
    return run_stage(state, ManualSchedule(13, 26, 1.0, 0.5, 4.0, eta=0.01), profile, check_times=3, strict=False)


def test_desk_qg_stage_passes(desk_result):
    assert desk_result.passed, [(c.name, c.value, c.bound) for c in desk_result.failures()]
    assert not desk_result.planar
    assert desk_result.state.support_start == pytest.approx(1.0 / wall_scale(2))


def test_desk_qg_stage_pumps_energy_and_contracts_stress(desk_result):
    checks = by_name(desk_result)
    assert checks["stage.energy_increment"].enforced
    assert checks["stage.energy_increment"].value < 0.05
    assert checks["stage.energy_window"].passed
    assert checks["stage.stress_contraction"].value < 0.5
    assert checks["stage.low_frequency_cancellation"].passed
    assert checks["state.spatial_support"].passed
    for sample in desk_result.samples:
        assert sample.perturbation_energy > 0.0
        assert sample.expected_energy > 0.0
