import numpy as np
import pytest

from qglab.core.errors import MarginError, TimeWindowError
from qglab.services.blocks import make_cutoff
from qglab.services.exact_modes import RationalDirection
from qglab.services.scheme import ManualSchedule
from qglab.services.spectral import GridSpec, SpectralField, c0_norm
from qglab.services.transport import (
    FlowMap,
    HorizontalInterpolator,
    MollifierSpec,
    advance_flow,
    displacement_bound,
    material_derivative_residual,
    mollify_z,
    transport_stress,
    transported_phase,
    z_support,
)


@pytest.fixture
def thin_grid():
    return GridSpec(32, 32, 4, "slicewise")


def shear(grid: GridSpec) -> SpectralField:
    _, y, _ = grid.mesh()
    return SpectralField.from_samples(grid, np.stack([np.sin(y), np.zeros_like(y), np.zeros_like(y)]))


def test_mollifier_weights(slab_grid):
    assert MollifierSpec(slab_grid.dz / 2).weights(slab_grid).tolist() == [1.0]
    weights = MollifierSpec(0.5).weights(slab_grid)
    assert weights.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(weights, weights[::-1])


def test_mollifying_a_z_independent_field(slab_grid):
    x, _, _ = slab_grid.mesh()
    f = SpectralField.from_samples(slab_grid, np.sin(x))
    assert c0_norm(mollify_z(f, MollifierSpec(0.3)) - f) < 1e-13


def test_mollifier_margin_against_cutoff(slab_grid):
    x, _, _ = slab_grid.mesh()
    f = SpectralField.from_samples(slab_grid, np.sin(x))
    cutoff = make_cutoff(ManualSchedule(13, 26, 1.0, 0.5, 4.0), 0)
    assert z_support(f) == (0.0, slab_grid.coordinates()[2][-1])
    with pytest.raises(MarginError):
        mollify_z(f, MollifierSpec(0.1), cutoff)


def test_interpolator_matches_samples_on_grid(thin_grid, rng):
    x, y, z = thin_grid.mesh()
    f = SpectralField.from_samples(thin_grid, np.sin(2 * x + y) * np.cos(z) + np.cos(3 * y))
    interp = HorizontalInterpolator(f)
    np.testing.assert_allclose(interp(x, y), f.samples(), atol=1e-12)
    shifted = interp(x + 0.1, y)
    np.testing.assert_allclose(shifted, np.sin(2 * (x + 0.1) + y) * np.cos(z) + np.cos(3 * y), atol=1e-12)


def test_flow_window_is_enforced(thin_grid):
    with pytest.raises(TimeWindowError):
        advance_flow(shear(thin_grid), 0.0, 1.0, mu=1.0)


def test_zero_velocity_gives_identity(thin_grid):
    flow = advance_flow(SpectralField.zeros(thin_grid, (3,)), 0.0, 0.5, mu=1.0)
    assert flow.is_identity
    assert flow.det_error() == 0.0
    assert flow.jacobian_deviation() == 0.0
    assert displacement_bound(SpectralField.zeros(thin_grid, (3,)), 1.0) == 0.0


def test_shear_flow_closed_form(thin_grid):
    _, y, _ = thin_grid.mesh()
    mu = 4.0
    anchor, t = 0.25, 0.25 + 0.7 / mu
    flow = advance_flow(shear(thin_grid), anchor, t, mu)
    np.testing.assert_allclose(flow.displacement[0], -(t - anchor) * np.sin(y), atol=1e-9)
    np.testing.assert_allclose(flow.displacement[1], 0.0, atol=1e-12)
    assert flow.det_error() < 1e-8
    assert flow.steps >= 8


def test_transported_quantities(thin_grid):
    identity = FlowMap.identity(thin_grid, 0.0, 0.0)
    phase = transported_phase(identity, RationalDirection((3, 4, 12), 13), 13)
    np.testing.assert_allclose(np.abs(phase.samples()), 1.0, atol=1e-12)
    x, _, _ = thin_grid.mesh()
    stress = SpectralField.from_samples(thin_grid, np.sin(x))
    assert transport_stress(stress, identity) is stress


def test_transported_stress_solves_transport_equation(thin_grid):
    x, _, _ = thin_grid.mesh()
    stress = SpectralField.from_samples(thin_grid, np.sin(x))
    residual = material_derivative_residual(stress, shear(thin_grid), 0.0, 0.3, 1.0, 1e-3)
    assert residual < 1e-5
