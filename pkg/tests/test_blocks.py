import math

import numpy as np
import pytest

from qglab.core.errors import BandOverflowError, EmptyPlateauError, RealityError
from qglab.services.blocks import (
    CutoffProfile,
    analytic_mean_flux,
    block_mean_flux,
    block_pressure,
    boundary_trace,
    eigenfunction_residual,
    make_block,
    make_cutoff,
    pressure_ratio,
    profiled_gradient,
    quadrature_mean_flux,
    smoothstep5,
    stationarity_residual,
    verify_algebraic_identity,
    verify_cutoff_factorization,
    wall_collar,
)
from qglab.services.exact_modes import RationalDirection, build_family, solve_coefficients
from qglab.services.scheme import ManualSchedule
from qglab.services.spectral import GridSpec, SpectralField, c0_norm, curl, gradient

K = RationalDirection((5, 0, 12), 13)


class FixedWalls:
    def l(self, q: int) -> int:
        return 4


@pytest.fixture
def block_grid():
    return GridSpec(48, 48, 48, "slicewise")


def test_single_pair_block_is_an_eigenfunction(block_grid):
    block = make_block(block_grid, 13, [K, -K], [1.0, 1.0])
    assert eigenfunction_residual(block) < 1e-12
    pressure = block_pressure(block)
    assert stationarity_residual(block, pressure) < 1e-10
    assert verify_algebraic_identity(block) < 1e-12


def test_family_block_is_stationary(block_grid, rng):
    family = build_family(1)
    half = [complex(*rng.standard_normal(2)) for _ in family.positive]
    block = make_block(block_grid, 13, family.directions, half + [c.conjugate() for c in half])
    pressure = block_pressure(block)
    assert stationarity_residual(block, pressure) < 1e-10
    assert pressure_ratio(block, pressure) < 10.0


def test_block_requires_conjugate_amplitudes(block_grid):
    with pytest.raises(RealityError):
        make_block(block_grid, 13, [K, -K], [1.0 + 1.0j, 1.0 + 1.0j])
    with pytest.raises(RealityError):
        make_block(block_grid, 13, [K], [1.0])


def test_block_must_fit_the_band():
    with pytest.raises(BandOverflowError):
        make_block(GridSpec(16, 16, 16), 13, [K, -K], [1.0, 1.0])


def test_mean_flux_of_center_coefficients(block_grid):
    family = build_family(1)
    solve = solve_coefficients(family, family.base_matrix)
    block = make_block(block_grid, 13, [k for k, _ in solve.squares], [math.sqrt(c) for _, c in solve.squares])
    target = 2.0 * family.base_matrix.to_array()
    np.testing.assert_allclose(analytic_mean_flux(block), target, atol=1e-14)
    np.testing.assert_allclose(block_mean_flux(block), target, atol=1e-12)
    np.testing.assert_allclose(quadrature_mean_flux(block), target, atol=1e-12)


def test_smoothstep_end_values():
    np.testing.assert_array_equal(smoothstep5(np.array([-1.0, 0.0, 1.0, 2.0])), [0.0, 0.0, 1.0, 1.0])
    assert smoothstep5(np.array(0.5)) == pytest.approx(0.5)


def test_cutoff_plateau_and_support():
    schedule = ManualSchedule(13, 26, 1.0, 0.5, 4.0)
    cutoff = make_cutoff(schedule, 0)
    assert cutoff.plateau_start == pytest.approx(0.25)
    assert cutoff.support_start == pytest.approx(0.125)
    z = np.linspace(0.0, 2 * np.pi, 4001)
    values = cutoff.value(z)
    assert np.all((values >= 0.0) & (values <= 1.0))
    assert np.all(values[cutoff.plateau_mask(z)] == 1.0)
    assert np.all(values[z < cutoff.support_start] == 0.0)
    assert np.max(np.abs(cutoff.derivative(z))) <= cutoff.slope_bound


def test_cutoff_needs_a_plateau():
    with pytest.raises(EmptyPlateauError):
        make_cutoff(FixedWalls(), 0)


def test_unit_cutoff_is_identity(block_grid):
    block = make_block(block_grid, 13, [K, -K], [1.0, 1.0])
    unit = CutoffProfile.unit_profile()
    grad = profiled_gradient(block.potential, unit)
    assert c0_norm(grad - gradient(block.potential)) == 0.0
    pressure = block_pressure(block)
    r1, r2 = verify_cutoff_factorization(block, pressure, unit)
    assert max(r1, r2) < 1e-12


def test_cutoff_factorization_residuals():
    grid = GridSpec(48, 48, 128, "slicewise")
    family = build_family(1)
    block = make_block(grid, 13, family.directions, [1.0] * len(family.directions))
    pressure = block_pressure(block)
    cutoff = make_cutoff(ManualSchedule(13, 26, 1.0, 0.5, 4.0), 0)
    r1, r2 = verify_cutoff_factorization(block, pressure, cutoff)
    assert r1 < 1e-9
    assert r2 < 1e-9
    assert boundary_trace(pressure, cutoff) == 0.0


def test_wall_collar_spans_both_walls():
    grid = GridSpec(48, 48, 128, "slicewise")
    cutoff = make_cutoff(ManualSchedule(13, 26, 1.0, 0.5, 4.0), 0)
    collar = wall_collar(grid, cutoff)
    z = grid.coordinates()[2]
    assert np.count_nonzero(collar & (z < math.pi)) > 1
    assert np.count_nonzero(collar & (z > math.pi)) > 1
    assert not wall_collar(grid, CutoffProfile.unit_profile()).any()


def test_boundary_trace_vanishes_on_the_collar_only():
    grid = GridSpec(48, 48, 128, "slicewise")
    cutoff = make_cutoff(ManualSchedule(13, 26, 1.0, 0.5, 4.0), 0)
    x, y, z = grid.mesh()
    pressure = SpectralField.from_samples(grid, np.stack([np.zeros_like(x), np.sin(x) * np.cos(z), np.zeros_like(x)]))
    assert boundary_trace(pressure, cutoff) == 0.0

    values, _ = cutoff.sampled(grid)
    third = curl(pressure).samples()[2] * values ** 2
    assert np.max(np.abs(third[..., ~wall_collar(grid, cutoff)])) > 0.5
    assert boundary_trace(pressure, CutoffProfile.unit_profile()) == 0.0


def test_zero_block_has_no_pressure(block_grid):
    block = make_block(block_grid, 13, [K, -K], [0.0, 0.0])
    assert block_pressure(block).is_zero()
