import math

import numpy as np
import pytest

from qglab.core.errors import GridMismatchError, NotAGradientError, SliceMeanError
from qglab.services.spectral import (
    VOLUME,
    FrequencyRegion,
    GridSpec,
    SpectralField,
    c0_norm,
    c1_norm,
    curl,
    divergence,
    gradient,
    gradperp_bar,
    hdiv,
    holder_estimate,
    inner_product,
    inv_gradperp,
    inverse_div_D,
    inverse_div_E,
    inverse_div_I,
    inverse_neg_laplacian,
    laplacian,
    localize,
    multiply_z_profile,
    p_curl3,
    p_grad3,
    p_grad_bar,
    p_gradperp_bar,
    pointwise_product,
    real_part_sum,
    riesz2_slicewise,
    riesz3,
)
from qglab.services.verify import random_field


def relative(a: SpectralField, b: SpectralField) -> float:
    return c0_norm(a - b) / c0_norm(b)


def test_grid_rejects_odd_sizes():
    with pytest.raises(ValueError):
        GridSpec(31, 32, 32)


def test_retained_band_depends_on_rule():
    assert GridSpec(48, 48, 48).retained_max == (16, 16, 16)
    assert GridSpec(48, 48, 48, "slicewise").retained_max == (16, 16, 24)


def test_mean_is_zero_coefficient(grid):
    x, _, _ = grid.mesh()
    f = SpectralField.from_samples(grid, 2.0 + np.cos(x))
    assert f.mean().real == pytest.approx(2.0)


def test_derivatives_of_trigonometric_fields(grid):
    x, y, _ = grid.mesh()
    f = SpectralField.from_samples(grid, np.sin(x) * np.cos(2 * y))
    grad = gradient(f).samples()
    np.testing.assert_allclose(grad[0], np.cos(x) * np.cos(2 * y), atol=1e-12)
    np.testing.assert_allclose(grad[1], -2 * np.sin(x) * np.sin(2 * y), atol=1e-12)
    np.testing.assert_allclose(laplacian(f).samples(), -5 * f.samples(), atol=1e-12)
    np.testing.assert_allclose(inverse_neg_laplacian(f).samples(), f.samples() / 5, atol=1e-12)


def test_gradperp_is_divergence_free(grid, rng):
    f = random_field(grid, rng)
    assert c0_norm(divergence(gradperp_bar(f))) < 1e-10 * c0_norm(gradient(f))
    assert c0_norm(curl(gradient(f))) < 1e-10 * c0_norm(gradient(f))


def test_riesz_transforms_are_unimodular(grid, rng):
    f = random_field(grid, rng)
    r = riesz3(f)
    assert inner_product(r, r) == pytest.approx(inner_product(f, f), rel=1e-12)
    r2 = riesz2_slicewise(f)
    assert inner_product(r2, r2) == pytest.approx(inner_product(f, f), rel=1e-12)


def test_projectors_split_vector_fields(grid, rng):
    v = random_field(grid, rng, (3,))
    p = p_grad3(v)
    assert relative(p + p_curl3(v), v) < 1e-12
    assert relative(p_grad3(p), p) < 1e-12
    assert c0_norm(curl(p)) < 1e-10 * c1_norm(v)
    pb = p_grad_bar(v)
    assert relative(pb + p_gradperp_bar(v), v) < 1e-12


def test_inv_gradperp_inverts_horizontal_perp_gradient(grid, rng):
    h = random_field(grid, rng)
    assert relative(inv_gradperp(gradperp_bar(h)), h) < 1e-12
    v = random_field(grid, rng, (3,))
    assert relative(gradperp_bar(inv_gradperp(v)), p_gradperp_bar(v)) < 1e-12


def test_inverse_divergences(grid, rng):
    f = random_field(grid, rng)
    g = random_field(grid, rng)
    grad = gradient(f)
    grad_f = SpectralField.stack([grad[0], grad[1], SpectralField.zeros(grid)])
    x = SpectralField.stack([grad[0], grad[1], g])

    e = inverse_div_E(grad_f)
    assert relative(hdiv(e), grad_f) < 1e-10
    np.testing.assert_allclose(e.coeffs[0, 1], e.coeffs[1, 0])
    assert np.max(np.abs(e.coeffs[0, 0] + e.coeffs[1, 1])) == 0.0

    assert relative(hdiv(inverse_div_I(g)), g) < 1e-10

    d = inverse_div_D(x)
    assert relative(hdiv(d), x) < 1e-10
    assert not np.any(d.coeffs[:, 2])


def test_inverse_divergence_needs_slice_mean_zero(grid):
    _, _, z = grid.mesh()
    g = SpectralField.from_samples(grid, np.cos(z))
    with pytest.raises(SliceMeanError):
        inverse_div_I(g)


def test_inverse_div_e_needs_a_gradient(grid, rng):
    f = random_field(grid, rng)
    with pytest.raises(NotAGradientError):
        inverse_div_E(gradperp_bar(f))


def test_fields_on_different_grids_do_not_mix(grid):
    other = GridSpec(16, 16, 16)
    with pytest.raises(GridMismatchError):
        SpectralField.zeros(grid) + SpectralField.zeros(other)


def test_dealiased_product_of_sines(grid):
    x, _, _ = grid.mesh()
    s = SpectralField.from_samples(grid, np.sin(x))
    expected = SpectralField.from_samples(grid, 0.5 - 0.5 * np.cos(2 * x))
    assert relative(pointwise_product(s, s), expected) < 1e-13


def test_product_drops_frequencies_outside_retained_set():
    grid = GridSpec(24, 24, 24)
    x, _, _ = grid.mesh()
    s = SpectralField.from_samples(grid, np.cos(6 * x))
    product = pointwise_product(s, s)
    # cos²(6x) = ½ + ½cos(12x); |12| exceeds the retained bound 8
    np.testing.assert_allclose(product.samples(), 0.5, atol=1e-13)


def test_z_profile_commutes_with_horizontal_projector(rng):
    grid = GridSpec(32, 32, 32, "slicewise")
    v = random_field(grid, rng, (3,))
    profile = 0.5 + 0.25 * np.cos(grid.coordinates()[2])
    lhs = p_grad_bar(multiply_z_profile(v, profile))
    rhs = multiply_z_profile(p_grad_bar(v), profile)
    assert relative(lhs, rhs) < 1e-12


def test_annulus_localization(grid, rng):
    f = random_field(grid, rng, band=10)
    local = localize(f, FrequencyRegion.annulus(4))
    assert 2.0 <= local.horizontal_band() <= 8.0
    with pytest.raises(ValueError):
        FrequencyRegion.annulus(1000).mask(grid)


def test_real_part_sum_is_hermitian(grid, rng):
    coeffs = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    f = real_part_sum(SpectralField(grid, coeffs, False))
    assert f.hermitian_defect() < 1e-15


def test_norms_of_plane_waves(grid):
    x, _, _ = grid.mesh()
    s = SpectralField.from_samples(grid, np.sin(4 * x))
    assert c0_norm(s) == pytest.approx(1.0)
    assert c1_norm(s) == pytest.approx(4.0)
    assert holder_estimate(s, 0.5) == pytest.approx(2.0 ** 1.5)
    assert inner_product(s, s) == pytest.approx(VOLUME / 2)


def test_inner_product_matches_quadrature(grid, rng):
    f = random_field(grid, rng)
    g = random_field(grid, rng)
    quadrature = float(np.sum(f.samples() * g.samples())) * (2 * math.pi) ** 3 / grid.size
    assert inner_product(f, g) == pytest.approx(quadrature, rel=1e-10)
