"""Residual of the new triple at one time slice and its split into Q_{q+1} and M̊_{q+1}."""
from dataclasses import dataclass, field

import numpy as np
import structlog

from ...core.errors import DecompositionError
from ..blocks import CutoffProfile, cutoff_lower_order, perp_from_gradient, profiled_curl, quadratic_flux
from ..spectral import (
    SpectralField,
    c0_norm,
    curl,
    gradient,
    hdiv,
    inv_gradperp,
    inverse_div_D,
    inverse_neg_laplacian,
    multiply_z_profile,
    p_grad3,
    p_grad_bar,
)
from .perturbation import Perturbation
from .state import StateSlice

logger = structlog.get_logger(__name__)

RECONSTRUCTION_TOL = 1e-9
# quadratic interactions above λ_{q+1}/26 count as high-frequency oscillation error
HIGH_FREQUENCY_FRACTION = 1.0 / 26.0


@dataclass(frozen=True, eq=False)
class Residual:
    time: float
    transport: SpectralField
    nash: SpectralField
    quadratic: SpectralField
    old_stress: SpectralField
    # ∇̄·(∇W⊗∇̄⊥W) without the cutoff
    uncut_flux: SpectralField

    @property
    def total(self) -> SpectralField:
        """R = ∂_t∇Ψ_{q+1} + ∇̄·(∇Ψ_{q+1}⊗∇̄⊥Ψ_{q+1}) − curl Q_q − ∇̄·M̊_q."""
        return self.transport + self.nash + self.quadratic

    @property
    def oscillation(self) -> SpectralField:
        return self.quadratic + self.old_stress

    @property
    def source(self) -> SpectralField:
        """T + N + O: what curl(Q_{q+1} − Q_q) + ∇̄·M̊_{q+1} must reproduce."""
        return self.total + self.old_stress


def assemble_residual(previous: StateSlice, perturbation: Perturbation) -> Residual:
    """
    Every time derivative is analytic at the slice: ∂_t∇Ψ_q comes from the level-q equation and
    cancels against its own flux, so only the perturbation's terms remain.
    """
    grad_w = perturbation.gradient
    perp_w = perp_from_gradient(grad_w)
    zero = SpectralField.zeros(previous.grid, (3,))

    transport = perturbation.gradient_rate
    nash = zero
    if not previous.grad_psi.is_zero() and not perturbation.is_zero:
        transport = transport + quadratic_flux(grad_w, previous.velocity)
        nash = quadratic_flux(previous.grad_psi, perp_w)
    if perturbation.is_zero:
        quadratic = uncut = zero
    else:
        quadratic = quadratic_flux(grad_w, perp_w)
        grad_uncut = gradient(perturbation.potential)
        uncut = quadratic_flux(grad_uncut, perp_from_gradient(grad_uncut))
    return Residual(
        time=perturbation.time,
        transport=transport,
        nash=nash,
        quadratic=quadratic,
        old_stress=hdiv(previous.stress),
        uncut_flux=uncut,
    )


@dataclass(frozen=True, eq=False)
class StressExtraction:
    pressure: SpectralField
    stress: SpectralField
    # curl(L²Q_H) by the product rule, and the remainder X split between D and ∇̄⊥
    known_curl: SpectralField
    remainder: SpectralField
    reconstruction_error: float
    norms: dict[str, float] = field(default_factory=dict)


def _high_pass(f: SpectralField, threshold: float) -> SpectralField:
    mask = np.broadcast_to(f.grid.horizontal_modulus_squared > threshold ** 2, f.grid.shape)
    return f.with_coeffs(f.coeffs * mask)


def extract_stress(
    residual: Residual,
    previous: StateSlice,
    cutoff: CutoffProfile,
    lam_next: int,
    tolerance: float = RECONSTRUCTION_TOL,
) -> StressExtraction:
    """
    Known curl part curl(L²Q_H), Q_H = (−Δ)^{-1}curl H, then the remainder X = T+N+O − curl(L²Q_H):
    M̊_{q+1} = D(p_grad_bar X) and Q_{q+1} = Q_q + L²Q_H + (0, 0, −inv_gradperp X).
    """
    grid = previous.grid
    source = residual.source
    values, derivs = cutoff.sampled(grid)
    square, square_derivs = values ** 2, 2.0 * values * derivs

    if residual.uncut_flux.is_zero():
        q_h = SpectralField.zeros(grid, (3,))
    else:
        q_h = inverse_neg_laplacian(curl(residual.uncut_flux))
    if cutoff.unit:
        known = curl(q_h)
        cut_q = q_h
    else:
        known = profiled_curl(q_h, square, square_derivs)
        cut_q = multiply_z_profile(q_h, square)

    remainder = source - known
    stress = inverse_div_D(p_grad_bar(remainder))
    h = inv_gradperp(remainder)
    vertical = SpectralField.stack([SpectralField.zeros(grid), SpectralField.zeros(grid), -h])
    pressure = previous.pressure + cut_q + vertical

    rebuilt = known + curl(vertical) + hdiv(stress)
    scale = c0_norm(source)
    error = c0_norm(rebuilt - source) / scale if scale else c0_norm(rebuilt)
    if error > tolerance:
        raise DecompositionError(f"curl ΔQ + ∇̄·M̊ misses T+N+O by {error:.3e} (tolerance {tolerance:.1e})")

    threshold = lam_next * HIGH_FREQUENCY_FRACTION
    high = _high_pass(residual.quadratic, threshold)
    norms = {
        "transport": c0_norm(residual.transport),
        "nash": c0_norm(residual.nash),
        "oscillation_high": c0_norm(high),
        "oscillation_low": c0_norm(residual.quadratic - high + residual.old_stress),
        "cutoff_lower_order": c0_norm(cutoff_lower_order(q_h, square_derivs)) if not cutoff.unit else 0.0,
        "gradient_remainder": c0_norm(multiply_z_profile(p_grad3(residual.uncut_flux), square)) if not residual.uncut_flux.is_zero() else 0.0,
        "residual": c0_norm(residual.total),
    }
    logger.debug("stress.extracted", t=residual.time, error=error, stress_c0=c0_norm(stress))
    return StressExtraction(
        pressure=pressure,
        stress=stress,
        known_curl=known,
        remainder=remainder,
        reconstruction_error=error,
        norms=norms,
    )
