"""Assembly of the perturbation ∇(L_{q+1}W_{q+1}) and its time derivative at one time slice."""
from dataclasses import dataclass

import numpy as np
import structlog

from ..blocks import profiled_gradient
from ..spectral import SpectralField, gradient, inner_product, mode_potential, multiply_z_profile, real_part_sum
from ..transport import transported_phase
from .amplitudes import AmplitudeSet
from .context import StageContext

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Perturbation:
    time: float
    # uncut W and ∂_tW
    potential: SpectralField
    potential_rate: SpectralField
    # L·W, ∇(LW) and ∂_t∇(LW)
    cut_potential: SpectralField
    gradient: SpectralField
    gradient_rate: SpectralField
    amplitudes: AmplitudeSet

    @property
    def is_zero(self) -> bool:
        return self.potential.is_zero()

    def energy(self) -> float:
        """∫|∇(LW)|²."""
        return inner_product(self.gradient, self.gradient)


def _advect(g: SpectralField, velocity: SpectralField) -> SpectralField:
    """u·∇̄g on samples."""
    grad = gradient(g).samples()
    u = velocity.samples()
    return SpectralField.from_samples(g.grid, grad[0] * u[0] + grad[1] * u[1], real=False)


def build_perturbation(context: StageContext, amplitudes: AmplitudeSet) -> Perturbation:
    """
    W = Σ_{l,k∈Ω_j⁺} 2Re φ_kl with ∇φ_kl = p_grad_mode(χ_l a_kl e^{iλk·Φ_l} ik); the cutoff L is applied
    to W on samples and differentiated by the product rule. ∂_tW uses χ_l′ and D_{t,q}(a e^{iλk·Φ}) = 0.
    """
    grid = context.grid
    lam = context.params.lam_next
    t = amplitudes.time
    velocity = None if context.state.trivial else context.state.velocity(t)
    if velocity is not None and velocity.is_zero():
        velocity = None

    w = SpectralField.zeros(grid)
    w_rate = SpectralField.zeros(grid)
    for anchor in amplitudes.anchors:
        for i, k in enumerate(anchor.family.positive):
            phase = transported_phase(anchor.flow, k, lam)
            wave = SpectralField.from_samples(grid, np.sqrt(anchor.squares[i]) * phase.samples(), real=False)
            w = w + real_part_sum(mode_potential(anchor.chi * wave, lam, k))
            rate = anchor.chi_rate * wave
            if velocity is not None:
                rate = rate - anchor.chi * _advect(wave, velocity)
            w_rate = w_rate + real_part_sum(mode_potential(rate, lam, k))

    values, _ = context.cutoff.sampled(grid)
    perturbation = Perturbation(
        time=t,
        potential=w,
        potential_rate=w_rate,
        cut_potential=w if context.cutoff.unit else multiply_z_profile(w, values),
        gradient=profiled_gradient(w, context.cutoff),
        gradient_rate=profiled_gradient(w_rate, context.cutoff),
        amplitudes=amplitudes,
    )
    logger.debug("perturbation.built", t=t, anchors=len(amplitudes.anchors), zero=perturbation.is_zero)
    return perturbation


def expected_energy(context: StageContext, amplitudes: AmplitudeSet) -> float:
    """Σ_l χ_l²ρ_l ∫L²."""
    return sum(a.chi ** 2 * a.rho for a in amplitudes.anchors) * context.cutoff_integral


def family_shell(context: StageContext) -> tuple[float, float]:
    """Horizontal frequency shell occupied by the waves: λ(|k̄| ∓ 1/10) over both families."""
    lam = context.params.lam_next
    moduli = []
    for l in (1, 2):
        for k in context.family(l).positive:
            d = k.as_array()
            moduli.append(float(np.hypot(d[0], d[1])))
    return lam * (min(moduli) - 0.1), lam * (max(moduli) + 0.1)
