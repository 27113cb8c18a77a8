"""Wave amplitudes a_kl from the geometric decomposition of ρ_l M_j − ½M̊_{q,l}."""
from dataclasses import dataclass

import numpy as np
import structlog

from ...core.errors import EpsilonBallError, PlanarityError
from ..exact_modes import DirectionFamily, RationalDirection, coordinate_fields, mode_matrix
from ..spectral import SpectralField
from ..transport import FlowMap, transport_stress
from .context import StageContext

logger = structlog.get_logger(__name__)

PLANAR_RTOL = 1e-12
SQUARE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class AnchorAmplitudes:
    l: int
    rho: float
    chi: float
    chi_rate: float
    family: DirectionFamily
    flow: FlowMap
    stress: SpectralField
    # M_{q,l} samples, shape (3, 3) + grid
    target: np.ndarray
    # c²_{j,k} samples over the positive half of the family, shape (n⁺,) + grid
    squares: np.ndarray

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(self.squares)

    def amplitude(self, k: RationalDirection) -> np.ndarray:
        for i, p in enumerate(self.family.positive):
            if k == p or k == -p:
                return np.sqrt(self.squares[i])
        raise KeyError(str(k))

    def flux(self) -> np.ndarray:
        """½Σ_{k∈Ω_j} a_kl² k⊗k̄⊥ on samples."""
        out = np.zeros_like(self.target)
        for i, k in enumerate(self.family.positive):
            out += np.einsum("ij,...->ij...", mode_matrix(k).to_array(), self.squares[i])
        return out


@dataclass(frozen=True, eq=False)
class AmplitudeSet:
    time: float
    anchors: tuple[AnchorAmplitudes, ...]

    @property
    def is_zero(self) -> bool:
        return not self.anchors

    def low_frequency_residual(self) -> float:
        """‖½Σ_l χ_l²Σ_k a_kl² k⊗k̄⊥ − Σ_l χ_l² M_{q,l}‖_∞ (pointwise Frobenius)."""
        if not self.anchors:
            return 0.0
        total = sum(a.chi ** 2 * (a.flux() - a.target) for a in self.anchors)
        return float(np.max(np.sqrt(np.sum(total ** 2, axis=(0, 1)))))


def amplitude_squares(family: DirectionFamily, rho: float, stress: np.ndarray, planar: bool) -> np.ndarray:
    """
    c²_{j,k} solving ½Σ c² k⊗k̄⊥ = ρM_j − ½M̊ pointwise. Round-off negatives are
    clipped to zero; anything below −SQUARE_RTOL·ρ means the stress left the ε-ball.
    """
    base = np.array([float(v) for v in family.coordinates_of(family.base_matrix)])
    coords = rho * base.reshape((-1, 1, 1, 1)) - 0.5 * coordinate_fields(stress, planar)
    squares = np.einsum("ki,i...->k...", family.coefficient_operator(), coords)
    lowest = float(np.min(squares)) if squares.size else 0.0
    if lowest < -SQUARE_RTOL * rho:
        raise EpsilonBallError(
            f"Amplitude square {lowest:.4e} is negative at ρ = {rho:.4e}; the stress is outside the ε_{family.index} ball"
        )
    return np.maximum(squares, 0.0)


def make_amplitudes(context: StageContext, t: float) -> AmplitudeSet:
    """a_kl at time t for every active l with ρ_l > 0; odd l use family 1, even l family 2."""
    anchors = []
    for l in context.partition.active(t):
        chi = context.partition.chi_l(l, t)
        rho = context.rho_anchor(l)
        if rho == 0.0 or chi == 0.0:
            continue
        family = context.family(l)
        flow = context.flow(l, t)
        stress = transport_stress(context.anchored_stress(l), flow)
        samples = stress.samples()
        if context.planar and np.max(np.abs(samples[2])) > PLANAR_RTOL * max(np.max(np.abs(samples)), 1e-300):
            raise PlanarityError(f"Stress at anchor {l} has a nonzero third row")

        epsilon = float(family.ball_radius)
        offset = float(np.max(np.abs(coordinate_fields(0.5 * samples / rho, context.planar)))) if not stress.is_zero() else 0.0
        if offset >= epsilon:
            raise EpsilonBallError(
                f"‖½M̊_(q,{l})/ρ_{l}‖ = {offset:.4e} is not below ε_{family.index} = {epsilon:.4e}; decrease η"
            )
        target = rho * family.base_matrix.to_array().reshape((3, 3, 1, 1, 1)) - 0.5 * samples
        anchors.append(
            AnchorAmplitudes(
                l=l,
                rho=rho,
                chi=chi,
                chi_rate=context.partition.chi_l_derivative(l, t),
                family=family,
                flow=flow,
                stress=stress,
                target=target,
                squares=amplitude_squares(family, rho, samples, context.planar),
            )
        )
    logger.debug("amplitudes.built", t=t, anchors=[a.l for a in anchors])
    return AmplitudeSet(time=t, anchors=tuple(anchors))
