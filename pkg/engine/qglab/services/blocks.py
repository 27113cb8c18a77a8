"""Stationary building blocks V, their pressures, the z-cutoff L_{q+1} and the cutoff factorization."""
import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np
import structlog

from ..core.errors import BandOverflowError, EmptyPlateauError, RealityError
from .exact_modes import RationalDirection
from .spectral import (
    TWO_PI,
    GridSpec,
    SpectralField,
    c0_norm,
    curl,
    divergence,
    gradient,
    gradperp_bar,
    hdiv,
    inverse_neg_laplacian,
    laplacian,
    multiply_z_profile,
    outer_product,
)

logger = structlog.get_logger(__name__)

REALITY_ATOL = 1e-14
# ‖Q‖_∞ / ‖(∇V)²‖_∞ regression bound for blocks drawn from one family at one shell
PRESSURE_BOUND = 10.0


def smoothstep5(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)


def smoothstep5_derivative(s: np.ndarray) -> np.ndarray:
    inside = (s > 0.0) & (s < 1.0)
    return np.where(inside, 30.0 * s ** 2 * (1.0 - s) ** 2, 0.0)


@dataclass(frozen=True, eq=False)
class StationaryBlock:
    lam: int
    directions: tuple[RationalDirection, ...]
    amplitudes: tuple[complex, ...]
    potential: SpectralField

    @property
    def grid(self) -> GridSpec:
        return self.potential.grid

    def gradient(self) -> SpectralField:
        return gradient(self.potential)

    def perp(self) -> SpectralField:
        return gradperp_bar(self.potential)

    def gradient_square_max(self) -> float:
        """‖(∇V)²‖_∞ = sup |∇V|²."""
        return c0_norm(self.gradient()) ** 2


def make_block(grid: GridSpec, lam: int, directions: Sequence[RationalDirection], amplitudes: Sequence[complex]) -> StationaryBlock:
    """V = Σ_k (1/λ) c_k e^{iλk·x} over a negation-closed direction set with c_{−k} = conj(c_k)."""
    directions = tuple(directions)
    amplitudes = tuple(complex(c) for c in amplitudes)
    if len(directions) != len(amplitudes):
        raise ValueError(f"{len(directions)} directions but {len(amplitudes)} amplitudes")
    lookup = dict(zip(directions, amplitudes))
    for k, c in lookup.items():
        if -k not in lookup:
            raise RealityError(f"Direction set is not closed under negation: missing {-k}")
        partner = lookup[-k]
        if abs(partner - c.conjugate()) > REALITY_ATOL * max(1.0, abs(c)):
            raise RealityError(f"Amplitudes at {k} and {-k} are not complex conjugates")

    coeffs = np.zeros(grid.shape, dtype=complex)
    for k, c in lookup.items():
        n = k.scaled(lam)
        if not grid.fits(n):
            raise BandOverflowError(f"λk = {n} exceeds the retained band {grid.retained_max}")
        coeffs[tuple(int(ni) % size for ni, size in zip(n, grid.shape))] += c / lam
    potential = SpectralField(grid, coeffs, True)
    logger.debug("block.built", lam=lam, modes=len(lookup))
    return StationaryBlock(lam=lam, directions=tuple(lookup), amplitudes=tuple(lookup.values()), potential=potential)


def eigenfunction_residual(block: StationaryBlock) -> float:
    """‖ΔV + λ²V‖_∞ / (λ²‖V‖_∞)."""
    v = block.potential
    scale = block.lam ** 2 * c0_norm(v)
    if scale == 0.0:
        return 0.0
    return c0_norm(laplacian(v) + block.lam ** 2 * v) / scale


def quadratic_flux(grad: SpectralField, perp: SpectralField) -> SpectralField:
    """∇̄·(∇P ⊗ ∇̄⊥P) from the gradient and horizontal perpendicular gradient of P."""
    return hdiv(outer_product(grad, perp))


def block_flux(block: StationaryBlock) -> SpectralField:
    return quadratic_flux(block.gradient(), block.perp())


def block_pressure(block: StationaryBlock) -> SpectralField:
    """Q = (−Δ)^{-1} curl ∇̄·(∇V ⊗ ∇̄⊥V)."""
    if block.potential.is_zero():
        return SpectralField.zeros(block.grid, (3,))
    return inverse_neg_laplacian(curl(block_flux(block)))


def _normalizer(block: StationaryBlock, power: int) -> float:
    return block.lam ** power * block.gradient_square_max()


def stationarity_residual(block: StationaryBlock, pressure: SpectralField) -> float:
    """‖∇̄·(∇V⊗∇̄⊥V) − curl Q‖_∞ / (λ‖(∇V)²‖_∞)."""
    norm = _normalizer(block, 1)
    if norm == 0.0:
        return 0.0
    return c0_norm(block_flux(block) - curl(pressure)) / norm


def pressure_ratio(block: StationaryBlock, pressure: SpectralField) -> float:
    gsq = block.gradient_square_max()
    return c0_norm(pressure) / gsq if gsq else 0.0


def verify_algebraic_identity(block: StationaryBlock) -> float:
    """‖∇·∇̄·(∇V⊗∇̄⊥V)‖_∞ normalized by λ³‖(∇V)²‖_∞."""
    norm = _normalizer(block, 3)
    if norm == 0.0:
        return 0.0
    return c0_norm(divergence(block_flux(block))) / norm


def block_mean_flux(block: StationaryBlock) -> np.ndarray:
    """Zero-frequency coefficient of ∇V ⊗ ∇̄⊥V."""
    if block.potential.is_zero():
        return np.zeros((3, 3))
    return outer_product(block.gradient(), block.perp()).mean().real


def analytic_mean_flux(block: StationaryBlock) -> np.ndarray:
    """Σ_k |c_k|² k ⊗ k̄⊥."""
    out = np.zeros((3, 3))
    for k, c in zip(block.directions, block.amplitudes):
        d = k.as_array()
        out += abs(c) ** 2 * np.outer(d, [-d[1], d[0], 0.0])
    return out


def quadrature_mean_flux(block: StationaryBlock) -> np.ndarray:
    """Grid average of the physical-space product; exact when the grid resolves the product band."""
    g = block.gradient().samples()
    p = block.perp().samples()
    return np.einsum("iabc,jabc->ij", g, p) / block.grid.size


class WallScales(Protocol):
    def l(self, q: int) -> int: ...


@dataclass(frozen=True)
class CutoffProfile:
    """
    z-cutoff equal to 1 on [a1, 2π − a1] and 0 outside [a0, 2π − a0], with quintic
    smoothstep ramps; a1 = 1/l_{q+1}, a0 = 1/l_{q+2}. The unit profile is L ≡ 1.
    """

    plateau_start: float
    support_start: float
    l_inner: int
    l_outer: int
    unit: bool = False

    @classmethod
    def unit_profile(cls) -> "CutoffProfile":
        return cls(0.0, 0.0, 1, 1, unit=True)

    @property
    def ramp_width(self) -> float:
        return self.plateau_start - self.support_start

    @property
    def slope_bound(self) -> float:
        return 4.0 * self.l_inner

    def value(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.unit:
            return np.ones_like(z)
        dist = np.minimum(z, TWO_PI - z)
        return smoothstep5((dist - self.support_start) / self.ramp_width)

    def derivative(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.unit:
            return np.zeros_like(z)
        left = z <= math.pi
        dist = np.where(left, z, TWO_PI - z)
        slope = smoothstep5_derivative((dist - self.support_start) / self.ramp_width) / self.ramp_width
        return np.where(left, slope, -slope)

    def sampled(self, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
        z = grid.coordinates()[2]
        return self.value(z), self.derivative(z)

    def square_integral(self, grid: GridSpec) -> float:
        """∫_{T³} L² by the grid rule used for every other integral."""
        values, _ = self.sampled(grid)
        return TWO_PI ** 2 * grid.dz * float(np.sum(values ** 2))

    def plateau_mask(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.unit:
            return np.ones_like(z, dtype=bool)
        return (z >= self.plateau_start) & (z <= TWO_PI - self.plateau_start)


def make_cutoff(schedule: WallScales, q: int) -> CutoffProfile:
    a1 = 1.0 / schedule.l(q + 1)
    a0 = 1.0 / schedule.l(q + 2)
    if not (a1 > a0 > 0.0) or a1 >= math.pi:
        raise EmptyPlateauError(f"Wall distances 1/l_(q+1)={a1}, 1/l_(q+2)={a0} leave no plateau")
    return CutoffProfile(a1, a0, schedule.l(q + 1), schedule.l(q + 2))


def profiled_gradient(w: SpectralField, profile: CutoffProfile) -> SpectralField:
    """∇(L w) = L∇w + w L′ e_z, with L applied on samples."""
    if profile.unit:
        return gradient(w)
    values, derivs = profile.sampled(w.grid)
    out = gradient(w).samples() * values
    out[2] = out[2] + w.samples() * derivs
    return SpectralField.from_samples(w.grid, out, real=w.real)


def perp_from_gradient(grad: SpectralField) -> SpectralField:
    """∇̄⊥P = (−∂_y P, ∂_x P, 0) read off ∇P."""
    c = grad.coeffs
    return grad.with_coeffs(np.stack([-c[1], c[0], np.zeros_like(c[0])]))


def profiled_curl(q: SpectralField, values: np.ndarray, derivs: np.ndarray) -> SpectralField:
    """curl(f Q) = f curl Q + (−f′Q², f′Q¹, 0) for a z-profile f with derivative f′."""
    out = curl(q).samples() * values
    qs = q.samples()
    out[0] = out[0] - derivs * qs[1]
    out[1] = out[1] + derivs * qs[0]
    return SpectralField.from_samples(q.grid, out, real=q.real)


def cutoff_lower_order(q: SpectralField, square_derivs: np.ndarray) -> SpectralField:
    """(Q²∂_z(L²), −Q¹∂_z(L²), 0)."""
    qs = q.samples()
    out = np.stack([qs[1] * square_derivs, -qs[0] * square_derivs, np.zeros_like(qs[0])])
    return SpectralField.from_samples(q.grid, out, real=q.real)


def verify_cutoff_factorization(block: StationaryBlock, pressure: SpectralField, cutoff: CutoffProfile) -> tuple[float, float]:
    """
    (r₁, r₂) normalized by λ‖(∇V)²‖_∞:
      r₁ = ‖∇̄·(∇(LV)⊗∇̄⊥(LV)) − L²∇̄·(∇V⊗∇̄⊥V)‖_∞
      r₂ = ‖L²∇̄·(∇V⊗∇̄⊥V) − curl(L²Q) − (Q²∂_z(L²), −Q¹∂_z(L²), 0)‖_∞
    """
    if pressure.grid != block.grid:
        raise ValueError("Block and pressure must share a grid")
    norm = _normalizer(block, 1)
    if norm == 0.0:
        return 0.0, 0.0
    values, derivs = cutoff.sampled(block.grid)
    square, square_derivs = values ** 2, 2.0 * values * derivs
    flux = block_flux(block)
    cut_flux = multiply_z_profile(flux, square)

    grad_lv = profiled_gradient(block.potential, cutoff)
    r1 = c0_norm(quadratic_flux(grad_lv, perp_from_gradient(grad_lv)) - cut_flux) / norm
    r2 = c0_norm(cut_flux - profiled_curl(pressure, square, square_derivs) - cutoff_lower_order(pressure, square_derivs)) / norm
    return r1, r2


def wall_collar(grid: GridSpec, cutoff: CutoffProfile) -> np.ndarray:
    """z samples outside the support of L: z ≤ a0 or z ≥ 2π − a0. Empty for the unit profile."""
    z = grid.coordinates()[2]
    if cutoff.unit:
        return np.zeros_like(z, dtype=bool)
    return (z <= cutoff.support_start) | (z >= TWO_PI - cutoff.support_start)


def boundary_trace(pressure: SpectralField, cutoff: CutoffProfile) -> float:
    """
    Largest entry of curl(L²Q) minus the lower-order term over every z sample of
    both wall collars. Evaluated on samples, so L = L′ = 0 there gives exact zeros.
    """
    collar = wall_collar(pressure.grid, cutoff)
    if not collar.any():
        return 0.0
    values, derivs = cutoff.sampled(pressure.grid)
    square, square_derivs = values ** 2, 2.0 * values * derivs
    qs = pressure.samples()
    field = curl(pressure).samples() * square
    field[0] = field[0] - 2.0 * square_derivs * qs[1]
    field[1] = field[1] + 2.0 * square_derivs * qs[0]
    return float(np.max(np.abs(field[..., collar])))
