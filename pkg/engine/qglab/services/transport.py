"""Characteristic flow maps, z-mollification and transport of stresses and phases along ∇̄⊥Ψ_q."""
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.fft as sfft
import structlog
from scipy.ndimage import convolve1d

from ..core.errors import MarginError, TimeWindowError
from .blocks import CutoffProfile, smoothstep5
from .exact_modes import RationalDirection
from .spectral import TWO_PI, GridSpec, SpectralField, c0_norm, c1_norm, gradient

logger = structlog.get_logger(__name__)

MIN_STEPS = 8
WINDOW_SLACK = 1e-12
INTERPOLATION_RTOL = 1e-14
SUPPORT_RTOL = 1e-10

Velocity = Union[SpectralField, Callable[[float], SpectralField]]


# --- z-mollification -------------------------------------------------------------------

@dataclass(frozen=True)
class MollifierSpec:
    width: float

    def weights(self, grid: GridSpec) -> np.ndarray:
        """Kernel 1 − S5(|s|/ℓ) at grid offsets |j·dz| < ℓ, normalized to unit discrete mass."""
        if self.width <= grid.dz:
            return np.ones(1)
        reach = int(math.ceil(self.width / grid.dz)) - 1
        offsets = np.arange(-reach, reach + 1) * grid.dz
        kernel = 1.0 - smoothstep5(np.abs(offsets) / self.width)
        return kernel / kernel.sum()


def z_support(field: SpectralField) -> tuple[float, float] | None:
    """Smallest and largest z carrying samples above SUPPORT_RTOL of the maximum."""
    if field.is_zero():
        return None
    values = np.abs(field.samples())
    profile = values.reshape((-1, field.grid.nz)).max(axis=0)
    active = np.nonzero(profile > SUPPORT_RTOL * profile.max())[0]
    z = field.grid.coordinates()[2]
    return float(z[active[0]]), float(z[active[-1]])


def mollify_z(stress: SpectralField, spec: MollifierSpec, cutoff: CutoffProfile | None = None) -> SpectralField:
    """Convolution in z only, periodic; the stress must sit ℓ inside the cutoff's support."""
    if stress.is_zero():
        return stress
    if cutoff is not None and not cutoff.unit:
        support = z_support(stress)
        lower = cutoff.support_start + spec.width
        if support is not None and (support[0] < lower or support[1] > TWO_PI - lower):
            raise MarginError(
                f"Stress z-support [{support[0]:.4f}, {support[1]:.4f}] is not inside "
                f"[{lower:.4f}, {TWO_PI - lower:.4f}] (ℓ={spec.width:.4g})"
            )
    weights = spec.weights(stress.grid)
    if weights.size == 1:
        return stress
    smoothed = convolve1d(stress.samples(), weights, axis=-1, mode="wrap")
    return SpectralField.from_samples(stress.grid, smoothed, real=stress.real)


# --- off-grid evaluation ---------------------------------------------------------------

class HorizontalInterpolator:
    """Trigonometric interpolation in (x, y) on each z-slice over the field's nonzero horizontal band."""

    def __init__(self, field: SpectralField):
        grid = field.grid
        self.grid = grid
        self.real = field.real
        self.components = field.shape
        bx, by, _ = field.band(INTERPOLATION_RTOL)
        kx = grid.wavenumbers[0].ravel()
        ky = grid.wavenumbers[1].ravel()
        sel_x = np.nonzero(np.abs(kx) <= bx)[0]
        sel_y = np.nonzero(np.abs(ky) <= by)[0]
        slab = sfft.ifft(field.coeffs, axis=-1) * grid.nz
        self._coeffs = slab[..., sel_x[:, None], sel_y[None, :], :]
        self._kx = kx[sel_x]
        self._ky = ky[sel_y]

    def __call__(self, x: np.ndarray, y: np.ndarray, derivative: int | None = None) -> np.ndarray:
        """Values at positions x, y given per grid point (shape N_x, N_y, N_z); optional ∂_x (0) or ∂_y (1)."""
        coeffs = self._coeffs
        if derivative == 0:
            coeffs = coeffs * (1j * self._kx)[:, None, None]
        elif derivative == 1:
            coeffs = coeffs * (1j * self._ky)[None, :, None]
        out = np.empty(self.components + x.shape, dtype=complex)
        for j in range(x.shape[-1]):
            ex = np.exp(1j * x[..., j, None] * self._kx)
            ey = np.exp(1j * y[..., j, None] * self._ky)
            partial = np.einsum("pqa,...ab->...pqb", ex, coeffs[..., j])
            out[..., j] = np.einsum("...pqb,pqb->...pq", partial, ey)
        return out.real if self.real else out


# --- flow maps -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlowMap:
    grid: GridSpec
    anchor_time: float
    time: float
    displacement: np.ndarray
    jacobian: np.ndarray
    steps: int = 0

    @classmethod
    def identity(cls, grid: GridSpec, anchor_time: float, time: float) -> "FlowMap":
        jac = np.zeros((2, 2) + grid.shape)
        jac[0, 0] = jac[1, 1] = 1.0
        return cls(grid, anchor_time, time, np.zeros((3,) + grid.shape), jac)

    @property
    def is_identity(self) -> bool:
        return not np.any(self.displacement)

    def positions(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x, y, z = self.grid.mesh()
        d = self.displacement
        return x + d[0], y + d[1], z + d[2]

    def det_error(self) -> float:
        j = self.jacobian
        det = j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0]
        return float(np.max(np.abs(det - 1.0)))

    def jacobian_deviation(self) -> float:
        """sup_x |D̄Φ − Id| (Frobenius)."""
        dev = self.jacobian.copy()
        dev[0, 0] -= 1.0
        dev[1, 1] -= 1.0
        return float(np.max(np.sqrt(np.sum(dev ** 2, axis=(0, 1)))))


def _velocity_at(velocity: Velocity, time: float) -> SpectralField:
    return velocity(time) if callable(velocity) else velocity


def _horizontal_jacobian_norm(u: SpectralField) -> float:
    grad = gradient(u[:2]).samples()[:, :2]
    return float(np.max(np.sqrt(np.sum(grad ** 2, axis=(0, 1)))))


def advance_flow(velocity: Velocity, anchor_time: float, t: float, mu: float) -> FlowMap:
    """
    Φ_l(·, t): integrate ẋ = u(x, s) backward from s = t to the anchor with RK4, carrying the
    horizontal Jacobian along. velocity is a field or a callable time → field (third component ignored).
    """
    if abs(t - anchor_time) > 3.0 / (4.0 * mu) * (1.0 + WINDOW_SLACK):
        raise TimeWindowError(f"t={t} lies outside the window of anchor {anchor_time} (half-width {3.0 / (4.0 * mu)})")
    u_now = _velocity_at(velocity, t)
    grid = u_now.grid
    if t == anchor_time:
        return FlowMap.identity(grid, anchor_time, t)
    u_anchor = _velocity_at(velocity, anchor_time)
    if u_now.is_zero() and u_anchor.is_zero():
        return FlowMap.identity(grid, anchor_time, t)

    c1 = max(c1_norm(u_now[:2]), c1_norm(u_anchor[:2]))
    h_max = 1.0 / (16.0 * mu * c1 + 16.0)
    span = anchor_time - t
    steps = max(MIN_STEPS, int(math.ceil(abs(span) / h_max)))
    h = span / steps

    steady = None if callable(velocity) else HorizontalInterpolator(u_now[:2])
    cache: dict[float, HorizontalInterpolator] = {}

    def interpolator(s: float) -> HorizontalInterpolator:
        if steady is not None:
            return steady
        if s not in cache:
            cache[s] = HorizontalInterpolator(_velocity_at(velocity, s)[:2])
        return cache[s]

    def rhs(s: float, x: np.ndarray, y: np.ndarray, jac: np.ndarray):
        interp = interpolator(s)
        vel = interp(x, y)
        du = np.stack([interp(x, y, derivative=0), interp(x, y, derivative=1)], axis=1)
        return vel[0], vel[1], np.einsum("ik...,kj...->ij...", du, jac)

    x0, y0, _ = grid.mesh()
    x, y = x0.copy(), y0.copy()
    jac = FlowMap.identity(grid, anchor_time, t).jacobian
    s = t
    for _ in range(steps):
        k1 = rhs(s, x, y, jac)
        k2 = rhs(s + h / 2, x + h / 2 * k1[0], y + h / 2 * k1[1], jac + h / 2 * k1[2])
        k3 = rhs(s + h / 2, x + h / 2 * k2[0], y + h / 2 * k2[1], jac + h / 2 * k2[2])
        k4 = rhs(s + h, x + h * k3[0], y + h * k3[1], jac + h * k3[2])
        x = x + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y = y + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        jac = jac + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        s += h
        cache = {key: value for key, value in cache.items() if key == s}

    displacement = np.stack([x - x0, y - y0, np.zeros_like(x)])
    flow = FlowMap(grid, anchor_time, t, displacement, jac, steps)
    logger.debug("flow.advanced", anchor=anchor_time, t=t, steps=steps, det_error=flow.det_error())
    return flow


def displacement_bound(velocity: SpectralField, mu: float) -> float:
    """(Δt‖D̄u‖)e^{Δt‖D̄u‖} with Δt = 3/(4μ)."""
    growth = 3.0 / (4.0 * mu) * _horizontal_jacobian_norm(velocity)
    return growth * math.exp(growth)


# --- transported quantities ------------------------------------------------------------

def transport_stress(stress: SpectralField, flow: FlowMap) -> SpectralField:
    """M(Φ_l(x, t)) by trigonometric interpolation of the anchored stress."""
    if stress.grid != flow.grid:
        raise ValueError("Stress and flow map must share a grid")
    if flow.is_identity or stress.is_zero():
        return stress
    x, y, _ = flow.positions()
    values = HorizontalInterpolator(stress)(x, y)
    return SpectralField.from_samples(stress.grid, values, real=stress.real)


def transported_phase(flow: FlowMap, k: RationalDirection, lam: int) -> SpectralField:
    """e^{iλk·Φ_l}; complex, unimodular."""
    n = k.scaled(lam)
    x, y, z = flow.positions()
    phase = np.exp(1j * (n[0] * x + n[1] * y + n[2] * z))
    return SpectralField.from_samples(flow.grid, phase, real=False)


def material_derivative_residual(
    stress: SpectralField, velocity: SpectralField, anchor_time: float, t: float, mu: float, dt: float
) -> float:
    """‖(M_l(t+dt) − M_l(t−dt))/(2dt) + u·∇̄M_l(t)‖_∞ for a steady velocity u."""
    ahead = transport_stress(stress, advance_flow(velocity, anchor_time, t + dt, mu))
    behind = transport_stress(stress, advance_flow(velocity, anchor_time, t - dt, mu))
    current = transport_stress(stress, advance_flow(velocity, anchor_time, t, mu))
    grad = gradient(current).samples()
    u = velocity.samples()
    advective = grad[..., 0, :, :, :] * u[0] + grad[..., 1, :, :, :] * u[1]
    rate = (ahead.samples() - behind.samples()) / (2.0 * dt)
    residual = SpectralField.from_samples(stress.grid, rate + advective, real=stress.real)
    return c0_norm(residual)
