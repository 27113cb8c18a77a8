"""
Band-limited periodic fields on T³ = [0, 2π)³ and the Fourier multipliers acting on them.

Coefficients are stored unscaled by the transform length: ĉ = fftn(samples) / N, so ĉ(0)
is the mean and a unit-amplitude wave e^{ik·x} has coefficient 1 at k. Component axes
come first, spatial axes last: shape = components + (N_x, N_y, N_z). For matrix fields
M[i, j], the horizontal divergence acts on the last component index,
(∇̄·M)_i = ∂_1 M_i1 + ∂_2 M_i2.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Sequence

import numpy as np
import scipy.fft as sfft

from ..config import get_settings
from ..core.errors import BandOverflowError, GridMismatchError, NotAGradientError, SliceMeanError
from .exact_modes import RationalDirection

DealiasRule = Literal["two-thirds", "slicewise"]
TWO_PI = 2.0 * math.pi
VOLUME = TWO_PI ** 3
MEAN_RTOL = 1e-10
GRADIENT_RTOL = 1e-10
_AXES = (-3, -2, -1)


def _workers() -> int:
    return get_settings().threads


def _fft(values: np.ndarray) -> np.ndarray:
    return sfft.fftn(values, axes=_AXES, workers=_workers())


def _ifft(values: np.ndarray) -> np.ndarray:
    return sfft.ifftn(values, axes=_AXES, workers=_workers())


def _safe_reciprocal(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values, dtype=float)
    nonzero = values != 0
    out[nonzero] = 1.0 / values[nonzero]
    return out


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform periodic grid. Dealias rules:
      two-thirds: products padded by 3/2 on every axis, retained |n_i| ≤ N_i/3.
      slicewise:  products padded horizontally only; z samples multiply pointwise,
                  so sample-defined z-profiles (cutoffs) stay exact on the grid.
    """

    nx: int
    ny: int
    nz: int
    dealias: DealiasRule = "two-thirds"

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if int(n) != n or n <= 0 or n % 2:
                raise ValueError(f"{name} must be a positive even integer, got {n}")
        if self.dealias not in ("two-thirds", "slicewise"):
            raise ValueError(f"Unknown dealias rule: {self.dealias}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def size(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def retained_max(self) -> tuple[int, int, int]:
        kz = self.nz // 3 if self.dealias == "two-thirds" else self.nz // 2
        return (self.nx // 3, self.ny // 3, kz)

    @property
    def dz(self) -> float:
        return TWO_PI / self.nz

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        kx = sfft.fftfreq(self.nx, 1.0 / self.nx).reshape(-1, 1, 1)
        ky = sfft.fftfreq(self.ny, 1.0 / self.ny).reshape(1, -1, 1)
        kz = sfft.fftfreq(self.nz, 1.0 / self.nz).reshape(1, 1, -1)
        return kx, ky, kz

    @cached_property
    def horizontal_modulus_squared(self) -> np.ndarray:
        kx, ky, _ = self.wavenumbers
        return kx ** 2 + ky ** 2

    @cached_property
    def modulus_squared(self) -> np.ndarray:
        kx, ky, kz = self.wavenumbers
        return kx ** 2 + ky ** 2 + kz ** 2

    @cached_property
    def inverse_modulus_squared(self) -> np.ndarray:
        return _safe_reciprocal(self.modulus_squared)

    @cached_property
    def inverse_horizontal_modulus_squared(self) -> np.ndarray:
        return _safe_reciprocal(self.horizontal_modulus_squared)

    @cached_property
    def retained_mask(self) -> np.ndarray:
        kx, ky, kz = self.wavenumbers
        mx, my, mz = self.retained_max
        return (np.abs(kx) <= mx) & (np.abs(ky) <= my) & (np.abs(kz) <= mz)

    def coordinates(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(TWO_PI * np.arange(n) / n for n in self.shape)

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*self.coordinates(), indexing="ij"))

    def padded(self) -> "GridSpec":
        def pad(n: int) -> int:
            m = (3 * n) // 2
            return m + (m % 2)

        nz = pad(self.nz) if self.dealias == "two-thirds" else self.nz
        return GridSpec(pad(self.nx), pad(self.ny), nz, self.dealias)

    def fits(self, frequency: Sequence[int]) -> bool:
        return all(abs(int(n)) <= m for n, m in zip(frequency, self.retained_max))


def _axis_map(n_src: int, n_dst: int) -> tuple[np.ndarray, np.ndarray]:
    if n_src == n_dst:
        idx = np.arange(n_src)
        return idx, idx
    k = np.rint(sfft.fftfreq(n_src, 1.0 / n_src)).astype(int)
    keep = np.abs(k) < min(n_src, n_dst) / 2
    return np.nonzero(keep)[0], k[keep] % n_dst


def _resample(coeffs: np.ndarray, dst_shape: tuple[int, int, int]) -> np.ndarray:
    maps = [_axis_map(s, d) for s, d in zip(coeffs.shape[-3:], dst_shape)]
    out = np.zeros(coeffs.shape[:-3] + tuple(dst_shape), dtype=complex)
    src = np.ix_(*(m[0] for m in maps))
    dst = np.ix_(*(m[1] for m in maps))
    out[(Ellipsis,) + dst] = coeffs[(Ellipsis,) + src]
    return out


def _mirror(coeffs: np.ndarray) -> np.ndarray:
    """conj(ĉ(−n)) at every n."""
    return np.conj(np.roll(np.flip(coeffs, axis=_AXES), 1, axis=_AXES))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Scalar, vector or matrix field stored by its Fourier coefficients on a shared grid."""

    grid: GridSpec
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        if tuple(self.coeffs.shape[-3:]) != self.grid.shape:
            raise GridMismatchError(f"Coefficient shape {self.coeffs.shape} does not match grid {self.grid.shape}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.coeffs.shape[:-3])

    @classmethod
    def zeros(cls, grid: GridSpec, shape: tuple[int, ...] = (), real: bool = True) -> "SpectralField":
        return cls(grid, np.zeros(tuple(shape) + grid.shape, dtype=complex), real)

    @classmethod
    def from_samples(cls, grid: GridSpec, samples: np.ndarray, real: bool | None = None) -> "SpectralField":
        samples = np.asarray(samples)
        if tuple(samples.shape[-3:]) != grid.shape:
            raise GridMismatchError(f"Sample shape {samples.shape} does not match grid {grid.shape}")
        if real is None:
            real = not np.iscomplexobj(samples)
        return cls(grid, _fft(samples) / grid.size, real)

    @classmethod
    def stack(cls, fields: Sequence["SpectralField"]) -> "SpectralField":
        grid = fields[0].grid
        for f in fields[1:]:
            if f.grid != grid:
                raise GridMismatchError("Stacked fields must share one grid")
        return cls(grid, np.stack([f.coeffs for f in fields]), all(f.real for f in fields))

    def samples(self) -> np.ndarray:
        values = _ifft(self.coeffs) * self.grid.size
        return values.real if self.real else values

    def __getitem__(self, index) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs[index], self.real)

    def reshape(self, shape: tuple[int, ...]) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.reshape(tuple(shape) + self.grid.shape), self.real)

    def with_coeffs(self, coeffs: np.ndarray, real: bool | None = None) -> "SpectralField":
        return SpectralField(self.grid, coeffs, self.real if real is None else real)

    def _check(self, other: "SpectralField") -> None:
        if other.grid != self.grid:
            raise GridMismatchError(f"Grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs, self.real and other.real)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs, self.real and other.real)

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs, self.real)

    def __mul__(self, scalar) -> "SpectralField":
        if isinstance(scalar, SpectralField):
            raise TypeError("Use pointwise_product for field products")
        return SpectralField(self.grid, self.coeffs * scalar, self.real and np.isrealobj(scalar))

    __rmul__ = __mul__

    def derivative(self, axis: int) -> "SpectralField":
        return SpectralField(self.grid, 1j * self.grid.wavenumbers[axis] * self.coeffs, self.real)

    def mean(self) -> np.ndarray:
        return self.coeffs[..., 0, 0, 0]

    def slice_means(self) -> np.ndarray:
        return self.coeffs[..., 0, 0, :]

    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def hermitian_defect(self) -> float:
        """Relative distance from coeff(−n) = conj(coeff(n)); zero for exactly real fields."""
        scale = self.scale()
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.coeffs - _mirror(self.coeffs)))) / scale

    def _significant(self, rtol: float) -> np.ndarray:
        mags = np.abs(self.coeffs).reshape((-1,) + self.grid.shape).max(axis=0)
        top = mags.max() if mags.size else 0.0
        return mags > rtol * top if top > 0 else np.zeros(self.grid.shape, dtype=bool)

    def band(self, rtol: float = 1e-12) -> tuple[int, int, int]:
        """Largest |n_i| per axis carrying a coefficient above rtol of the maximum."""
        mask = self._significant(rtol)
        if not mask.any():
            return (0, 0, 0)
        out = []
        for k in self.grid.wavenumbers:
            out.append(int(np.max(np.abs(np.broadcast_to(k, self.grid.shape)[mask]))))
        return tuple(out)

    def horizontal_band(self, rtol: float = 1e-12) -> float:
        mask = self._significant(rtol)
        if not mask.any():
            return 0.0
        return float(np.sqrt(np.broadcast_to(self.grid.horizontal_modulus_squared, self.grid.shape)[mask].max()))

    def planar(self) -> "SpectralField":
        """Drop every coefficient with n_3 ≠ 0."""
        coeffs = np.zeros_like(self.coeffs)
        coeffs[..., 0] = self.coeffs[..., 0]
        return self.with_coeffs(coeffs)


def transform_forward(grid: GridSpec, samples: np.ndarray) -> SpectralField:
    return SpectralField.from_samples(grid, samples)


def transform_backward(field: SpectralField) -> np.ndarray:
    return field.samples()


def _require_mean_zero(f: SpectralField, what: str) -> None:
    scale = f.scale()
    if scale and np.max(np.abs(f.mean())) > MEAN_RTOL * scale:
        raise SliceMeanError(f"{what} requires a mean-zero field")


def _require_slice_mean_zero(f: SpectralField, what: str) -> None:
    scale = f.scale()
    if scale and np.max(np.abs(f.slice_means())) > MEAN_RTOL * scale:
        raise SliceMeanError(f"{what} requires zero mean on every slice {{z}}×T²")


def _vector(components: Sequence[np.ndarray], grid: GridSpec, real: bool) -> SpectralField:
    return SpectralField(grid, np.stack([np.broadcast_to(c, c.shape[:-3] + grid.shape) for c in components]), real)


# --- differential operators ----------------------------------------------------------

def gradient(f: SpectralField) -> SpectralField:
    """∇f; the derivative index is appended as the last component axis."""
    ks = f.grid.wavenumbers
    return SpectralField(f.grid, np.stack([1j * k * f.coeffs for k in ks], axis=f.coeffs.ndim - 3), f.real)


def gradperp_bar(f: SpectralField) -> SpectralField:
    """∇̄⊥f = (−∂_y f, ∂_x f, 0) for a scalar f."""
    kx, ky, _ = f.grid.wavenumbers
    c = f.coeffs
    return _vector([-1j * ky * c, 1j * kx * c, np.zeros_like(c)], f.grid, f.real)


def divergence(v: SpectralField) -> SpectralField:
    ks = v.grid.wavenumbers
    return v.with_coeffs(sum(1j * k * v.coeffs[..., j, :, :, :] for j, k in enumerate(ks)))


def hdiv(v: SpectralField) -> SpectralField:
    """Horizontal divergence over the last component index."""
    kx, ky, _ = v.grid.wavenumbers
    return v.with_coeffs(1j * kx * v.coeffs[..., 0, :, :, :] + 1j * ky * v.coeffs[..., 1, :, :, :])


def curl(v: SpectralField) -> SpectralField:
    kx, ky, kz = v.grid.wavenumbers
    c = v.coeffs
    return _vector(
        [1j * ky * c[2] - 1j * kz * c[1], 1j * kz * c[0] - 1j * kx * c[2], 1j * kx * c[1] - 1j * ky * c[0]],
        v.grid,
        v.real,
    )


def laplacian(f: SpectralField) -> SpectralField:
    return f.with_coeffs(-f.grid.modulus_squared * f.coeffs)


def inverse_neg_laplacian(f: SpectralField) -> SpectralField:
    """(−Δ)^{-1} on mean-zero fields (componentwise)."""
    _require_mean_zero(f, "(−Δ)^{-1}")
    return f.with_coeffs(f.grid.inverse_modulus_squared * f.coeffs)


# --- Riesz transforms and projectors -------------------------------------------------

def riesz3(f: SpectralField) -> SpectralField:
    """Multiplier ik/|k| on a mean-zero scalar."""
    _require_mean_zero(f, "riesz3")
    inv = np.sqrt(f.grid.inverse_modulus_squared)
    return _vector([1j * k * inv * f.coeffs for k in f.grid.wavenumbers], f.grid, f.real)


def riesz2_slicewise(f: SpectralField) -> SpectralField:
    """Multiplier ik̄/|k̄| on each z-slice; the third output component is zero."""
    _require_slice_mean_zero(f, "riesz2_slicewise")
    kx, ky, _ = f.grid.wavenumbers
    inv = np.sqrt(f.grid.inverse_horizontal_modulus_squared)
    return _vector([1j * kx * inv * f.coeffs, 1j * ky * inv * f.coeffs, np.zeros_like(f.coeffs)], f.grid, f.real)


def _gradient_part(v: SpectralField) -> SpectralField:
    kx, ky, kz = v.grid.wavenumbers
    c = v.coeffs
    dot = (kx * c[0] + ky * c[1] + kz * c[2]) * v.grid.inverse_modulus_squared
    return _vector([kx * dot, ky * dot, kz * dot], v.grid, v.real)


def p_grad3(v: SpectralField) -> SpectralField:
    """Projector onto gradients, −(R ⊗ R)v."""
    _require_mean_zero(v, "p_grad3")
    return _gradient_part(v)


def p_curl3(v: SpectralField) -> SpectralField:
    return v - p_grad3(v)


def _horizontal_gradient_part(v: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    kx, ky, _ = v.grid.wavenumbers
    c = v.coeffs
    dot = (kx * c[0] + ky * c[1]) * v.grid.inverse_horizontal_modulus_squared
    return kx * dot, ky * dot


def p_grad_bar(v: SpectralField) -> SpectralField:
    """Horizontal gradient projector on the first two components; identity on the third."""
    _require_slice_mean_zero(v[:2], "p_grad_bar")
    g1, g2 = _horizontal_gradient_part(v)
    return _vector([g1, g2, v.coeffs[2]], v.grid, v.real)


def p_gradperp_bar(v: SpectralField) -> SpectralField:
    """Complement of p_grad_bar; the third component is zero."""
    _require_slice_mean_zero(v[:2], "p_gradperp_bar")
    g1, g2 = _horizontal_gradient_part(v)
    return _vector([v.coeffs[0] - g1, v.coeffs[1] - g2, np.zeros_like(v.coeffs[2])], v.grid, v.real)


def inv_gradperp(v: SpectralField) -> SpectralField:
    """g = Δ̄^{-1}(∇̄⊥·v̄) with ∇̄⊥·v̄ = −∂_y v_1 + ∂_x v_2, so that ∇̄⊥g = p_gradperp_bar(v)."""
    _require_slice_mean_zero(v[:2], "inv_gradperp")
    kx, ky, _ = v.grid.wavenumbers
    c = v.coeffs
    rot = -1j * ky * c[0] + 1j * kx * c[1]
    return SpectralField(v.grid, -v.grid.inverse_horizontal_modulus_squared * rot, v.real)


# --- frequency localization ------------------------------------------------------------

@dataclass(frozen=True)
class FrequencyRegion:
    kind: Literal["annulus", "ball", "exterior", "mode-ball"]
    lam: float
    center: tuple[float, float, float] | None = None
    radius: float | None = None

    @classmethod
    def annulus(cls, lam: float) -> "FrequencyRegion":
        """λ/2 ≤ |k̄| ≤ 2λ."""
        return cls("annulus", lam)

    @classmethod
    def ball(cls, lam: float) -> "FrequencyRegion":
        return cls("ball", lam)

    @classmethod
    def exterior(cls, lam: float) -> "FrequencyRegion":
        return cls("exterior", lam)

    @classmethod
    def mode_ball(cls, lam: int, k: RationalDirection, radius: float | None = None) -> "FrequencyRegion":
        center = tuple(float(c) for c in k.scaled(lam))
        return cls("mode-ball", lam, center, lam / 10 if radius is None else radius)

    def mask(self, grid: GridSpec) -> np.ndarray:
        if self.kind == "mode-ball":
            kx, ky, kz = grid.wavenumbers
            cx, cy, cz = self.center
            mask = (kx - cx) ** 2 + (ky - cy) ** 2 + (kz - cz) ** 2 <= self.radius ** 2
        else:
            kbar = np.sqrt(grid.horizontal_modulus_squared)
            if self.kind == "annulus":
                mask = (kbar >= self.lam / 2) & (kbar <= 2 * self.lam)
            elif self.kind == "ball":
                mask = kbar <= self.lam
            elif self.kind == "exterior":
                mask = kbar >= self.lam
            else:
                raise ValueError(f"Unknown frequency region kind: {self.kind}")
        mask = np.broadcast_to(mask, grid.shape)
        if not np.any(mask & grid.retained_mask):
            raise ValueError(f"Frequency region {self.kind} at λ={self.lam} is empty on grid {grid.shape}")
        return mask


def localize(f: SpectralField, region: FrequencyRegion) -> SpectralField:
    return f.with_coeffs(f.coeffs * region.mask(f.grid))


def _mode_ball(g: SpectralField, lam: int, k: RationalDirection) -> SpectralField:
    center = k.scaled(lam)
    if not g.grid.fits(center):
        raise BandOverflowError(f"λk = {center} lies outside the retained band {g.grid.retained_max}")
    mask = FrequencyRegion.mode_ball(lam, k).mask(g.grid)
    return g.with_coeffs(g.coeffs * mask, real=False)


def p_grad_mode(g: SpectralField, lam: int, k: RationalDirection) -> SpectralField:
    """Restriction of a vector field to the ball B(λk, λ/10), then the gradient projector."""
    return _gradient_part(_mode_ball(g, lam, k))


def mode_potential(s: SpectralField, lam: int, k: RationalDirection) -> SpectralField:
    """
    Scalar φ with ∇φ = p_grad_mode(s·ik, λ, k): φ̂(n) = (n·k) ŝ(n)/|n|² on B(λk, λ/10).
    """
    restricted = _mode_ball(s, lam, k)
    kx, ky, kz = s.grid.wavenumbers
    d = k.as_array()
    symbol = (kx * d[0] + ky * d[1] + kz * d[2]) * s.grid.inverse_modulus_squared
    return restricted.with_coeffs(symbol * restricted.coeffs)


def real_part_sum(f: SpectralField) -> SpectralField:
    """The real field f + conj(f) from a complex one."""
    return SpectralField(f.grid, f.coeffs + _mirror(f.coeffs), True)


# --- inverse divergences -------------------------------------------------------------------

def _require_horizontal_gradient(v: SpectralField) -> None:
    kx, ky, _ = v.grid.wavenumbers
    c = v.coeffs
    defect = np.max(np.abs(1j * kx * c[1] - 1j * ky * c[0]))
    scale = np.max(np.sqrt(v.grid.horizontal_modulus_squared) * (np.abs(c[0]) + np.abs(c[1])))
    if scale and defect > GRADIENT_RTOL * scale:
        raise NotAGradientError("First two components are not a horizontal gradient")


def _potential_of_gradient(v: SpectralField) -> np.ndarray:
    """f̂ with ∇̄f = (v_1, v_2)."""
    kx, ky, _ = v.grid.wavenumbers
    return -1j * (kx * v.coeffs[0] + ky * v.coeffs[1]) * v.grid.inverse_horizontal_modulus_squared


def _symmetric_block(v: SpectralField, f_hat: np.ndarray) -> np.ndarray:
    kx, ky, _ = v.grid.wavenumbers
    inv = v.grid.inverse_horizontal_modulus_squared
    diagonal = (kx ** 2 - ky ** 2) * inv * f_hat
    off = 2.0 * kx * ky * inv * f_hat
    out = np.zeros((3, 3) + v.grid.shape, dtype=complex)
    out[0, 0], out[0, 1], out[1, 0], out[1, 1] = diagonal, off, off, -diagonal
    return out


def _scalar_row(g: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    kx, ky, _ = g.grid.wavenumbers
    inv = g.grid.inverse_horizontal_modulus_squared
    return -1j * kx * inv * g.coeffs, -1j * ky * inv * g.coeffs


def inverse_div_E(v: SpectralField) -> SpectralField:
    """Symmetric trace-free E with ∇̄·E = ∇̄f; returned as a 3×3 field with zero third row and column."""
    _require_slice_mean_zero(v[:2], "inverse_div_E")
    _require_horizontal_gradient(v)
    return SpectralField(v.grid, _symmetric_block(v, _potential_of_gradient(v)), v.real)


def inverse_div_I(g: SpectralField) -> SpectralField:
    """−(−Δ̄)^{-1}∇̄g as a vector with zero third component; ∇̄·I(g) = g."""
    _require_slice_mean_zero(g, "inverse_div_I")
    r1, r2 = _scalar_row(g)
    return _vector([r1, r2, np.zeros_like(r1)], g.grid, g.real)


def inverse_div_D(x: SpectralField) -> SpectralField:
    """Class-M matrix with ∇̄·D(X) = X for X = (∂_x f, ∂_y f, g)."""
    _require_slice_mean_zero(x, "inverse_div_D")
    _require_horizontal_gradient(x)
    out = _symmetric_block(x, _potential_of_gradient(x))
    out[2, 0], out[2, 1] = _scalar_row(x[2])
    return SpectralField(x.grid, out, x.real)


# --- products and profiles --------------------------------------------------------------

def _padded_samples(f: SpectralField, padded: GridSpec) -> np.ndarray:
    values = _ifft(_resample(f.coeffs, padded.shape)) * padded.size
    return values.real if f.real else values


def pointwise_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """
    Dealiased product: samples on the padded grid, multiply (component shapes broadcast
    like numpy arrays), transform back and truncate to the retained set.
    """
    f._check(g)
    padded = f.grid.padded()
    prod = _padded_samples(f, padded) * _padded_samples(g, padded)
    coeffs = _resample(_fft(prod) / padded.size, f.grid.shape) * f.grid.retained_mask
    return SpectralField(f.grid, coeffs, f.real and g.real)


def outer_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """(u ⊗ v)_ij = u_i v_j for vector fields."""
    return pointwise_product(u.reshape(u.shape + (1,)), v.reshape((1,) + v.shape))


def multiply_z_profile(f: SpectralField, profile: np.ndarray) -> SpectralField:
    """Multiply the samples by a function of z alone (given at the z grid points)."""
    profile = np.asarray(profile)
    return SpectralField.from_samples(f.grid, f.samples() * profile, real=f.real and np.isrealobj(profile))


# --- norms --------------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldNorms:
    l2: float
    c0: float
    c1: float
    holder: float
    alpha: float


def _pointwise_magnitude(samples: np.ndarray, component_ndim: int) -> np.ndarray:
    if component_ndim == 0:
        return np.abs(samples)
    axes = tuple(range(component_ndim))
    return np.sqrt(np.sum(np.abs(samples) ** 2, axis=axes))


def c0_norm(f: SpectralField) -> float:
    """sup of the pointwise Euclidean (Frobenius) magnitude over the samples."""
    if f.is_zero():
        return 0.0
    return float(np.max(_pointwise_magnitude(f.samples(), len(f.shape))))


def c1_norm(f: SpectralField) -> float:
    """sup|∇f| over the samples."""
    if f.is_zero():
        return 0.0
    return c0_norm(gradient(f))


def holder_estimate(f: SpectralField, alpha: float) -> float:
    """sup_j 2^{jα}‖Δ_j f‖_∞ over dyadic shells in |k̄| (shell 0 is |k̄| < 1)."""
    if f.is_zero():
        return 0.0
    kbar = np.broadcast_to(np.sqrt(f.grid.horizontal_modulus_squared), f.grid.shape)
    top = f.horizontal_band()
    best = 0.0
    j = 0
    lower = 0.0
    while lower <= top:
        upper = 2.0 ** j
        mask = (kbar >= lower) & (kbar < upper)
        if mask.any():
            shell = f.with_coeffs(f.coeffs * mask)
            best = max(best, 2.0 ** (j * alpha) * c0_norm(shell))
        lower = upper
        j += 1
    return best


def norms(f: SpectralField, alpha: float = 0.5) -> FieldNorms:
    l2 = math.sqrt(VOLUME * float(np.sum(np.abs(f.coeffs) ** 2)))
    return FieldNorms(l2=l2, c0=c0_norm(f), c1=c1_norm(f), holder=holder_estimate(f, alpha), alpha=alpha)


def inner_product(f: SpectralField, g: SpectralField) -> float:
    """∫ f·g over T³ by Parseval (real fields)."""
    f._check(g)
    return float(VOLUME * np.sum(f.coeffs * np.conj(g.coeffs)).real)
