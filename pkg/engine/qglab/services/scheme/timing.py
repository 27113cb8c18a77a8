"""Time partition of unity χ_l and the prescribed energy profile e(t)."""
import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

# χ ≡ 1 on |x| <= _FLAT, ramps over [_FLAT, _FLAT + _RAMP], so supp χ ⊂ (−3/4, 3/4)
_FLAT = 0.3
_RAMP = 0.4


def _edge(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """e^{−1/s} and its derivative, zero for s <= 0."""
    s = np.asarray(s, dtype=float)
    positive = s > 0
    safe = np.where(positive, s, 1.0)
    value = np.where(positive, np.exp(-1.0 / safe), 0.0)
    return value, np.where(positive, value / safe ** 2, 0.0)


def smooth_step(s: np.ndarray) -> np.ndarray:
    """C^∞ step: 0 for s <= 0, 1 for s >= 1."""
    f, _ = _edge(s)
    g, _ = _edge(1.0 - np.asarray(s, dtype=float))
    return f / (f + g)


def smooth_step_derivative(s: np.ndarray) -> np.ndarray:
    f, df = _edge(s)
    g, dg = _edge(1.0 - np.asarray(s, dtype=float))
    return (df * g + f * dg) / (f + g) ** 2


def chi(x: np.ndarray) -> np.ndarray:
    """Bump with Σ_l χ(x − l)² = 1."""
    s = (np.abs(np.asarray(x, dtype=float)) - _FLAT) / _RAMP
    return np.where(s >= 1.0, 0.0, np.cos(0.5 * math.pi * smooth_step(s)))


def chi_derivative(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    s = (np.abs(x) - _FLAT) / _RAMP
    slope = -np.sin(0.5 * math.pi * smooth_step(s)) * 0.5 * math.pi * smooth_step_derivative(s) / _RAMP
    return np.sign(x) * slope


@dataclass(frozen=True)
class TimePartition:
    mu: float
    indices: tuple[int, ...]

    def anchor(self, l: int) -> float:
        return l / self.mu

    def chi_l(self, l: int, t: float) -> float:
        return float(chi(self.mu * t - l))

    def chi_l_derivative(self, l: int, t: float) -> float:
        return float(self.mu * chi_derivative(self.mu * t - l))

    def active(self, t: float) -> list[int]:
        """Indices whose cutoff is nonzero at t."""
        return [l for l in self.indices if abs(self.mu * t - l) < _FLAT + _RAMP]

    def sum_of_squares(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        total = np.zeros_like(times)
        for l in self.indices:
            total += chi(self.mu * times - l) ** 2
        return total


@dataclass(frozen=True)
class EnergyProfile:
    """e(t) = h·exp(1 − 1/(1 − s²)) with s = (t − center)/width ("bump"), or e ≡ 0 ("zero")."""

    kind: Literal["bump", "zero"] = "bump"
    center: float = 0.0
    width: float = 1.0
    height: float = 1.0
    scale: float = 1.0

    @property
    def radius(self) -> float:
        """R with supp e ⊆ [−R, R]."""
        return abs(self.center) + self.width

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or self.height == 0.0 or self.scale == 0.0

    def value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.is_zero:
            return np.zeros_like(t)
        s = (t - self.center) / self.width
        inside = np.abs(s) < 1.0
        safe = np.where(inside, s, 0.0)
        return np.where(inside, self.scale * self.height * np.exp(1.0 - 1.0 / (1.0 - safe ** 2)), 0.0)

    def __call__(self, t: float) -> float:
        return float(self.value(t))

    @property
    def maximum(self) -> float:
        return 0.0 if self.is_zero else self.scale * self.height

    def rescaled(self, factor: float) -> "EnergyProfile":
        return replace(self, scale=self.scale * factor)


def make_partition(mu: float, profile: EnergyProfile) -> TimePartition:
    """Indices l ∈ Z ∩ [−Rμ − 1, Rμ + 1], enough for Σχ_l² = 1 on all of [−R, R]."""
    if mu <= 0:
        raise ValueError(f"μ must be positive, got {mu}")
    reach = int(math.ceil(profile.radius * mu)) + 1
    return TimePartition(mu=mu, indices=tuple(range(-reach, reach + 1)))


def normalize_base_energy(profile: EnergyProfile, delta_next: float) -> tuple[EnergyProfile, float]:
    """Scale e so that max e <= δ_1; returns the profile and the factor applied."""
    if profile.maximum <= delta_next:
        return profile, 1.0
    factor = delta_next / profile.maximum
    return profile.rescaled(factor), factor
