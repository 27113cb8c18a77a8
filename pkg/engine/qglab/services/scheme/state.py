"""The inductive triple (∇Ψ_q, Q_q, M̊_q), evaluated lazily one time slice at a time."""
from dataclasses import dataclass
from typing import Callable

import numpy as np
import structlog

from ..blocks import perp_from_gradient
from ..checks import Check, at_most, holds
from ..spectral import GridSpec, SpectralField, gradient, inner_product
from ..transport import z_support

logger = structlog.get_logger(__name__)

GRADIENT_TOL = 1e-10
FREQUENCY_RTOL = 1e-12
CLASS_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class StateSlice:
    time: float
    potential: SpectralField
    grad_psi: SpectralField
    pressure: SpectralField
    stress: SpectralField
    # relative reconstruction residual of the extraction that produced this slice
    reconstruction_error: float = 0.0

    @property
    def grid(self) -> GridSpec:
        return self.grad_psi.grid

    @property
    def velocity(self) -> SpectralField:
        """∇̄⊥Ψ_q."""
        return perp_from_gradient(self.grad_psi)

    @property
    def is_zero(self) -> bool:
        return self.grad_psi.is_zero() and self.pressure.is_zero() and self.stress.is_zero()

    def energy(self) -> float:
        """∫|∇Ψ_q|² by Parseval."""
        return inner_product(self.grad_psi, self.grad_psi)


def zero_slice(grid: GridSpec, t: float) -> StateSlice:
    return StateSlice(
        time=t,
        potential=SpectralField.zeros(grid),
        grad_psi=SpectralField.zeros(grid, (3,)),
        pressure=SpectralField.zeros(grid, (3,)),
        stress=SpectralField.zeros(grid, (3, 3)),
    )


class IterationState:
    """Stage-q triple; slices are computed on demand by the evaluator and memoized."""

    def __init__(
        self,
        q: int,
        grid: GridSpec,
        evaluator: Callable[[float], StateSlice],
        *,
        planar: bool = False,
        frequency_bound: float | None = None,
        support_start: float | None = None,
        trivial: bool = False,
    ):
        self.q = q
        self.grid = grid
        self.planar = planar
        self.frequency_bound = frequency_bound
        self.support_start = support_start
        self.trivial = trivial
        self._evaluator = evaluator
        self._slices: dict[float, StateSlice] = {}

    @classmethod
    def zero(cls, grid: GridSpec, q: int = 0, planar: bool = False) -> "IterationState":
        """The base triple ∇Ψ_0 = Q_0 = M̊_0 = 0."""
        return cls(q, grid, lambda t: zero_slice(grid, t), planar=planar, trivial=True)

    def at(self, t: float) -> StateSlice:
        t = float(t)
        if t not in self._slices:
            logger.debug("state.slice_evaluated", q=self.q, t=t, trivial=self.trivial)
            self._slices[t] = self._evaluator(t)
        return self._slices[t]

    def velocity(self, t: float) -> SpectralField:
        return self.at(t).velocity

    def energy(self, t: float) -> float:
        return 0.0 if self.trivial else self.at(t).energy()


def _horizontal_mask(grid: GridSpec, bound: float) -> np.ndarray:
    return np.broadcast_to(grid.horizontal_modulus_squared > bound ** 2 * (1 + 1e-12), grid.shape)


def frequency_excess(field: SpectralField, bound: float) -> float:
    """Largest coefficient with |k̄| > bound, relative to the largest coefficient."""
    scale = field.scale()
    if scale == 0.0:
        return 0.0
    outside = np.abs(field.coeffs) * _horizontal_mask(field.grid, bound)
    return float(outside.max()) / scale


def gradient_defect(s: StateSlice) -> float:
    """‖∇̄Ψ − (∇Ψ)_{1,2}‖ relative to ‖∇Ψ‖, on coefficients."""
    scale = s.grad_psi.scale()
    if scale == 0.0:
        return 0.0
    horizontal = gradient(s.potential).coeffs[:2]
    return float(np.max(np.abs(horizontal - s.grad_psi.coeffs[:2]))) / scale


def class_defect(stress: SpectralField) -> float:
    """Third column and trace of the top block, relative to the largest entry."""
    scale = stress.scale()
    if scale == 0.0:
        return 0.0
    c = stress.coeffs
    column = np.max(np.abs(c[:, 2]))
    trace = np.max(np.abs(c[0, 0] + c[1, 1]))
    return float(max(column, trace)) / scale


def check_slice(s: StateSlice, state: IterationState, tolerance: float = GRADIENT_TOL) -> list[Check]:
    checks = [
        at_most("state.gradient_exact", gradient_defect(s), tolerance, "exact-gradient"),
        at_most(
            "state.mean_zero",
            float(np.max(np.abs(s.grad_psi.mean()))) / max(s.grad_psi.scale(), 1e-300),
            tolerance,
            "exact-gradient",
        ),
        at_most("state.stress_class", class_defect(s.stress), CLASS_RTOL, "stress-class"),
    ]
    if state.frequency_bound is not None:
        worst = max(frequency_excess(f, state.frequency_bound) for f in (s.grad_psi, s.pressure, s.stress))
        checks.append(at_most("state.frequency_support", worst, FREQUENCY_RTOL, "frequency-support"))
    if state.support_start is not None:
        inside = True
        for f in (s.grad_psi, s.pressure, s.stress):
            support = z_support(f)
            if support is not None and (support[0] < state.support_start or support[1] > 2 * np.pi - state.support_start):
                inside = False
        checks.append(holds("state.spatial_support", inside, "spatial-support", detail=f"z in [{state.support_start:.6f}, 2π − {state.support_start:.6f}]"))
    if state.planar:
        vertical = max(float(np.max(np.abs(f.coeffs[..., 1:]))) if f.grid.nz > 1 else 0.0 for f in (s.grad_psi, s.pressure, s.stress))
        checks.append(at_most("state.z_independent", vertical, 0.0, "planar-input"))
    return checks

