"""Everything one stage q → q+1 shares across its time slices: parameters, cutoffs, ρ_l and anchored stresses."""
from dataclasses import dataclass, field

import structlog

from ...core.errors import BandOverflowError, InductiveAssumptionError, PlanarityError
from ..blocks import CutoffProfile, make_cutoff
from ..exact_modes import DirectionFamily, families, family_for_index
from ..spectral import SpectralField
from ..transport import FlowMap, MollifierSpec, advance_flow, mollify_z
from .parameters import Schedule, StageParameters
from .state import IterationState
from .timing import EnergyProfile, TimePartition, make_partition, normalize_base_energy

logger = structlog.get_logger(__name__)


def pump_rho(state: IterationState, profile: EnergyProfile, t: float, params: StageParameters, cutoff_integral: float) -> float:
    """ρ(t) = (∫L²)^{-1} max(e(t) − ∫|∇Ψ_q|² − δ_{q+2}/2, 0)."""
    excess = profile(t) - state.energy(t) - params.delta_after / 2.0
    return max(excess, 0.0) / cutoff_integral


@dataclass(eq=False)
class StageContext:
    state: IterationState
    params: StageParameters
    profile: EnergyProfile
    energy_scale: float
    partition: TimePartition
    cutoff: CutoffProfile
    mollifier: MollifierSpec
    planar: bool
    cutoff_integral: float
    _rho: dict[int, float] = field(default_factory=dict, repr=False)
    _anchored: dict[int, SpectralField] = field(default_factory=dict, repr=False)

    @property
    def grid(self):
        return self.state.grid

    @property
    def q(self) -> int:
        return self.state.q

    def rho(self, t: float) -> float:
        return pump_rho(self.state, self.profile, t, self.params, self.cutoff_integral)

    def rho_anchor(self, l: int) -> float:
        """ρ_l = ρ(l/μ); must not exceed δ_{q+1}."""
        if l not in self._rho:
            value = self.rho(self.partition.anchor(l))
            if value > self.params.delta_next:
                raise InductiveAssumptionError(
                    f"ρ_{l} = {value:.6e} exceeds δ_(q+1) = {self.params.delta_next:.6e}", assumption="energy-pumping"
                )
            self._rho[l] = value
        return self._rho[l]

    def family(self, l: int) -> DirectionFamily:
        return family_for_index(l, self.planar)

    def anchored_stress(self, l: int) -> SpectralField:
        """M̊_{q,ℓ} at the anchor l/μ."""
        if l not in self._anchored:
            stress = self.state.at(self.partition.anchor(l)).stress
            self._anchored[l] = mollify_z(stress, self.mollifier, self.cutoff)
        return self._anchored[l]

    def flow(self, l: int, t: float) -> FlowMap:
        anchor = self.partition.anchor(l)
        if self.state.trivial:
            return FlowMap.identity(self.grid, anchor, t)
        return advance_flow(self.state.velocity, anchor, t, self.params.mu)


def _check_band(state: IterationState, lam: int, planar: bool) -> None:
    grid = state.grid
    reach = lam / 10.0
    for family in families(planar):
        for k in family.directions:
            n = k.scaled(lam)
            corner = [int(abs(ni) + reach) for ni in n]
            if planar:
                corner[2] = 0
            if not grid.fits(corner):
                raise BandOverflowError(f"Ball of radius {reach} around λk = {n} leaves the band {grid.retained_max}")


def prepare_stage(state: IterationState, schedule: Schedule, profile: EnergyProfile, *, planar: bool = False) -> StageContext:
    params = schedule.stage(state.q)
    grid = state.grid
    if not planar and grid.dealias != "slicewise":
        raise ValueError(f"3D stages need the slicewise dealias rule, got {grid.dealias!r}")
    if planar and not state.planar:
        raise PlanarityError("euler2d stages need a planar state")
    _check_band(state, params.lam_next, planar)

    scale = 1.0
    if state.trivial:
        profile, scale = normalize_base_energy(profile, params.delta_next)
    cutoff = CutoffProfile.unit_profile() if planar else make_cutoff(schedule, state.q)
    context = StageContext(
        state=state,
        params=params,
        profile=profile,
        energy_scale=scale,
        partition=make_partition(params.mu, profile),
        cutoff=cutoff,
        mollifier=MollifierSpec(params.ell),
        planar=planar,
        cutoff_integral=cutoff.square_integral(grid),
    )
    logger.info(
        "stage.prepared",
        q=state.q,
        lam_next=params.lam_next,
        mu=params.mu,
        anchors=len(context.partition.indices),
        energy_scale=scale,
        planar=planar,
    )
    return context
