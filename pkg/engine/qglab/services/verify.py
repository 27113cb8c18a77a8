"""verify-modes, verify-operators and verify-blocks: self-contained certification suites."""
import time as clock
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import structlog

from ..core.errors import OutOfBallError
from .blocks import (
    PRESSURE_BOUND,
    CutoffProfile,
    analytic_mean_flux,
    block_mean_flux,
    block_pressure,
    boundary_trace,
    eigenfunction_residual,
    make_block,
    make_cutoff,
    pressure_ratio,
    quadrature_mean_flux,
    stationarity_residual,
    verify_algebraic_identity,
    verify_cutoff_factorization,
)
from .checks import Check, all_passed, at_most, holds
from .exact_modes import (
    LATTICE_SCALE,
    DirectionFamily,
    ModeMatrix,
    families,
    interaction_gap,
    mode_matrix,
    sample_symmetric_offset,
    solve_coefficients,
    verify_unit_sum,
)
from .scheme.parameters import wall_scale
from .spectral import (
    GridSpec,
    FrequencyRegion,
    SpectralField,
    c0_norm,
    gradient,
    hdiv,
    inv_gradperp,
    inverse_div_D,
    inverse_div_E,
    inverse_div_I,
    localize,
    multiply_z_profile,
    p_curl3,
    p_grad3,
    p_grad_bar,
    p_gradperp_bar,
    pointwise_product,
    real_part_sum,
    transform_backward,
    transform_forward,
)
from .transport import advance_flow

logger = structlog.get_logger(__name__)

RANDOM_TARGETS = 100
OPERATOR_SAMPLES = 50
OPERATOR_GRID = GridSpec(64, 64, 64)
# annulus inputs at λ = 8, 16, 32 need |k̄| up to 64 horizontally; z is irrelevant
BERNSTEIN_GRID = GridSpec(192, 192, 4, "slicewise")
BERNSTEIN_LAMBDAS = (8, 16, 32)
# λ‖T f‖_∞ / ‖f‖_∞ for the order −1 operators, measured once on annulus inputs
BERNSTEIN_CONSTANT = 16.0
BLOCK_LAMBDA = 13
BLOCK_GRID = GridSpec(64, 64, 64, "slicewise")
CUTOFF_GRID = GridSpec(64, 64, 128, "slicewise")


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all_passed(self.checks)


def _frac(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


# --- modes ------------------------------------------------------------------------------

def _family_checks(family: DirectionFamily, rng: np.random.Generator) -> tuple[list[Check], dict]:
    tag = f"{'planar' if family.planar else '3d'}.family{family.index}"
    checks = []
    scale = family.lattice_scale
    integral = all(all((scale * c).denominator == 1 for c in k.components) for k in family.directions)
    unit = all(sum((scale * c) ** 2 for c in k.components) == scale ** 2 for k in family.directions)
    checks.append(holds(f"modes.{tag}.integrality", integral and unit, "frequency-modes", detail=f"{scale}k ∈ Z³, |{scale}k|² = {scale ** 2}"))
    checks.append(holds(f"modes.{tag}.symmetric", set(family.directions) == {-k for k in family.directions}, "frequency-modes"))
    checks.append(holds(f"modes.{tag}.off_axis", all(k.components[0] != 0 or k.components[1] != 0 for k in family.directions), "frequency-modes"))
    checks.append(holds(f"modes.{tag}.independent", family.determinant != 0, "frequency-modes", detail=f"det = {_frac(family.determinant)}"))
    checks.append(holds(f"modes.{tag}.class_m", all(mode_matrix(k) == mode_matrix(-k) for k in family.positive), "frequency-modes"))

    center = solve_coefficients(family, family.base_matrix)
    checks.append(holds(f"modes.{tag}.center_coefficients", all(c == family.center_coefficient for _, c in center.squares), "frequency-modes"))
    checks.append(holds(f"modes.{tag}.unit_sum", center.total == 1, "frequency-modes"))

    reconstructed = unit_sums = symmetric = True
    for _ in range(RANDOM_TARGETS):
        target = family.base_matrix + sample_symmetric_offset(family, rng)
        solve = solve_coefficients(family, target)
        reconstructed &= solve.reconstruct() == target
        unit_sums &= solve.total == 1
        symmetric &= all(solve[k] == solve[-k] for k in family.positive)
    checks.append(holds(f"modes.{tag}.random_reconstruction", reconstructed, "frequency-modes", detail=f"{RANDOM_TARGETS} targets"))
    checks.append(holds(f"modes.{tag}.random_unit_sum", unit_sums, "frequency-modes", detail=f"{RANDOM_TARGETS} targets"))
    checks.append(holds(f"modes.{tag}.coefficient_symmetry", symmetric, "frequency-modes"))

    epsilon = family.ball_radius
    ncoords = len(family.inverse[0])
    inside = True
    for i in range(ncoords):
        for sign in (1, -1):
            coords = [Fraction(0)] * ncoords
            coords[i] = sign * epsilon / 2
            offset = ModeMatrix.from_coordinates(coords)
            inside &= all(c > 0 for _, c in solve_coefficients(family, family.base_matrix + offset).squares)
    checks.append(holds(f"modes.{tag}.epsilon_interior", epsilon > 0 and inside, "positive-coefficients", detail=f"ε = {_frac(epsilon)}"))

    # the binding row of the inverse attains ε along −sign(row); twice as far leaves the cone
    row = min(family.inverse, key=lambda r: family.center_coefficient / sum(abs(v) for v in r))
    direction = [Fraction(-1 if v > 0 else 1 if v < 0 else 0) for v in row]
    edge = solve_coefficients(family, family.base_matrix + ModeMatrix.from_coordinates([epsilon * d for d in direction]))
    checks.append(holds(f"modes.{tag}.epsilon_attained", edge.on_boundary, "positive-coefficients"))
    offset = ModeMatrix.from_coordinates([2 * epsilon * d for d in direction])
    try:
        solve_coefficients(family, family.base_matrix + offset)
        maximal = False
    except OutOfBallError:
        maximal = True
    checks.append(holds(f"modes.{tag}.epsilon_maximal", maximal, "positive-coefficients"))

    details = {
        "directions": [str(k) for k in family.directions],
        "base_matrix": family.base_matrix.as_strings(),
        "epsilon": _frac(epsilon),
        "determinant": _frac(family.determinant),
        "center_coefficient": _frac(family.center_coefficient),
    }
    return checks, details


def certify_modes(seed: int = 0) -> SuiteResult:
    started = clock.perf_counter()
    rng = np.random.default_rng(seed)
    result = SuiteResult("verify-modes")
    for planar in (False, True):
        pair = families(planar)
        for family in pair:
            checks, details = _family_checks(family, rng)
            result.checks.extend(checks)
            result.details[f"{'planar' if planar else '3d'}.family{family.index}"] = details
        tag = "planar" if planar else "3d"
        disjoint = not set(pair[0].directions) & set(pair[1].directions)
        result.checks.append(holds(f"modes.{tag}.disjoint", disjoint, "frequency-modes"))
        gap = interaction_gap(pair[0].directions + pair[1].directions)
        floor = Fraction(1, LATTICE_SCALE[planar] ** 2)
        result.checks.append(holds(f"modes.{tag}.interaction_gap", gap >= floor, "frequency-modes", detail=f"min |k̄+k̄'|² = {_frac(gap)}"))

    m1 = families()[0].base_matrix
    s = Fraction(1, 1000)
    symmetric = m1 + ModeMatrix.from_coordinates([0, s, s, 0, 0])
    skew = m1 + ModeMatrix.from_coordinates([0, s, 0, 0, 0])
    result.checks.append(holds("modes.unit_sum_symmetric_offset", verify_unit_sum(families()[0], symmetric) == 1, "frequency-modes"))
    skew_sum = verify_unit_sum(families()[0], skew)
    result.checks.append(holds("modes.unit_sum_skew_offset", skew_sum != 1, "frequency-modes", detail=f"Σc² = {_frac(skew_sum)}"))
    result.elapsed = clock.perf_counter() - started
    logger.info("verify.modes", passed=result.passed, checks=len(result.checks), elapsed=result.elapsed)
    return result


# --- operators --------------------------------------------------------------------------

def random_field(
    grid: GridSpec,
    rng: np.random.Generator,
    shape: tuple[int, ...] = (),
    band: int = 8,
    slice_mean_zero: bool = True,
) -> SpectralField:
    """Real random field with |n_i| ≤ band (within the retained set); optionally zero on k̄ = 0."""
    kx, ky, kz = grid.wavenumbers
    mask = (np.abs(kx) <= band) & (np.abs(ky) <= band) & (np.abs(kz) <= band) & grid.retained_mask
    if slice_mean_zero:
        mask = mask & (grid.horizontal_modulus_squared > 0)
    full = tuple(shape) + grid.shape
    coeffs = (rng.standard_normal(full) + 1j * rng.standard_normal(full)) * np.broadcast_to(mask, grid.shape)
    return real_part_sum(SpectralField(grid, coeffs, False))


def _relative(a: SpectralField, b: SpectralField) -> float:
    scale = c0_norm(b)
    return c0_norm(a - b) / scale if scale else c0_norm(a)


def _annulus_field(grid: GridSpec, rng: np.random.Generator, lam: int, shape: tuple[int, ...] = ()) -> SpectralField:
    f = random_field(grid, rng, shape, band=max(grid.retained_max[:2]), slice_mean_zero=True)
    return localize(f, FrequencyRegion.annulus(lam))


def bernstein_constants(rng: np.random.Generator, samples: int = 4) -> dict[str, float]:
    """Largest λ‖T f‖_∞/‖f‖_∞ over annulus inputs for E, I, D and inv_gradperp."""
    grid = BERNSTEIN_GRID
    worst = {"E": 0.0, "I": 0.0, "D": 0.0, "inv_gradperp": 0.0}
    for lam in BERNSTEIN_LAMBDAS:
        for _ in range(samples):
            f = _annulus_field(grid, rng, lam)
            g = _annulus_field(grid, rng, lam)
            v = _annulus_field(grid, rng, lam, (3,))
            grad_f = SpectralField.stack([gradient(f)[0], gradient(f)[1], SpectralField.zeros(grid)])
            x = SpectralField.stack([gradient(f)[0], gradient(f)[1], g])
            ratios = {
                "E": c0_norm(inverse_div_E(grad_f)) / c0_norm(grad_f),
                "I": c0_norm(inverse_div_I(g)) / c0_norm(g),
                "D": c0_norm(inverse_div_D(x)) / c0_norm(x),
                "inv_gradperp": c0_norm(inv_gradperp(v)) / c0_norm(v),
            }
            for name, ratio in ratios.items():
                worst[name] = max(worst[name], lam * ratio)
    return worst


def _shear_flow_errors(grid: GridSpec) -> tuple[float, float]:
    """Closed-form check for u = (sin y, 0, 0): Φ = (x − (t − t₀) sin y, y, z)."""
    _, y, _ = grid.mesh()
    u = SpectralField.from_samples(grid, np.stack([np.sin(y), np.zeros_like(y), np.zeros_like(y)]))
    mu = 4.0
    anchor, t = 0.25, 0.25 + 0.7 / mu
    flow = advance_flow(u, anchor, t, mu)
    expected = -(t - anchor) * np.sin(y)
    error = float(np.max(np.abs(flow.displacement[0] - expected)))
    error = max(error, float(np.max(np.abs(flow.displacement[1]))))
    return error, flow.det_error()


def certify_operators(seed: int = 0, samples: int = OPERATOR_SAMPLES) -> SuiteResult:
    started = clock.perf_counter()
    rng = np.random.default_rng(seed)
    grid = OPERATOR_GRID
    result = SuiteResult("verify-operators")
    errors = {key: 0.0 for key in ("round_trip", "E", "I", "D", "p3_sum", "p3_idempotent", "pbar_sum", "pbar_idempotent", "reality", "z_commute")}
    _, _, z = grid.mesh()
    profile = 0.5 + 0.25 * np.cos(grid.coordinates()[2])

    for _ in range(samples):
        noise = rng.standard_normal(grid.shape)
        back = transform_backward(transform_forward(grid, noise))
        errors["round_trip"] = max(errors["round_trip"], float(np.max(np.abs(back - noise)) / np.max(np.abs(noise))))

        f = random_field(grid, rng)
        g = random_field(grid, rng)
        grad = gradient(f)
        grad_f = SpectralField.stack([grad[0], grad[1], SpectralField.zeros(grid)])
        x = SpectralField.stack([grad[0], grad[1], g])
        errors["E"] = max(errors["E"], _relative(hdiv(inverse_div_E(grad_f)), grad_f))
        errors["I"] = max(errors["I"], _relative(hdiv(inverse_div_I(g)), g))
        d = inverse_div_D(x)
        errors["D"] = max(errors["D"], _relative(hdiv(d), x))

        v = random_field(grid, rng, (3,))
        p = p_grad3(v)
        errors["p3_sum"] = max(errors["p3_sum"], _relative(p + p_curl3(v), v))
        errors["p3_idempotent"] = max(errors["p3_idempotent"], _relative(p_grad3(p), p))
        pb = p_grad_bar(v)
        errors["pbar_sum"] = max(errors["pbar_sum"], _relative(pb + p_gradperp_bar(v), v))
        errors["pbar_idempotent"] = max(errors["pbar_idempotent"], _relative(p_grad_bar(pb), pb))
        errors["reality"] = max(errors["reality"], d.hermitian_defect(), p.hermitian_defect(), pb.hermitian_defect())
        errors["z_commute"] = max(
            errors["z_commute"],
            _relative(p_grad_bar(multiply_z_profile(v, profile)), multiply_z_profile(pb, profile)),
        )

    bounds = {
        "round_trip": 1e-12,
        "E": 1e-10,
        "I": 1e-10,
        "D": 1e-10,
        "p3_sum": 1e-12,
        "p3_idempotent": 1e-12,
        "pbar_sum": 1e-12,
        "pbar_idempotent": 1e-12,
        "reality": 1e-12,
        "z_commute": 1e-12,
    }
    for name, value in errors.items():
        result.checks.append(at_most(f"operators.{name}", value, bounds[name], "operator-identities", detail=f"{samples} samples on {grid.shape}"))

    x_, _, _ = grid.mesh()
    s = SpectralField.from_samples(grid, np.sin(x_))
    expected = SpectralField.from_samples(grid, 0.5 - 0.5 * np.cos(2 * x_))
    result.checks.append(at_most("operators.product_sin_sin", _relative(pointwise_product(s, s), expected), 1e-13, "dealiasing"))

    constants = bernstein_constants(rng)
    for name, value in constants.items():
        result.checks.append(at_most(f"operators.bernstein_{name}", value, BERNSTEIN_CONSTANT, "operator-identities", detail=f"λ ∈ {BERNSTEIN_LAMBDAS}"))

    shear, det = _shear_flow_errors(GridSpec(32, 32, 4, "slicewise"))
    result.checks.append(at_most("transport.shear_closed_form", shear, 1e-9, "flow-window"))
    result.checks.append(at_most("transport.det_error", det, 1e-8, "flow-window"))

    result.details = {"errors": errors, "bernstein": constants, "shear_error": shear, "shear_det_error": det}
    result.elapsed = clock.perf_counter() - started
    logger.info("verify.operators", passed=result.passed, checks=len(result.checks), elapsed=result.elapsed)
    return result


# --- blocks -----------------------------------------------------------------------------

def _random_amplitudes(directions, rng: np.random.Generator) -> list[complex]:
    """c_k random for the first half, conjugated onto −k."""
    half = len(directions) // 2
    first = [complex(rng.standard_normal(), rng.standard_normal()) for _ in range(half)]
    return first + [c.conjugate() for c in first]


class _WallSchedule:
    def l(self, q: int) -> int:
        return wall_scale(q)


def certify_blocks(seed: int = 0) -> SuiteResult:
    started = clock.perf_counter()
    rng = np.random.default_rng(seed)
    lam = BLOCK_LAMBDA
    one, two = families()
    k1 = one.positive[0]
    cases = {
        "single_pair": ((k1, -k1), [1.0, 1.0]),
        "family1": (one.directions, _random_amplitudes(one.directions, rng)),
        "mixed": (
            one.positive + two.positive + tuple(-k for k in one.positive + two.positive),
            _random_amplitudes(one.positive + two.positive + tuple(-k for k in one.positive + two.positive), rng),
        ),
    }
    result = SuiteResult("verify-blocks")
    residuals: dict[str, dict[str, float]] = {}
    for name, (directions, amplitudes) in cases.items():
        block = make_block(BLOCK_GRID, lam, directions, amplitudes)
        pressure = block_pressure(block)
        entry = {
            "eigenfunction": eigenfunction_residual(block),
            "stationarity": stationarity_residual(block, pressure),
            "algebraic_identity": verify_algebraic_identity(block),
            "pressure_ratio": pressure_ratio(block, pressure),
        }
        residuals[name] = entry
        result.checks.append(at_most(f"blocks.{name}.eigenfunction", entry["eigenfunction"], 1e-12, "stationary-blocks"))
        result.checks.append(at_most(f"blocks.{name}.stationarity", entry["stationarity"], 1e-10, "stationary-blocks"))
        result.checks.append(at_most(f"blocks.{name}.algebraic_identity", entry["algebraic_identity"], 1e-12, "stationary-blocks"))
        result.checks.append(at_most(f"blocks.{name}.pressure_ratio", entry["pressure_ratio"], PRESSURE_BOUND, "stationary-blocks"))

    # mean flux with c² from the exact solve at M_1: Σ|c|² k⊗k̄⊥ = 2M_1
    squares = solve_coefficients(one, one.base_matrix)
    block = make_block(BLOCK_GRID, lam, [k for k, _ in squares.squares], [float(c) ** 0.5 for _, c in squares.squares])
    measured = block_mean_flux(block)
    target = 2.0 * one.base_matrix.to_array()
    flux_errors = {
        "analytic": float(np.max(np.abs(analytic_mean_flux(block) - target))),
        "spectral": float(np.max(np.abs(measured - target))),
        "quadrature": float(np.max(np.abs(quadrature_mean_flux(block) - target))),
    }
    for name, value in flux_errors.items():
        result.checks.append(at_most(f"blocks.mean_flux_{name}", value / float(np.max(np.abs(target))), 1e-12, "stationary-blocks"))

    cutoff = make_cutoff(_WallSchedule(), 0)
    z = np.linspace(0.0, 2 * np.pi, 20001)
    values = cutoff.value(z)
    slope = float(np.max(np.abs(cutoff.derivative(z))))
    plateau = bool(np.all(values[cutoff.plateau_mask(z)] == 1.0))
    outside = (z < cutoff.support_start) | (z > 2 * np.pi - cutoff.support_start)
    result.checks.append(holds("cutoff.range", bool(np.all((values >= 0) & (values <= 1))), "cutoff"))
    result.checks.append(holds("cutoff.plateau", plateau, "cutoff"))
    result.checks.append(holds("cutoff.support", bool(np.all(values[outside] == 0.0)), "cutoff"))
    result.checks.append(at_most("cutoff.slope", slope, cutoff.slope_bound, "cutoff"))

    factorization = {}
    for name, (directions, amplitudes) in (("single_pair", cases["single_pair"]), ("family1", cases["family1"])):
        block = make_block(CUTOFF_GRID, lam, directions, amplitudes)
        pressure = block_pressure(block)
        r1, r2 = verify_cutoff_factorization(block, pressure, cutoff)
        u1, u2 = verify_cutoff_factorization(block, pressure, CutoffProfile.unit_profile())
        trace = boundary_trace(pressure, cutoff)
        factorization[name] = {"r1": r1, "r2": r2, "unit_r1": u1, "unit_r2": u2, "boundary_trace": trace}
        result.checks.append(at_most(f"cutoff.{name}.r1", r1, 1e-9, "cutoff-factorization"))
        result.checks.append(at_most(f"cutoff.{name}.r2", r2, 1e-9, "cutoff-factorization"))
        result.checks.append(at_most(f"cutoff.{name}.unit", max(u1, u2), 1e-12, "cutoff-factorization"))
        result.checks.append(at_most(f"cutoff.{name}.boundary_trace", trace, 0.0, "cutoff-factorization"))

    result.details = {
        "lambda": lam,
        "residuals": residuals,
        "mean_flux_errors": flux_errors,
        "cutoff": {
            "plateau_start": cutoff.plateau_start,
            "support_start": cutoff.support_start,
            "slope": slope,
            "slope_bound": cutoff.slope_bound,
        },
        "factorization": factorization,
    }
    result.elapsed = clock.perf_counter() - started
    logger.info("verify.blocks", passed=result.passed, checks=len(result.checks), elapsed=result.elapsed)
    return result
