"""Exact rational direction families, their mode matrices k ⊗ k̄⊥ and the coefficient solve."""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from ..core.errors import LatticeError, ModeFamilyError, OutOfBallError, PlanarityError

# Positive half of the first 3D family, numerators over 13 (Pythagorean triples 5-12-13 and 3-4-5).
_OMEGA1_POSITIVE = ((5, 0, 12), (3, 4, -12), (3, -4, 12), (0, 5, 12), (3, 4, 12))
# Planar families as (numerators, denominator); third component zero.
_PLANAR_POSITIVE = {
    1: (((1, 0, 0), 1), ((0, 1, 0), 1), ((3, 4, 0), 5)),
    2: (((4, 3, 0), 5), ((5, 12, 0), 13), ((12, 5, 0), 13)),
}
LATTICE_SCALE = {False: 13, True: 65}


def _fraction_str(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class RationalDirection:
    """Unit vector with rational components, stored in lowest terms."""

    numerators: tuple[int, int, int]
    common_denominator: int = 13

    def __post_init__(self):
        nums = tuple(int(n) for n in self.numerators)
        den = int(self.common_denominator)
        if len(nums) != 3 or den <= 0:
            raise ModeFamilyError(f"Invalid direction {self.numerators}/{self.common_denominator}")
        if sum(n * n for n in nums) != den * den:
            raise ModeFamilyError(f"Direction {nums}/{den} is not a unit vector")
        if nums[0] == 0 and nums[1] == 0:
            raise ModeFamilyError(f"Direction {nums}/{den} lies on the z-axis")
        g = gcd(den, *nums)
        object.__setattr__(self, "numerators", tuple(n // g for n in nums))
        object.__setattr__(self, "common_denominator", den // g)

    @property
    def components(self) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(Fraction(n, self.common_denominator) for n in self.numerators)

    @property
    def horizontal_perp(self) -> tuple[Fraction, Fraction, Fraction]:
        k1, k2, _ = self.components
        return (-k2, k1, Fraction(0))

    def __neg__(self) -> "RationalDirection":
        return RationalDirection(tuple(-n for n in self.numerators), self.common_denominator)

    def reflect(self) -> "RationalDirection":
        """(k1, k2, k3) -> (k2, k1, -k3): the map producing the second 3D family."""
        n1, n2, n3 = self.numerators
        return RationalDirection((n2, n1, -n3), self.common_denominator)

    def is_lattice_compatible(self, lam: int) -> bool:
        return all((lam * n) % self.common_denominator == 0 for n in self.numerators)

    def scaled(self, lam: int) -> tuple[int, int, int]:
        """Integer frequency λk."""
        if not self.is_lattice_compatible(lam):
            raise LatticeError(f"λk is not an integer vector for λ={lam}, k={self}")
        return tuple(lam * n // self.common_denominator for n in self.numerators)

    def as_array(self) -> np.ndarray:
        return np.array(self.numerators, dtype=float) / self.common_denominator

    def __str__(self) -> str:
        return "({},{},{})/{}".format(*self.numerators, self.common_denominator)


@dataclass(frozen=True)
class ModeMatrix:
    """Exact 3×3 matrix of the class [[m1, m2, 0], [m3, −m1, 0], [m4, m5, 0]]."""

    entries: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.entries)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ModeFamilyError("Mode matrices are 3×3")
        if any(r[2] != 0 for r in rows):
            raise ModeFamilyError("Mode matrix third column must vanish")
        if rows[0][0] + rows[1][1] != 0:
            raise ModeFamilyError("Mode matrix top-left block must be trace-free")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def zero(cls) -> "ModeMatrix":
        return cls(((0, 0, 0), (0, 0, 0), (0, 0, 0)))

    @classmethod
    def from_coordinates(cls, coords: Sequence[Fraction]) -> "ModeMatrix":
        """Inverse of `coordinates`; three coordinates give a planar matrix."""
        coords = [Fraction(c) for c in coords]
        if len(coords) == 3:
            coords = coords + [Fraction(0), Fraction(0)]
        if len(coords) != 5:
            raise ModeFamilyError(f"Expected 3 or 5 coordinates, got {len(coords)}")
        m1, m2, m3, m4, m5 = coords
        return cls(((m1, m2, 0), (m3, -m1, 0), (m4, m5, 0)))

    def coordinates(self) -> tuple[Fraction, ...]:
        e = self.entries
        return (e[0][0], e[0][1], e[1][0], e[2][0], e[2][1])

    @property
    def is_planar(self) -> bool:
        return self.entries[2][0] == 0 and self.entries[2][1] == 0

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coordinates())

    def __add__(self, other: "ModeMatrix") -> "ModeMatrix":
        return ModeMatrix.from_coordinates([a + b for a, b in zip(self.coordinates(), other.coordinates())])

    def __sub__(self, other: "ModeMatrix") -> "ModeMatrix":
        return ModeMatrix.from_coordinates([a - b for a, b in zip(self.coordinates(), other.coordinates())])

    def __neg__(self) -> "ModeMatrix":
        return ModeMatrix.from_coordinates([-a for a in self.coordinates()])

    def __mul__(self, scalar) -> "ModeMatrix":
        s = Fraction(scalar)
        return ModeMatrix.from_coordinates([s * a for a in self.coordinates()])

    __rmul__ = __mul__

    def to_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def as_strings(self) -> list[list[str]]:
        return [[_fraction_str(v) for v in row] for row in self.entries]


def mode_matrix(k: RationalDirection) -> ModeMatrix:
    """Exact k ⊗ k̄⊥ with k̄⊥ = (−k2, k1, 0)."""
    kc = k.components
    perp = k.horizontal_perp
    return ModeMatrix(tuple(tuple(kc[i] * perp[j] for j in range(3)) for i in range(3)))


def _invert(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ModeFamilyError("Mode matrices of the family are linearly dependent")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _determinant(matrix: list[list[Fraction]]) -> Fraction:
    rows = [list(r) for r in matrix]
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] / rows[col][col]
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return det


@dataclass(frozen=True)
class DirectionFamily:
    index: int
    planar: bool
    positive: tuple[RationalDirection, ...]
    base_matrix: ModeMatrix
    ball_radius: Fraction
    determinant: Fraction
    # exact inverse of the coordinate matrix of {mode_matrix(k) : k in positive}
    inverse: tuple[tuple[Fraction, ...], ...] = field(repr=False, compare=False)

    @property
    def directions(self) -> tuple[RationalDirection, ...]:
        return self.positive + tuple(-k for k in self.positive)

    @property
    def center_coefficient(self) -> Fraction:
        return Fraction(1, 2 * len(self.positive))

    @property
    def lattice_scale(self) -> int:
        return LATTICE_SCALE[self.planar]

    def coordinates_of(self, matrix: ModeMatrix) -> tuple[Fraction, ...]:
        coords = matrix.coordinates()
        if not self.planar:
            return coords
        if not matrix.is_planar:
            raise PlanarityError("Planar families only decompose matrices with a zero third row")
        return coords[:3]

    def coefficient_operator(self) -> np.ndarray:
        """Float copy of the exact inverse: squared coefficients on the positive half from coordinates."""
        return np.array([[float(v) for v in row] for row in self.inverse])


def _family_coordinates(k: RationalDirection, planar: bool) -> tuple[Fraction, ...]:
    coords = mode_matrix(k).coordinates()
    return coords[:3] if planar else coords


@lru_cache(maxsize=None)
def build_family(j: int, planar: bool = False) -> DirectionFamily:
    """
    Build direction family j. 3D: Ω_1⁺ from the 5-12-13/3-4-5 triples and Ω_2 by the
    reflection (k1, k2, k3) -> (k2, k1, −k3). Planar: the fixed k3 = 0 families.
    """
    if j not in (1, 2):
        raise ModeFamilyError(f"Invalid family index {j}; only families 1 and 2 exist")
    if planar:
        positive = tuple(RationalDirection(n, d) for n, d in _PLANAR_POSITIVE[j])
    else:
        base = tuple(RationalDirection(n, 13) for n in _OMEGA1_POSITIVE)
        positive = base if j == 1 else tuple(k.reflect() for k in base)
    scale = LATTICE_SCALE[planar]
    for k in positive:
        if not k.is_lattice_compatible(scale):
            raise ModeFamilyError(f"{scale}·k is not integral for k={k}")
        if planar and k.numerators[2] != 0:
            raise ModeFamilyError(f"Planar direction {k} has a vertical component")

    columns = [_family_coordinates(k, planar) for k in positive]
    dim = len(columns)
    coordinate_matrix = [[columns[c][r] for c in range(dim)] for r in range(dim)]
    determinant = _determinant(coordinate_matrix)
    inverse = _invert(coordinate_matrix)

    center = Fraction(1, 2 * dim)
    base_matrix = ModeMatrix.zero()
    for k in positive:
        base_matrix = base_matrix + center * mode_matrix(k)
    # each squared coefficient is affine in the coordinates; the max-norm ball is bounded by the l1 row norms
    radius = min(center / sum(abs(v) for v in row) for row in inverse)
    return DirectionFamily(
        index=j,
        planar=planar,
        positive=positive,
        base_matrix=base_matrix,
        ball_radius=radius,
        determinant=determinant,
        inverse=tuple(tuple(row) for row in inverse),
    )


@dataclass(frozen=True)
class CoefficientSolve:
    matrix: ModeMatrix
    squares: tuple[tuple[RationalDirection, Fraction], ...]

    def __post_init__(self):
        if self.matrix != self.reconstruct():
            raise ModeFamilyError("Coefficient solve does not reconstruct its target")

    def __getitem__(self, k: RationalDirection) -> Fraction:
        for direction, value in self.squares:
            if direction == k:
                return value
        raise KeyError(str(k))

    @property
    def total(self) -> Fraction:
        return sum((c for _, c in self.squares), Fraction(0))

    @property
    def on_boundary(self) -> bool:
        """True when some coefficient vanishes (the target sits on the edge of the positive cone)."""
        return any(c == 0 for _, c in self.squares)

    def reconstruct(self) -> ModeMatrix:
        out = ModeMatrix.zero()
        for k, c in self.squares:
            out = out + (c / 2) * mode_matrix(k)
        return out


def solve_coefficients(family: DirectionFamily, matrix: ModeMatrix) -> CoefficientSolve:
    """Exact squared coefficients c²_{j,k} with M = ½ Σ_{k∈Ω_j} c² k ⊗ k̄⊥."""
    coords = family.coordinates_of(matrix)
    positive_squares = [sum((a * b for a, b in zip(row, coords)), Fraction(0)) for row in family.inverse]
    negative = [(k, c) for k, c in zip(family.positive, positive_squares) if c < 0]
    if negative:
        k, c = negative[0]
        raise OutOfBallError(f"Target leaves the positivity region: c² = {_fraction_str(c)} for k={k}")
    squares = tuple(zip(family.positive, positive_squares)) + tuple(
        (-k, c) for k, c in zip(family.positive, positive_squares)
    )
    return CoefficientSolve(matrix=matrix, squares=squares)


def verify_unit_sum(family: DirectionFamily, matrix: ModeMatrix) -> Fraction:
    return solve_coefficients(family, matrix).total


def epsilon_ball(family: DirectionFamily) -> Fraction:
    return family.ball_radius


def families(planar: bool = False) -> tuple[DirectionFamily, DirectionFamily]:
    return build_family(1, planar), build_family(2, planar)


def family_for_index(l: int, planar: bool = False) -> DirectionFamily:
    """Odd time-partition indices draw from family 1, even ones from family 2."""
    return build_family(1 if l % 2 else 2, planar)


def interaction_gap(directions: Iterable[RationalDirection]) -> Fraction:
    """
    Smallest nonzero |k̄ + k̄'|² over all pairs. Pairs with k̄ + k̄' = 0 only produce
    z-dependent, horizontally constant products, which ∇̄· annihilates.
    """
    dirs = list(directions)
    best = None
    for a in dirs:
        for b in dirs:
            ka, kb = a.components, b.components
            s = (ka[0] + kb[0]) ** 2 + (ka[1] + kb[1]) ** 2
            if s != 0 and (best is None or s < best):
                best = s
    return best if best is not None else Fraction(0)


def sample_symmetric_offset(family: DirectionFamily, rng: np.random.Generator, scale: Fraction = Fraction(99, 100)) -> ModeMatrix:
    """Random exact class-M offset with symmetric top block and max-norm below scale·ε."""
    bound = family.ball_radius * scale

    def draw() -> Fraction:
        return Fraction(int(rng.integers(-1000, 1001)), 1000) * bound

    m1, m2 = draw(), draw()
    if family.planar:
        return ModeMatrix.from_coordinates([m1, m2, m2])
    return ModeMatrix.from_coordinates([m1, m2, m2, draw(), draw()])


def coordinate_fields(matrix: np.ndarray, planar: bool) -> np.ndarray:
    """Class-M coordinates of a float matrix field of shape (3, 3, ...)."""
    coords = [matrix[0, 0], matrix[0, 1], matrix[1, 0]]
    if not planar:
        coords += [matrix[2, 0], matrix[2, 1]]
    return np.stack(coords)
