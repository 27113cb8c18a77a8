from fractions import Fraction

import numpy as np
import pytest

from qglab.core.errors import LatticeError, ModeFamilyError, OutOfBallError, PlanarityError
from qglab.services.exact_modes import (
    LATTICE_SCALE,
    ModeMatrix,
    RationalDirection,
    build_family,
    epsilon_ball,
    families,
    family_for_index,
    interaction_gap,
    mode_matrix,
    sample_symmetric_offset,
    solve_coefficients,
    verify_unit_sum,
)


def test_first_family_contains_pythagorean_direction():
    family = build_family(1)
    assert RationalDirection((5, 0, 12), 13) in family.positive
    assert len(family.directions) == 10
    assert family.center_coefficient == Fraction(1, 10)


def test_second_family_is_reflection_of_first():
    one, two = families()
    assert RationalDirection((0, 5, -12), 13) in two.positive
    assert not set(one.directions) & set(two.directions)


@pytest.mark.parametrize("planar", [False, True])
def test_families_are_lattice_unit_vectors(planar):
    scale = LATTICE_SCALE[planar]
    for family in families(planar):
        assert family.determinant != 0
        for k in family.directions:
            n = k.scaled(scale)
            assert sum(v * v for v in n) == scale ** 2
            assert -k in family.directions


def test_mode_matrix_is_exact():
    m = mode_matrix(RationalDirection((5, 0, 12), 13))
    assert m.coordinates() == (0, Fraction(25, 169), 0, 0, Fraction(60, 169))
    assert mode_matrix(RationalDirection((-5, 0, -12), 13)) == m


def test_invalid_family_index():
    with pytest.raises(ModeFamilyError):
        build_family(3)


@pytest.mark.parametrize("numerators", [(1, 1, 1), (0, 0, 13)])
def test_direction_must_be_off_axis_unit_vector(numerators):
    with pytest.raises(ModeFamilyError):
        RationalDirection(numerators, 13)


def test_scaled_requires_lattice_multiple():
    k = RationalDirection((3, 4, 12), 13)
    assert k.scaled(26) == (6, 8, 24)
    with pytest.raises(LatticeError):
        k.scaled(5)


def test_mode_matrix_rejects_third_column():
    with pytest.raises(ModeFamilyError):
        ModeMatrix(((0, 0, 1), (0, 0, 0), (0, 0, 0)))


@pytest.mark.parametrize("planar", [False, True])
def test_center_solve_has_equal_coefficients(planar):
    for family in families(planar):
        solve = solve_coefficients(family, family.base_matrix)
        assert all(c == family.center_coefficient for _, c in solve.squares)
        assert solve.total == 1


def test_random_targets_in_ball_reconstruct(rng):
    family = build_family(1)
    for _ in range(20):
        target = family.base_matrix + sample_symmetric_offset(family, rng)
        solve = solve_coefficients(family, target)
        assert solve.reconstruct() == target
        assert solve.total == 1
        assert all(c > 0 for _, c in solve.squares)


def test_unit_sum_depends_on_symmetric_offset():
    family = build_family(1)
    s = Fraction(1, 1000)
    symmetric = family.base_matrix + ModeMatrix.from_coordinates([0, s, s, 0, 0])
    skew = family.base_matrix + ModeMatrix.from_coordinates([0, s, 0, 0, 0])
    assert verify_unit_sum(family, symmetric) == 1
    assert verify_unit_sum(family, skew) != 1


def test_target_outside_cone_is_rejected():
    family = build_family(2)
    with pytest.raises(OutOfBallError):
        solve_coefficients(family, -family.base_matrix)


def test_epsilon_ball_is_positive():
    for planar in (False, True):
        for family in families(planar):
            assert epsilon_ball(family) > 0


def test_planar_family_rejects_vertical_row():
    family = build_family(1, planar=True)
    with pytest.raises(PlanarityError):
        family.coordinates_of(ModeMatrix.from_coordinates([0, 0, 0, 1, 0]))


def test_family_alternates_with_index():
    assert family_for_index(1).index == 1
    assert family_for_index(2).index == 2
    assert family_for_index(-1).index == 1


def test_interaction_gap_of_both_families():
    for planar in (False, True):
        one, two = families(planar)
        gap = interaction_gap(one.directions + two.directions)
        assert gap >= Fraction(1, LATTICE_SCALE[planar] ** 2)


def test_coefficient_operator_matches_exact_inverse():
    family = build_family(1)
    coords = np.array([float(v) for v in family.base_matrix.coordinates()])
    squares = family.coefficient_operator() @ coords
    np.testing.assert_allclose(squares, 0.1, rtol=1e-14)
