import numpy as np
import pytest

from qglab.services.scheme import EnergyProfile, chi, make_partition, normalize_base_energy


def test_partition_of_unity():
    profile = EnergyProfile(center=0.0, width=2.0)
    partition = make_partition(4.0, profile)
    times = np.linspace(-2.0, 2.0, 10_000)
    np.testing.assert_allclose(partition.sum_of_squares(times), 1.0, atol=1e-12)


def test_chi_shape():
    assert chi(np.array(0.0)) == 1.0
    assert chi(np.array(0.75)) == 0.0
    x = np.linspace(-0.8, 0.8, 801)
    np.testing.assert_allclose(chi(x), chi(-x))


def test_separated_windows_are_disjoint():
    partition = make_partition(2.0, EnergyProfile(width=1.0))
    times = np.linspace(-1.0, 1.0, 2001)
    for l in partition.indices:
        overlap = [partition.chi_l(l, t) * partition.chi_l(l + 2, t) for t in times]
        assert max(overlap) == 0.0
    assert partition.chi_l(1, partition.anchor(1)) == 1.0


def test_active_indices():
    partition = make_partition(4.0, EnergyProfile(width=1.0))
    assert partition.active(0.0) == [0]
    assert partition.active(0.5 / 4.0) == [0, 1]


def test_bump_profile():
    profile = EnergyProfile(center=1.0, width=2.0, height=3.0)
    assert profile(1.0) == pytest.approx(3.0)
    assert profile(3.0) == 0.0
    assert profile(-1.5) == 0.0
    assert profile.radius == 3.0


def test_zero_profile():
    profile = EnergyProfile(kind="zero")
    assert profile.is_zero
    assert profile(0.0) == 0.0
    assert profile.maximum == 0.0


def test_base_energy_normalization():
    scaled, factor = normalize_base_energy(EnergyProfile(height=4.0), 1.0)
    assert factor == pytest.approx(0.25)
    assert scaled.maximum == pytest.approx(1.0)
    same, one = normalize_base_energy(EnergyProfile(height=0.5), 1.0)
    assert one == 1.0
    assert same.maximum == 0.5
