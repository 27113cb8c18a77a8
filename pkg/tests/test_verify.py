import pytest

from qglab.services import certify_blocks, certify_modes, certify_operators
from qglab.services.checks import at_most, holds, within


def test_check_helpers():
    assert at_most("x", 1.0, 2.0, "a").passed
    assert not at_most("x", float("nan"), 2.0, "a").passed
    assert not within("x", 3.0, 0.0, 2.0, "a").passed
    check = holds("x", False, "a", enforced=False)
    assert not check.passed and not check.enforced


def test_mode_certificate_passes():
    result = certify_modes(seed=0)
    assert result.passed, [c.name for c in result.checks if not c.passed]
    names = {c.name for c in result.checks}
    assert "modes.3d.family1.unit_sum" in names
    assert "modes.planar.family2.epsilon_maximal" in names
    assert "modes.unit_sum_skew_offset" in names
    assert result.details["3d.family1"]["center_coefficient"] == "1/10"
    assert result.details["planar.family1"]["center_coefficient"] == "1/6"


def test_mode_certificate_is_seed_independent_in_verdict():
    assert certify_modes(seed=7).passed


@pytest.mark.slow
def test_operator_certificate_passes():
    result = certify_operators(seed=0, samples=3)
    assert result.passed, [(c.name, c.value) for c in result.checks if not c.passed]
    assert set(result.details["bernstein"]) == {"E", "I", "D", "inv_gradperp"}


@pytest.mark.slow
def test_block_certificate_passes():
    result = certify_blocks(seed=0)
    assert result.passed, [(c.name, c.value) for c in result.checks if not c.passed]
    assert result.details["lambda"] == 13
    assert result.details["cutoff"]["slope"] <= result.details["cutoff"]["slope_bound"]
