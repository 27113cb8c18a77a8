import pytest

from qglab.core.errors import ParameterError
from qglab.services.scheme import ManualSchedule, check_inequalities, make_schedule, wall_scale


def test_lambda_is_lattice_rounded():
    schedule = make_schedule(26, 1.03, 2.6, 0.01, 0.005, 0.01)
    lam0 = schedule.lam(0)
    assert lam0 % 13 == 0
    assert lam0 >= 26 ** 2.6 > lam0 - 13
    assert schedule.lam(1) > lam0
    assert schedule.zeta_max == pytest.approx(1 / 5.2)


def test_planar_lattice():
    schedule = make_schedule(65, 1.03, 2.6, 0.01, 0.005, 0.01, lattice=65)
    assert schedule.lam(0) % 65 == 0


@pytest.mark.parametrize(
    "a, b, c, beta, alpha, eta",
    [
        (27, 1.03, 2.6, 0.01, 0.005, 0.01),
        (13, 1.03, 2.6, 0.01, 0.005, 0.01),
        (26, 1.0, 2.6, 0.01, 0.005, 0.01),
        (26, 1.03, 2.0, 0.01, 0.005, 0.01),
        (26, 1.03, 2.6, 0.01, 0.02, 0.01),
        (26, 1.03, 2.6, 0.01, 0.005, 1.5),
    ],
)
def test_invalid_schedules(a, b, c, beta, alpha, eta):
    with pytest.raises(ParameterError):
        make_schedule(a, b, c, beta, alpha, eta)


def test_stage_parameters_follow_the_schedule():
    schedule = make_schedule(26, 1.03, 2.6, 0.01, 0.005, 0.01)
    params = schedule.stage(0)
    assert params.lam == schedule.lam(0)
    assert params.lam_next == schedule.lam(1)
    assert params.delta_after < params.delta_next < 1
    assert params.mu == pytest.approx(
        (schedule.delta(0) * schedule.delta(1)) ** 0.25 * (schedule.lam(0) * schedule.lam(1)) ** 0.5
    )
    assert (params.l_next, params.l_after) == (wall_scale(1), wall_scale(2)) == (4, 8)


def test_first_two_inequalities_hold():
    report = check_inequalities(make_schedule(26, 1.03, 2.6, 0.01, 0.005, 0.01), 0)
    assert len(report.checks) == 7
    assert report.checks[0].passed
    assert report.checks[1].passed
    assert report.checks[0].exact


def test_first_inequality_fails_for_small_b():
    report = check_inequalities(make_schedule(26, 1.001, 2.6, 0.01, 0.005, 0.01), 0)
    assert not report.checks[0].passed
    assert 1 in report.failed()


def test_manual_schedule_describes_stage_zero():
    schedule = ManualSchedule(13, 130, 1.0, 0.5, 4.0)
    params = schedule.stage(0)
    assert (params.lam, params.lam_next, params.separation) == (13, 130, 10)
    assert params.ell == pytest.approx(13 ** -0.75 * 130 ** -0.25)
    assert schedule.zeta_max is None
    with pytest.raises(ParameterError):
        schedule.stage(1)


@pytest.mark.parametrize(
    "args",
    [(26, 13, 1.0, 0.5, 4.0), (13, 26, 0.5, 1.0, 4.0), (13, 26, 1.0, 0.5, 0.0)],
)
def test_manual_schedule_validation(args):
    with pytest.raises(ParameterError):
        ManualSchedule(*args)
