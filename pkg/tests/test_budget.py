"""Filling budgets for one tunnel and for a whole thread system"""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from src.errors import InvariantViolation, ParameterError
from src.filling import ProfileParams, filling_budget, heights, iterated_budget
from src.geometry import ThreadSystem
from src.geometry.sphere import ball_volume, cap_area, sphere_volume
from src.tunnel import TunnelProfile, generate_profile, max_neck_radius, minimal_length, profile_volume


def test_heights_at_rho_equal_diam():
    h, h0 = heights(1.0, 1.0)
    assert h == pytest.approx(1.0)
    assert h0 == pytest.approx(math.sqrt(2.0 * math.pi + 8.0))


def test_heights_worked_example():
    h, h0 = heights(0.1, math.pi)
    assert h == pytest.approx(math.sqrt(0.2 * math.pi - 0.01))
    assert h0 == pytest.approx(math.sqrt(0.2 * math.pi ** 2 + 0.8))
    assert h == pytest.approx(0.786332, abs=1e-6)
    assert h0 == pytest.approx(1.665509, abs=1e-6)


def test_heights_shrink_with_rho():
    values = [heights(rho, math.pi) for rho in (0.1, 0.01, 1e-4, 1e-8)]
    assert all(a[0] > b[0] and a[1] > b[1] for a, b in zip(values, values[1:]))
    assert values[-1][0] < 1e-3 and values[-1][1] < 1e-3


@pytest.mark.parametrize("rho, diam, match", [
    (3.0, 1.0, "imaginary"),
    (0.0, 1.0, "rho"),
    (0.1, 0.0, "diam"),
])
def test_heights_reject(rho, diam, match):
    with pytest.raises(ParameterError, match=match):
        heights(rho, diam)


def test_cylinder_budget_closed_form():
    m, rho0, L = 2, 0.05, 1.0
    vol, diam = sphere_volume(2), math.pi
    budget = filling_budget(TunnelProfile.cylinder(m, rho0, L), vol, diam)

    h = math.sqrt(2.0 * rho0 * diam - rho0 ** 2)
    h0 = math.sqrt(2.0 * math.pi * rho0 * diam + 8.0 * rho0)
    pipe = 0.5 * math.pi * rho0 ** 2 * L
    pipe_slice = 2.0 * rho0 * L
    assert budget.h == pytest.approx(h)
    assert budget.h0 == pytest.approx(h0)
    assert budget.pipe_vol == pytest.approx(pipe)
    assert budget.pipe_slice_vol == pytest.approx(pipe_slice)
    assert budget.vol_bottom == pytest.approx(h0 * (vol + pipe_slice))
    assert budget.vol_mid == pytest.approx(rho0 * vol + pipe)
    assert budget.vol_top == pytest.approx(h * vol)
    assert budget.dF_bound == pytest.approx(budget.vol_bottom + budget.vol_mid + budget.vol_top)
    assert budget.dGH_bound == pytest.approx(h0 + 2.0 * math.pi * rho0 + h)
    assert budget.cusp_vol == pytest.approx(2.0 * cap_area(2, rho0) * rho0)
    assert budget.cusp_vol <= budget.rho * budget.vol
    assert budget.pipe_constant == pytest.approx(0.5 * math.pi)


def test_gh_bound_worked_example():
    budget = filling_budget(TunnelProfile.cylinder(2, 0.1, 1.0), sphere_volume(2), math.pi)
    by_hand = math.sqrt(0.2 * math.pi - 0.01) + 0.2 * math.pi + math.sqrt(0.2 * math.pi ** 2 + 0.8)
    assert abs(budget.dGH_bound - by_hand) <= 1e-10
    assert budget.dGH_bound == pytest.approx(3.080160, abs=1e-6)


def _half_tunnel_integral(k, rho0, rho, L):
    """Integral of r^k sqrt(1 - r'^2) over s >= 0, piece by piece in closed-form variables"""
    t_end = math.sqrt(rho0 ** -0.5 - 1.0)
    sigma_join = math.asin(rho0 ** 0.25)
    bend_length = rho0 * (3.0 * t_end + t_end ** 3)
    neck = 0.5 * L - bend_length - (rho - sigma_join)
    bend, _ = quad(lambda t: (1.0 + t * t) ** ((3 * k + 1) / 2.0), 0.0, t_end, epsrel=1e-13)
    collar, _ = quad(lambda s: math.sin(s) ** (k + 1), sigma_join, rho, epsrel=1e-13)
    return rho0 ** k * neck + 3.0 * rho0 ** (k + 1) * bend + collar


def test_tunnel_budget_on_the_unit_three_sphere():
    m, rho0, rho, L = 3, 0.02, 0.6, 2.0
    vol, diam = 2.0 * math.pi ** 2, math.pi
    budget = filling_budget(generate_profile(m, rho0, rho, L), vol, diam)

    pipe = ball_volume(3) * _half_tunnel_integral(3, rho0, rho, L)
    pipe_slice = 2.0 * ball_volume(2) * _half_tunnel_integral(2, rho0, rho, L)
    assert budget.pipe_vol == pytest.approx(pipe, rel=1e-6)
    assert budget.pipe_slice_vol == pytest.approx(pipe_slice, rel=1e-6)
    assert budget.h == pytest.approx(1.8465945, abs=1e-6)
    assert budget.h0 == pytest.approx(4.0796477, abs=1e-6)
    assert budget.dGH_bound == pytest.approx(9.6961534, abs=1e-6)
    expected_dF = budget.h0 * (vol + pipe_slice) + rho * vol + pipe + budget.h * vol
    assert budget.dF_bound == pytest.approx(expected_dF, rel=1e-9)
    assert budget.pipe_constant == pytest.approx(pipe / (L * rho0 ** 3), rel=1e-6)


def test_budget_grows_with_length_and_host():
    short = generate_profile(3, 0.02, 0.6, 2.0)
    long = generate_profile(3, 0.02, 0.6, 3.0)
    vol = sphere_volume(3)
    assert filling_budget(long, vol, math.pi).dF_bound > filling_budget(short, vol, math.pi).dF_bound
    assert filling_budget(short, 2 * vol, math.pi).dF_bound > filling_budget(short, vol, math.pi).dF_bound


def test_budget_trends_to_zero():
    bounds = [filling_budget(TunnelProfile.cylinder(2, r, 1.0), sphere_volume(2), math.pi)
              for r in (0.2, 0.1, 0.05, 0.01, 1e-4)]
    assert all(a.dF_bound > b.dF_bound for a, b in zip(bounds, bounds[1:]))
    assert all(a.dGH_bound > b.dGH_bound for a, b in zip(bounds, bounds[1:]))


@pytest.mark.parametrize("vol, diam", [(0.0, math.pi), (1.0, 0.5)])
def test_filling_budget_rejects(vol, diam):
    with pytest.raises(ParameterError):
        filling_budget(generate_profile(2, 0.02, 0.6, 2.0), vol, diam)


def test_filling_budget_reports_imaginary_height():
    with pytest.raises(ParameterError, match="imaginary"):
        filling_budget(generate_profile(2, 0.02, 0.6, 2.0), 1.0, 0.1)


def test_profile_params_validation():
    with pytest.raises(ParameterError):
        ProfileParams(rho0_factor=1.0)
    with pytest.raises(ParameterError):
        ProfileParams(L_policy='longest')


@pytest.fixture(scope="module")
def antipodal_thread():
    e = np.eye(3)
    return ThreadSystem.from_segments([(e[0], -e[0])], eps=0.5, rho=0.6)


def test_single_thread_matches_direct_budget(antipodal_thread):
    budget = iterated_budget(antipodal_thread)
    rho0 = 0.5 * max_neck_radius(0.6)
    assert budget.K == 1 and budget.count == 2
    assert budget.rho0 == pytest.approx(rho0)

    profile = generate_profile(2, rho0, 0.6, 2.0)
    host_vol = sphere_volume(2) + profile_volume(profile)
    direct = filling_budget(profile, host_vol, math.pi + 2.0)
    step = budget.per_step[0]
    assert step.L == pytest.approx(2.0)
    assert budget.host_volumes[0] == pytest.approx(host_vol, rel=1e-8)
    assert step.dF_bound == pytest.approx(direct.dF_bound, rel=1e-8)
    assert step.dGH_bound == pytest.approx(direct.dGH_bound, rel=1e-12)
    assert budget.total_dF == step.dF_bound


def test_min_policy_uses_shortest_tunnel(antipodal_thread):
    budget = iterated_budget(antipodal_thread, ProfileParams(L_policy='min'))
    rho0 = 0.5 * max_neck_radius(0.6)
    assert budget.per_step[0].L == pytest.approx(minimal_length(rho0, 0.6))


def test_iterated_totals(threads_05):
    budget = iterated_budget(threads_05)
    assert budget.K == threads_05.K == len(budget.per_step)
    assert budget.total_dF == pytest.approx(sum(b.dF_bound for b in budget.per_step))
    assert budget.total_dGH == pytest.approx(sum(b.dGH_bound for b in budget.per_step))
    assert all(a >= b for a, b in zip(budget.host_volumes, budget.host_volumes[1:]))
    assert budget.host_volumes[-1] > sphere_volume(2)
    assert budget.dF_per_eps == pytest.approx(budget.total_dF / threads_05.eps)
    assert set(budget.fitted_constants) == {'C1', 'C2', 'C3'}


def test_thread_count_invariant(threads_05):
    with pytest.raises(InvariantViolation):
        iterated_budget(threads_05.subsystem(0))


def test_empty_segment_system():
    budget = iterated_budget(ThreadSystem.from_segments([], eps=0.5, rho=0.01))
    assert budget.K == 0
    assert budget.total_dF == 0.0 and budget.per_step == ()


def test_requires_tunnel_radius():
    e = np.eye(3)
    with pytest.raises(ParameterError):
        iterated_budget(ThreadSystem.from_segments([(e[0], e[1])]))
