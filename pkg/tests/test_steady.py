import numpy as np
import pytest

from nozzleshock.errors import ExitDensityUnattainable, OutOfDomain, SonicApproach, StepCountTooSmall
from nozzleshock.gas import GasState, Regime
from nozzleshock.nozzle import Exponential, NozzleProfile
from nozzleshock.steady import (FitOptions, Side, background_at, exit_density_for_shock,
                                fit_transonic, integrate_branch)

from conftest import REF_EXIT_DENSITY

# independent DOP853 solution (rtol 1e-13) of the steady pair for the reference nozzle
ORACLE_LEFT_AT_HALF = (0.9673041979984645, 2.016552629558382)
ORACLE_LEFT_AT_ONE = (0.9358424202735316, 2.0328837502849786)
ORACLE_EXIT_DENSITY = 3.9643654021729513


def test_constant_area_is_constant():
    p = NozzleProfile(1.0, Exponential(0.0), allow_degenerate=True)
    br = integrate_branch(p, GasState(1.3, 2.0), 0.0, 1.0, 100)
    assert np.all(br.rho == 1.3) and np.all(br.u == 2.0)


def test_supersonic_branch_accelerates(profile, inlet):
    br = integrate_branch(profile, inlet, 0.0, 1.0, 2000)
    assert br.u[-1] > 2.0 and br.rho[-1] < 1.0
    assert np.all(np.diff(br.u) > 0) and np.all(np.diff(br.rho) < 0)
    assert br.regime is Regime.SUPERSONIC


def test_branch_against_independent_oracle(profile, inlet):
    br = integrate_branch(profile, inlet, 0.0, 1.0, 2000)
    assert br.rho[-1] == pytest.approx(ORACLE_LEFT_AT_ONE[0], rel=1e-12)
    assert br.u[-1] == pytest.approx(ORACLE_LEFT_AT_ONE[1], rel=1e-12)


def test_branch_refinement(profile, inlet):
    a = integrate_branch(profile, inlet, 0.0, 1.0, 200)
    b = integrate_branch(profile, inlet, 0.0, 1.0, 2000)
    dev = max(np.max(np.abs(b.rho[::10] / a.rho - 1)), np.max(np.abs(b.u[::10] / a.u - 1)))
    assert dev < 1e-9


def test_backward_integration_ascending(profile):
    br = integrate_branch(profile, GasState(4.0, 0.5), 0.6, 0.4, 400)
    assert br.x_grid[0] == pytest.approx(0.4) and br.x_grid[-1] == pytest.approx(0.6)
    assert br.rho[-1] == 4.0 and br.u[-1] == 0.5
    assert np.all(np.diff(br.u) < 0) and np.all(np.diff(br.rho) > 0)


def test_branch_errors(profile):
    with pytest.raises(StepCountTooSmall):
        integrate_branch(profile, GasState(1.0, 2.0), 0.0, 1.0, 0)
    with pytest.raises(SonicApproach):
        integrate_branch(profile, GasState(1.0, 1.0), 0.0, 1.0, 10)
    strong = NozzleProfile(1.0, Exponential(2.0))
    with pytest.raises(SonicApproach):
        integrate_branch(strong, GasState(1.0, 1.05), 1.0, 0.0, 1000)


def test_mass_flux_conserved(background):
    p = background.profile
    for br in (background.supersonic, background.subsonic):
        q = br.rho * br.u * p.area(br.x_grid)
        assert np.max(np.abs(q / q[0] - 1)) < 1e-9


def test_exit_density_forward_matches_oracle(profile, inlet):
    assert exit_density_for_shock(profile, inlet, 0.5) == pytest.approx(ORACLE_EXIT_DENSITY, rel=1e-12)
    assert REF_EXIT_DENSITY == pytest.approx(ORACLE_EXIT_DENSITY, rel=1e-14)


def test_round_trip_fit(background):
    assert abs(background.x_star - 0.5) < 1e-8
    assert background.rho_l == pytest.approx(ORACLE_LEFT_AT_HALF[0], rel=1e-10)
    assert background.u_l == pytest.approx(ORACLE_LEFT_AT_HALF[1], rel=1e-10)
    assert abs(background.fit_residual) < 1e-10


def test_steady_jump_residual(background):
    rl, ul = background.rho_l, background.u_l
    rr, ur = (float(v) for v in background.subsonic.at(background.x_star))
    assert abs(rr - rl * ul ** 2) + abs(ur - 1 / ul) < 1e-10


def test_subsonic_exit_matches_target(background):
    assert abs(background.subsonic.rho[-1] - REF_EXIT_DENSITY) < 1e-10


def test_extensions(background):
    d = background.delta
    assert d == pytest.approx(min(2 * np.sqrt(1e-3), 0.25))
    assert background.supersonic.x_grid[-1] == pytest.approx(0.5 + d)
    assert background.subsonic.x_grid[0] == pytest.approx(0.5 - d)
    assert np.all(np.diff(background.subsonic.u) < 0)
    assert np.all(np.diff(background.supersonic.u) > 0)


def test_monotone_sweep(profile, inlet, background):
    lo, hi = background.attainable
    targets = np.linspace(lo, hi, 12)[1:-1]
    xs = [fit_transonic(profile, inlet, t, FitOptions(steps_per_unit=500)).x_star for t in targets]
    assert np.all(np.diff(xs) < 0)
    assert background.direction == "decreasing"


def test_unattainable(profile, inlet, background):
    with pytest.raises(ExitDensityUnattainable) as exc:
        fit_transonic(profile, inlet, 10.0)
    lo, hi = exc.value.interval
    assert (lo, hi) == pytest.approx(background.attainable)


def test_fit_deterministic(profile, inlet, background):
    again = fit_transonic(profile, inlet, REF_EXIT_DENSITY, FitOptions(eps=1e-3))
    assert again.x_star == background.x_star
    assert np.array_equal(again.subsonic.rho, background.subsonic.rho)


def test_background_at(background):
    br = background.supersonic
    s = background_at(background, float(br.x_grid[7]), Side.LEFT)
    assert s.rho == br.rho[7] and s.u == br.u[7]
    xm = 0.5 * float(br.x_grid[7] + br.x_grid[8])
    s = background_at(background, xm, Side.LEFT)
    assert s.u == pytest.approx(0.5 * (br.u[7] + br.u[8]), rel=1e-15)
    with pytest.raises(OutOfDomain):
        background_at(background, 0.95, Side.LEFT)


def test_background_refinement(profile, inlet, background):
    fine = fit_transonic(profile, inlet, REF_EXIT_DENSITY, FitOptions(eps=1e-3, steps_per_unit=4000))
    xs = np.linspace(0.46, 0.98, 41)
    a, b = background.subsonic.at(xs), fine.subsonic.at(xs)
    assert max(np.max(np.abs(a[0] - b[0])), np.max(np.abs(a[1] - b[1]))) < 1e-6
