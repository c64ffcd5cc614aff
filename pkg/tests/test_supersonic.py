import numpy as np
import pytest

from nozzleshock.errors import OutOfDomain, SonicBreakdown
from nozzleshock.forcing import BoundaryForcing, Waveform
from nozzleshock.supersonic import SupersonicGrids, sample_forcing_at_shock, solve_supersonic_periodic

EPS = 1e-3


def inlet_forcing(eps=EPS):
    return BoundaryForcing(1.0, eps, rho_l=Waveform.sine())


def solve(bg, forcing, n=128):
    return solve_supersonic_periodic(bg.profile, bg, forcing, SupersonicGrids(n_t=n, n_x=n))


@pytest.fixture(scope="module")
def field(background):
    return solve(background, inlet_forcing())


def test_zero_forcing_is_zero(background):
    f = solve(background, BoundaryForcing(1.0, 0.0))
    for name in ("rho_bar", "u_bar", "dt_rho_bar", "dx_u_bar"):
        assert np.max(np.abs(getattr(f, name))) < 1e-10


def test_periodic_and_inlet_exact(field):
    assert field.periodicity_defect < 1e-8
    t = field.t_grid
    assert np.max(np.abs(field.rho_bar[:, 0] - EPS * np.sin(2 * np.pi * t))) < 1e-14
    assert np.max(np.abs(field.u_bar[:, 0])) < 1e-14
    assert np.max(np.abs(field.rho_bar)) > 0.5 * EPS


def test_window_covers_crossing(background, field):
    u = background.supersonic.u
    assert field.window_periods >= np.ceil(field.x_grid[-1] / np.min(u - 1.0))


def test_linear_response(background, field):
    half = solve(background, inlet_forcing(EPS / 2))
    assert half.sup_over_eps == pytest.approx(field.sup_over_eps, rel=0.1)


def test_speeds_stay_supersonic(background, field):
    _, us = background.supersonic.at(field.x_grid)
    assert np.min(us[None, :] + field.u_bar - 1.0) > 0.0


def test_sample_node_and_zero(background, field):
    i, j = 17, 40
    v = field.sample("rho_bar", field.t_grid[i], field.x_grid[j])
    assert v == pytest.approx(field.rho_bar[i, j], abs=1e-15)
    z = solve(background, BoundaryForcing(1.0, 0.0), n=32)
    out = sample_forcing_at_shock(z, 0.3, 0.5)
    assert all(abs(v) < 1e-12 for v in out.values())
    with pytest.raises(OutOfDomain):
        field.sample("u_bar", 0.0, 0.9)


def test_sample_periodic_in_t(field):
    a = field.sample("u_bar", 0.37, 0.41)
    b = field.sample("u_bar", 1.37, 0.41)
    assert a == pytest.approx(b, abs=1e-15)


def test_interpolation_refinement(background, field):
    fine = solve(background, inlet_forcing(), n=256)
    ts = np.linspace(0.013, 0.97, 23)
    xs = np.linspace(0.02, 0.55, 23)
    for name in ("rho_bar", "u_bar"):
        d = np.abs(field.sample(name, ts, xs) - fine.sample(name, ts, xs))
        assert np.max(d) < 1e-6


def test_sonic_breakdown(background):
    strong = BoundaryForcing(1.0, 1.05, u_l=Waveform.sine())
    with pytest.raises(SonicBreakdown):
        solve(background, strong, n=32)
