import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from nozzleshock.errors import VacuumAtExit
from nozzleshock.forcing import BoundaryForcing, Waveform
from nozzleshock.gas import GasState
from nozzleshock.nozzle import Exponential, NozzleProfile
from nozzleshock.shock import eval_F, linearization, scaling_config
from nozzleshock.steady import FitOptions, exit_density_for_shock, fit_transonic
from nozzleshock.subsonic import (IterationOptions, PeriodicField, exit_forcing_phi,
                                  modulus_of_continuity, run_iteration, shock_step, steady_curve,
                                  transport_step, zero_field)
from nozzleshock.supersonic import SupersonicGrids, solve_supersonic_periodic

from conftest import EPS, N_GRID, reference_forcing

N = 64


@pytest.fixture(scope="module")
def small(background, scaling):
    opts = IterationOptions(n_t=N, n_x=N)
    quiet = solve_supersonic_periodic(background.profile, background, BoundaryForcing(1.0, 0.0),
                                      SupersonicGrids(n_t=N, n_x=N))
    zero = zero_field(background, 1.0, scaling.alpha, opts, EPS)
    return opts, quiet, zero, steady_curve(background, 1.0, N)


def test_exit_forcing_phi_examples(background):
    phi = exit_forcing_phi(BoundaryForcing(1.0, 0.0), background)
    assert phi(0.3) == 0.0
    rho_L = float(background.subsonic.rho[-1])
    const = BoundaryForcing(1.0, 0.01 * rho_L, rho_r=Waveform(((0, 1.0, 0.0),)))
    assert exit_forcing_phi(const, background)(0.7) == pytest.approx(2 * math.log(1 / 1.01), rel=1e-14)
    assert 2 * math.log(1 / 1.01) == pytest.approx(-0.019901, abs=1e-6)
    with pytest.raises(VacuumAtExit):
        exit_forcing_phi(BoundaryForcing(1.0, 2 * rho_L, rho_r=Waveform.sine()), background)


def test_exit_forcing_c1_bound(background):
    f = reference_forcing()
    phi = exit_forcing_phi(f, background)
    t = np.linspace(0.0, 1.0, 4097)
    h = 1e-6
    vals = phi(t)
    der = (phi(t + h) - phi(t - h)) / (2 * h)
    rho_L = float(background.subsonic.rho[-1])
    c1 = max(np.max(np.abs(vals)), np.max(np.abs(der)))
    bound = 2 / rho_L * f.c1_norms()["rho_r"]
    assert c1 <= bound * (1 + 2 * EPS / rho_L)
    assert c1 >= bound * (1 - 2 * EPS / rho_L)


def test_transport_zero_data(background, scaling, small):
    opts, quiet, zero, curve = small
    out = transport_step(zero, curve, quiet, BoundaryForcing(1.0, 0.0), background, scaling, opts)
    assert np.max(np.abs(out.phi1_hat)) == 0.0
    assert np.max(np.abs(out.phi2_hat)) < 1e-9


def test_transport_exit_forcing_only(background, scaling, small):
    opts, quiet, zero, curve = small
    f = reference_forcing()
    out = transport_step(zero, curve, quiet, f, background, scaling, opts)
    phi = exit_forcing_phi(f, background)
    assert np.max(np.abs(out.phi1_hat[:, -1] - phi(out.t_grid))) < 1e-15
    assert np.max(np.abs(out.phi2_hat)) < 1e-9
    assert np.max(np.abs(out.phi1_hat)) > EPS / 4


def test_speed_freeze_is_second_order(background, scaling, periodic, half_eps_periodic):
    diffs = []
    for sol in (periodic, half_eps_periodic):
        o = IterationOptions(n_t=N_GRID, n_x=N_GRID)
        args = (sol.subsonic, sol.shock, sol.supersonic, sol.forcing, background, scaling)
        live = transport_step(*args, o)
        frozen = transport_step(*args, replace(o, freeze_speeds=True))
        diffs.append(live.sup_distance(frozen))
    assert diffs[0] < 0.05 * EPS
    assert diffs[0] / diffs[1] == pytest.approx(4.0, rel=0.15)


def test_shock_step_zero(background, scaling, small):
    opts, quiet, zero, _ = small
    c = shock_step(zero, quiet, background, scaling, opts)
    assert np.all(c.gamma == background.x_star)


def test_shock_step_static_root(background, scaling, small):
    opts, quiet, zero, _ = small
    ub = 1e-3
    sup = replace(quiet, u_bar=np.full_like(quiet.u_bar, ub))
    c = shock_step(zero, sup, background, scaling, opts)
    root = brentq(lambda x: eval_F(background, x, 0.0, 0.0, ub), 0.46, 0.54, xtol=1e-15)
    assert np.max(np.abs(c.gamma - root)) < 1e-9
    shift = ub / abs(linearization(background).dF_dx)
    assert root - background.x_star == pytest.approx(shift, rel=0.05)
    assert c.info["map_derivative"] < 1.0


def test_zero_forcing_iteration(background, scaling, small):
    _, quiet, _, _ = small
    sol, rep = run_iteration(background, quiet, BoundaryForcing(1.0, 0.0), scaling,
                             IterationOptions(n_t=N, n_x=N))
    assert rep.iterations == 1 and rep.converged
    assert np.all(sol.shock.gamma == background.x_star)


def test_reference_contraction(periodic_run):
    sol, rep = periodic_run
    assert rep.converged and rep.iterations <= 60
    assert rep.d[-1] < rep.conv_tol
    assert all(r <= rep.beta for r in rep.ratios)
    assert rep.ratios_below_beta
    assert 0.0 < rep.shock_info["map_derivative"] < 1.0


def test_converged_solution_properties(periodic_run, background):
    sol, rep = periodic_run
    assert rep.periodicity_defect < 1e-8
    assert rep.shock_periodicity_defect < 1e-8
    assert rep.rh_residual_max < 1e-6
    assert rep.lax_all
    assert rep.exit_trace_error < 1e-10
    g = sol.shock.gamma
    assert 0.0 < g.min() and g.max() < background.profile.length
    assert np.max(np.abs(g - background.x_star)) > 0.0


def test_shock_curve_satisfies_ode(periodic):
    sh = periodic.shock
    t = sh.t_grid[:-1]
    x = sh.gamma[:-1]
    f = periodic.subsonic
    U = 0.5 * (periodic.alpha * f.sample("phi2_hat", t, x) - f.sample("phi1_hat", t, x))
    rb = periodic.supersonic.sample("rho_bar", t, x)
    ub = periodic.supersonic.sample("u_bar", t, x)
    F = eval_F(periodic.background, x, U, rb, ub)
    assert np.max(np.abs(F - sh.gamma_dot[:-1])) < 1e-8


def test_fixed_point_property(periodic_run, background, scaling):
    sol, rep = periodic_run
    o = IterationOptions(n_t=N_GRID, n_x=N_GRID)
    new = transport_step(sol.subsonic, sol.shock, sol.supersonic, sol.forcing, background, scaling, o)
    assert new.sup_distance(sol.subsonic) < 10 * rep.conv_tol
    c = shock_step(new, sol.supersonic, background, scaling, o)
    assert np.max(np.abs(c.gamma - sol.shock.gamma)) < 10 * rep.conv_tol


def test_linear_eps_scaling(periodic, half_eps_periodic):
    a, b = periodic.norms(), half_eps_periodic.norms()
    for key in ("phi_hat_sup", "shock_sup"):
        assert a[key] / b[key] == pytest.approx(2.0, rel=0.15), key


def test_moduli_examples():
    t = np.linspace(0.0, 1.0, 11)
    x = np.linspace(0.0, 1.0, 11)
    z = np.zeros((11, 11))
    T = np.repeat(t[:, None], 11, axis=1)
    f = PeriodicField(1.0, t, x, z, z, z, z, z, z, 0.5)
    assert all(v == 0.0 for row in modulus_of_continuity(f, (0.1, 0.3)).values() for v in row.values())
    g = PeriodicField(1.0, t, x, z, z, T, z, z, z, 0.5)
    tab = modulus_of_continuity(g, (0.1, 0.3, 0.5))
    for d, row in tab.items():
        assert row["dt_phi1"] == pytest.approx(d, abs=1e-12)


def test_moduli_decrease(periodic_run):
    _, rep = periodic_run
    ds = sorted(rep.moduli)
    for name in ("dt_phi1", "dx_phi1", "dt_phi2", "dx_phi2"):
        vals = [rep.moduli[d][name] for d in ds]
        assert all(a <= b for a, b in zip(vals, vals[1:])), name


@pytest.mark.slow
@pytest.mark.parametrize("kappa", [0.02, 0.05])
@pytest.mark.parametrize("u_in", [1.5, 2.0, 3.0])
def test_contraction_sweep(kappa, u_in):
    p = NozzleProfile(1.0, Exponential(kappa))
    inlet = GasState(1.0, u_in)
    target = exit_density_for_shock(p, inlet, 0.5)
    bg = fit_transonic(p, inlet, target, FitOptions(eps=EPS))
    sc = scaling_config(bg)
    f = reference_forcing()
    n = 128
    sup = solve_supersonic_periodic(p, bg, f, SupersonicGrids(n_t=n, n_x=n))
    sol, rep = run_iteration(bg, sup, f, sc, IterationOptions(n_t=n, n_x=n, max_iter=200))
    assert rep.converged
    assert all(r <= sc.beta for r in rep.ratios)
