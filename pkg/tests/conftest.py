import math

import pytest

from nozzleshock.forcing import BoundaryForcing, Waveform
from nozzleshock.gas import GasState
from nozzleshock.nozzle import Exponential, NozzleProfile
from nozzleshock.shock import scaling_config
from nozzleshock.steady import FitOptions, fit_transonic
from nozzleshock.subsonic import IterationOptions, run_iteration
from nozzleshock.supersonic import SupersonicGrids, solve_supersonic_periodic

REF_EXIT_DENSITY = 3.964365402172952
EPS = 1e-3
N_GRID = 256


def reference_forcing(eps=EPS, period=1.0):
    return BoundaryForcing(period, eps, rho_r=Waveform.sine())


def solve_periodic(bg, forcing, n=N_GRID):
    sc = scaling_config(bg)
    sup = solve_supersonic_periodic(bg.profile, bg, forcing, SupersonicGrids(n_t=n, n_x=n))
    return run_iteration(bg, sup, forcing, sc, IterationOptions(n_t=n, n_x=n))


@pytest.fixture(scope="session")
def profile():
    return NozzleProfile(1.0, Exponential(0.05))


@pytest.fixture(scope="session")
def inlet():
    return GasState(1.0, 2.0)


@pytest.fixture(scope="session")
def background(profile, inlet):
    return fit_transonic(profile, inlet, REF_EXIT_DENSITY, FitOptions(eps=EPS))


@pytest.fixture(scope="session")
def scaling(background):
    return scaling_config(background)


@pytest.fixture(scope="session")
def forcing():
    return reference_forcing()


@pytest.fixture(scope="session")
def supersonic_field(background, forcing):
    return solve_supersonic_periodic(background.profile, background, forcing,
                                     SupersonicGrids(n_t=N_GRID, n_x=N_GRID))


@pytest.fixture(scope="session")
def periodic_run(background, forcing):
    return solve_periodic(background, forcing)


@pytest.fixture(scope="session")
def periodic(periodic_run):
    return periodic_run[0]


@pytest.fixture(scope="session")
def half_eps_periodic(background):
    return solve_periodic(background, reference_forcing(EPS / 2))[0]


def sup(a):
    return float(abs(a).max())


def almost(a, b, rel):
    return math.isclose(a, b, rel_tol=rel)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
