"""Compare the numba and numpy kernel backends on arguments captured from a reference run.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat N] [--n GRID]``
"""
import argparse
import statistics
import time

import numpy as np

from nozzleshock import kernels
from nozzleshock.forcing import BoundaryForcing, Waveform
from nozzleshock.fv import FvBoundary, FvState, cell_centers, fv_step
from nozzleshock.gas import GasState
from nozzleshock.nozzle import Exponential, NozzleProfile
from nozzleshock.shock import scaling_config
from nozzleshock.stability import IbvpGrids, initial_from_background, solve_ibvp
from nozzleshock.steady import FitOptions, fit_transonic, integrate_branch
from nozzleshock.subsonic import IterationOptions, run_iteration
from nozzleshock.supersonic import SupersonicGrids, solve_supersonic_periodic

KERNELS = ("march_linear", "ibvp_step", "hll_step", "rk4_branch", "march_supersonic", "bicubic")


def capture(n: int) -> dict:
    """Run a small pipeline and keep the first call of each kernel."""
    calls = {}
    orig = {k: getattr(kernels, k) for k in KERNELS}

    def wrap(name):
        def f(*args):
            calls.setdefault(name, tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args))
            return orig[name](*args)
        return f

    for k in KERNELS:
        setattr(kernels, k, wrap(k))
    try:
        p = NozzleProfile(1.0, Exponential(0.05))
        inlet = GasState(1.0, 2.0)
        integrate_branch(p, inlet, 0.0, 1.0, 2000)
        bg = fit_transonic(p, inlet, 3.964365402172952, FitOptions(eps=1e-3))
        f = BoundaryForcing(1.0, 1e-3, rho_r=Waveform.sine())
        sup = solve_supersonic_periodic(p, bg, f, SupersonicGrids(n_t=n, n_x=n))
        run_iteration(bg, sup, f, scaling_config(bg), IterationOptions(n_t=n, n_x=n))
        g = IbvpGrids(n_left=n, n_right=n)
        solve_ibvp(bg, f, initial_from_background(bg, g, 0.01), 0.01, g)
        x = cell_centers(1.0, 1024)
        s = FvState(x, np.ones(1024), np.full(1024, 2.0))
        fv_step(s, p, FvBoundary.from_forcing(bg), 0.8)
    finally:
        for k in KERNELS:
            setattr(kernels, k, orig[k])
    return calls


def bench(calls: dict, repeat: int):
    impls = {"numba": kernels.implementation("numba"), "numpy": kernels.implementation("numpy")}
    for name, args in calls.items():
        for mod in impls.values():
            getattr(mod, name)(*args)
    rows = []
    for name, args in calls.items():
        times = {b: [] for b in impls}
        for _ in range(repeat):
            # interleave so drift in machine load hits both backends alike
            for b, mod in impls.items():
                t = time.perf_counter()
                getattr(mod, name)(*args)
                times[b].append(time.perf_counter() - t)
        med = {b: statistics.median(v) for b, v in times.items()}
        rows.append((name, med["numba"], med["numpy"], med["numpy"] / med["numba"]))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=64, help="grid size of the captured run")
    args = ap.parse_args(argv)
    rows = bench(capture(args.n), args.repeat)
    print(f"{'kernel':<18}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, a, b, r in rows:
        print(f"{name:<18}{a * 1e3:>12.3f}{b * 1e3:>12.3f}{r:>10.1f}")


if __name__ == "__main__":
    main()
