import json

import numpy as np
import pytest

from nozzleshock.cli import main
from nozzleshock.config import gate, parse_config
from nozzleshock.errors import AssumptionViolation, ConfigError

SMALL = {"grids": {"n_t": 64, "n_x": 64, "ibvp_n": 64, "fv_ladder": [128, 256]},
         "tolerances": {"max_iter": 80}}


def write(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(tmp_path, cmd, data=None, *extra):
    out = tmp_path / "out"
    argv = [cmd, "--out", str(out), *extra]
    if data is not None:
        argv += ["--config", write(tmp_path, data)]
    return main(argv), out


def test_parse_defaults_and_overrides():
    cfg = parse_config({})
    assert cfg.inlet == (1.0, 2.0) and cfg.nozzle.kappa == 0.05
    cfg = parse_config({"nozzle": {"kappa": 0.02}, "forcing": {"eps": 5e-4, "rho_r": "cos"},
                        "shock_position": 0.45})
    assert cfg.nozzle.kappa == 0.02 and cfg.forcing.eps == 5e-4
    assert cfg.forcing.rho_r.type == "cos" and cfg.exit_density is None
    cfg = parse_config({"forcing": {"rho_r": {"type": "harmonics", "terms": [[1, 0.5, 0.0], [2, 0.0, 0.5]]}}})
    assert cfg.forcing.build().rho_bar_r(0.25) != 0.0


@pytest.mark.parametrize("data", [{"colour": 1}, {"nozzle": {"kapa": 0.1}}, {"inlet": {"rho": 1.0}},
                                  {"forcing": {"rho_r": {"type": "square"}}},
                                  {"grids": {"n_t": "many"}},
                                  {"exit_density": 4.0, "shock_position": 0.5}])
def test_parse_rejects(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_gate_reports_inequalities():
    with pytest.raises(AssumptionViolation, match=r"2\+sqrt\(3\)"):
        gate(parse_config({"inlet": {"rho": 1.0, "u": 4.0}}))
    with pytest.raises(AssumptionViolation, match="M < 1"):
        gate(parse_config({"inlet": {"rho": 1.0, "u": 4.0}}))
    with pytest.raises(AssumptionViolation, match="divergence"):
        gate(parse_config({"nozzle": {"kappa": -0.1}}))
    assert gate(parse_config({})).M == 0.25


def test_validate_reference(tmp_path, capsys):
    rc, out = run(tmp_path, "validate")
    assert rc == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["M"] == 0.25
    body = json.loads((out / "validate.json").read_text())
    assert body["M"] == 0.25
    assert parse_config(body["config"]) == parse_config({"output_dir": str(out)})


@pytest.mark.parametrize("data,needle", [({"inlet": {"rho": 1.0, "u": 4.0}}, "u = 4"),
                                         ({"nozzle": {"kappa": -0.1}}, "a'(x)/a(x) > 0"),
                                         ({"nozzle": {"kapa": 0.1}}, "kapa")])
def test_validation_exit_code(tmp_path, capsys, data, needle):
    rc, out = run(tmp_path, "steady", data)
    assert rc == 2
    assert needle in capsys.readouterr().err
    assert not (out / "steady.json").exists()


def test_unattainable_target_is_a_validation_failure(tmp_path, capsys):
    rc, _ = run(tmp_path, "steady", {"exit_density": 10.0})
    assert rc == 2
    assert "attainable interval" in capsys.readouterr().err


def test_solver_failure_exit_code(tmp_path, capsys):
    data = {"grids": {"n_t": 32, "n_x": 32}, "tolerances": {"max_iter": 2}}
    rc, out = run(tmp_path, "periodic", data)
    assert rc == 3
    assert "NonConvergence" in capsys.readouterr().err
    assert not (out / "iteration_report.json").exists()


def test_nozzle_out_overrides(tmp_path, monkeypatch):
    env = tmp_path / "env_out"
    monkeypatch.setenv("NOZZLE_OUT", str(env))
    rc, out = run(tmp_path, "validate")
    assert rc == 0 and (env / "validate.json").exists() and not out.exists()


def test_steady_outputs_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["steady", "--out", str(a)]) == 0
    assert main(["steady", "--out", str(b)]) == 0
    for name in ("steady.json", "steady_supersonic.csv", "steady_subsonic.csv"):
        ta, tb = (a / name).read_text(), (b / name).read_text()
        if name.endswith(".json"):
            ta, tb = (json.dumps({k: v for k, v in json.loads(t).items() if k != "config"}) for t in (ta, tb))
        assert ta == tb, name
    body = json.loads((a / "steady.json").read_text())
    assert abs(body["steady"]["x_star"] - 0.5) < 1e-8
    head = (a / "steady_subsonic.csv").read_text().splitlines()[0]
    assert head == "x,rho,u"


def test_periodic_command(tmp_path):
    rc, out = run(tmp_path, "periodic", SMALL)
    assert rc == 0
    rep = json.loads((out / "iteration_report.json").read_text())
    beta = rep["scaling"]["beta"]
    assert rep["report"]["converged"] and all(r <= beta for r in rep["report"]["ratios"])
    assert rep["config"]["grids"]["n_t"] == 64
    shock = np.loadtxt(out / "shock.csv", delimiter=",", skiprows=1)
    assert shock.shape[1] == 3 and np.all((shock[:, 1] > 0) & (shock[:, 1] < 1))
    sub = np.loadtxt(out / "periodic_subsonic.csv", delimiter=",", skiprows=1)
    assert np.all(sub[:, 3] < 1.0)


def test_periodic_ode_demo(tmp_path):
    rc, out = run(tmp_path, "periodic-ode-demo", None, "--eps", "0.01")
    assert rc == 0
    body = json.loads((out / "periodic_ode_demo.json").read_text())
    assert body["sup_error"] < 1e-8 and 0.0 < body["map_derivative"] < 1.0


@pytest.mark.slow
def test_stability_and_crosscheck_commands(tmp_path):
    data = dict(SMALL, stability={"shift": 0.01, "windows": 5})
    rc, out = run(tmp_path, "stability", data)
    assert rc == 0
    st = json.loads((out / "stability.json").read_text())["stability"]
    assert st["n_windows"] >= 5 and st["decaying"]
    data = dict(SMALL, crosscheck={"n_periods": 1, "snapshot_every": 0.5})
    rc, out = run(tmp_path, "crosscheck", data)
    assert rc == 0
    snaps = np.loadtxt(out / "fv_snapshots.csv", delimiter=",", skiprows=1)
    assert set(np.unique(snaps[:, 0])) >= {0.0, 0.5}
