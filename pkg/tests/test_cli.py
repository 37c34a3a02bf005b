import csv
import io
import json
import math

import numpy as np
import pytest

from asiadens.cli import MIN_KS_PATHS, main, parse_complex, parse_grid
from asiadens.density import ModelParams, density


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_grid_and_complex_parsing():
    assert np.allclose(parse_grid("0.1:5:50"), np.linspace(0.1, 5, 50))
    assert np.allclose(parse_grid("1:100:3", log=True), [1, 10, 100])
    assert parse_complex("1.5,-2") == 1.5 - 2j
    assert parse_complex("3") == 3


def test_special(capsys):
    code, out, _ = run(capsys, "special", "hermite", "--mu", "-1", "--z", "0")
    assert code == 0 and abs(float(out) - math.sqrt(math.pi) / 2) <= 1e-10
    code, out, _ = run(capsys, "special", "besseli", "--rho", "0", "--eta", "0")
    assert code == 0 and float(out) == 1.0
    code, out, _ = run(capsys, "special", "gamma", "--z", "0.5,1")
    re, im = map(float, out.split(","))
    assert code == 0 and im != 0


@pytest.mark.parametrize("argv", [("special", "hermite", "--mu", "x", "--z", "0"),
                                  ("special", "hermite", "--mu", "1"),
                                  ("special", "erf", "--z", "1")])
def test_special_parse_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_density_rows(capsys):
    code, out, _ = run(capsys, "density", "--nu", "0", "--eps", "1", "--t", "1", "--w-grid", "0.1:5:50")
    r = rows(out)
    assert code == 0 and len(r) == 50
    w = np.array([float(x["w"]) for x in r])
    v = np.array([float(x["value"]) for x in r])
    assert np.all(v >= -np.array([float(x["abs_error"]) for x in r]))
    # 17 significant digits survive the CSV round trip
    assert np.array_equal(v, density(ModelParams(0.0, 1.0, 1.0, w)).value)


def test_density_both_routes(capsys):
    code, out, _ = run(capsys, "density", "--nu", "0.5", "--w-grid", "0.2:3:6", "--route", "both")
    assert code == 0
    assert all(x["agree"] == "1" for x in rows(out))


def test_density_reciprocal(capsys):
    code, out, _ = run(capsys, "density", "--nu", "-0.5", "--eps", "-1", "--w-grid", "0.5:4:4", "--log")
    r = rows(out)
    w = np.array([float(x["w"]) for x in r])
    v = np.array([float(x["value"]) for x in r])
    base = density(ModelParams(-0.5, 1.0, 1.0, 1 / w)).value
    assert code == 0 and np.allclose(v, base / w**2, rtol=1e-8)


def test_density_bad_params(capsys):
    code, _, err = run(capsys, "density", "--eps", "0")
    assert code == 2 and "eps" in err
    assert run(capsys, "density", "--w-grid", "1:2:0")[0] == 2
    assert run(capsys, "density", "--w-grid", "1:2")[0] == 2
    assert run(capsys, "density", "--nu", "-2", "--route", "both")[0] == 2


def test_compare_small_grid(capsys):
    code, out, _ = run(capsys, "compare", "--nu", "0.3,-2", "--eps", "1,-1", "--t", "1", "--w-count", "4")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and rep["max_rel_dev"] <= 1e-6
    assert rep["yor_only"] == [{"nu": -2.0, "eps": 1.0, "t": 1.0}, {"nu": -2.0, "eps": -1.0, "t": 1.0}]


def test_compare_fail_and_empty(capsys):
    code, out, _ = run(capsys, "compare", "--nu", "0.3", "--eps", "1", "--t", "1", "--w-count", "3",
                       "--threshold", "1e-30", "--rtol", "1e-6")
    assert code in (0, 1) and json.loads(out)["pass"] == (code == 0)
    assert run(capsys, "compare", "--nu", "")[0] == 2


def test_mc_underpowered_and_deterministic(capsys, monkeypatch):
    monkeypatch.delenv("ASIA_SEED", raising=False)
    argv = ("mc-validate", "--paths", "100", "--steps", "16", "--seed", "42")
    code, first, _ = run(capsys, *argv)
    rep = json.loads(first)
    assert code == 3 and "insufficient for KS threshold" in rep["flags"]
    assert MIN_KS_PATHS > 100
    assert run(capsys, *argv)[1] == first
    monkeypatch.setenv("ASIA_SEED", "42")
    assert run(capsys, "mc-validate", "--paths", "100", "--steps", "16")[1] == first


def test_config_round_trip(capsys, tmp_path):
    code, dumped, _ = run(capsys, "density", "--nu", "0.7", "--t", "2", "--dump-config")
    assert code == 0
    f = tmp_path / "cfg.json"
    f.write_text(dumped)
    code, again, _ = run(capsys, "density", "--config", str(f), "--dump-config")
    assert again == dumped
    # flags override the file
    code, over, _ = run(capsys, "density", "--config", str(f), "--t", "3", "--dump-config")
    cfg = json.loads(over)
    assert cfg["t"] == 3.0 and cfg["nu"] == 0.7


def test_config_errors(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"nope": 1}')
    assert run(capsys, "density", "--config", str(f))[0] == 2
    assert run(capsys, "density", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_laplace_check(capsys):
    code, out, _ = run(capsys, "laplace-check", "--nu", "0.5", "--w", "1", "--z", "5")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and rep["rel_dev"] <= 1e-3
    code, out, _ = run(capsys, "laplace-check", "--z", "2", "--mu", "0", "--eta", "1")
    assert code == 0 and json.loads(out)["rel_dev"] <= 1e-3
