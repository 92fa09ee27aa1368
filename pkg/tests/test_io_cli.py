import json

import numpy as np
import pytest

from peakbound import ModelFileError, fixtures
from peakbound.cli import main
from peakbound.io import Model, parse_model, rows_to_csv, serialize_model


@pytest.mark.parametrize("name", fixtures.names())
def test_round_trip(name):
    m = fixtures.build(name)
    assert parse_model(serialize_model(m)) == m
    assert fixtures.shipped(name) == m


def test_e0_closed_loop_is_nilpotent():
    F = fixtures.e0(0.5, 0.1).family_at()
    A = F[0]
    assert np.allclose(A @ A, 0.0, atol=1e-12)
    # the entry of size a^2/eps
    assert abs(A[1, 0]) == pytest.approx(0.5 ** 2 / 0.1, rel=1e-12)


@pytest.mark.parametrize("text, msg", [
    ("{", "malformed"),
    ('{"schema": "v2", "family": [[[1]]]}', "schema"),
    ('{"schema": "v1"}', "exactly one"),
    ('{"schema": "v1", "family": [[[1, 2]]]}', "square"),
    ('{"schema": "v1", "family": [[[1]]], "norm": "l7"}', "norm"),
    ('{"schema": "v1", "family": [[[1]]], "extra": 1}', "unknown"),
    ('{"schema": "v1", "base": [[1]], "schedule": {"kind": "never"}}', "schedule"),
])
def test_bad_models(text, msg):
    with pytest.raises(ModelFileError, match=msg):
        parse_model(text)


def test_csv():
    out = rows_to_csv([{"a": 1, "b": None}, {"a": 0.5, "b": "x"}], ["a", "b"])
    assert out == "a,b\n1,\n0.5,x\n"


def _write(tmp_path, name, model):
    path = tmp_path / f"{name}.json"
    path.write_text(serialize_model(model))
    return str(path)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_sigma_command(tmp_path, capsys):
    path = _write(tmp_path, "rot", fixtures.build("shear_rot"))
    code, out = _run(capsys, ["sigma", path])
    rep = json.loads(out)
    assert code == 0 and rep["result"]["verdict"] == "yes"
    assert rep["command"] == "sigma" and rep["seed"] == 0
    assert rep["result"]["sigma_lower"]["method"] == "certified"


def test_sigma_exit_codes(tmp_path, capsys):
    path = _write(tmp_path, "shear", fixtures.build("shear"))
    code, out = _run(capsys, ["sigma", path])
    assert code == 0 and json.loads(out)["result"]["verdict"] == "no"
    assert main(["sigma", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "v1"}')
    assert main(["sigma", str(bad)]) == 1
    assert main(["sigma"]) == 1
    assert main(["nonsense"]) == 1


def test_undetermined_exit_code(tmp_path, capsys):
    # a sampled minimum above a threshold that cannot be certified
    path = _write(tmp_path, "rot", fixtures.build("rot2"))
    code, out = _run(capsys, ["sigma", path, "--norm", "l1"])
    assert code == 0
    # p below N - 1 without --exploratory is an input error
    m = Model(family=[np.eye(3).tolist()])
    assert main(["sigma", _write(tmp_path, "i3", m), "--p", "1"]) == 1


def test_reports_are_deterministic(tmp_path, capsys):
    path = _write(tmp_path, "mix", fixtures.build("mixtures_sym_half"))
    outs = []
    for _ in range(2):
        code, out = _run(capsys, ["desync", path, "--runs", "5", "--T", "50", "--seed", "3"])
        rep = json.loads(out)
        rep.pop("wall_time")
        outs.append(rep)
    assert code == 0 and outs[0] == outs[1]
    res = outs[0]["result"]
    assert res["sigma_bound"]["value"] == pytest.approx(1 / 32)
    assert res["simulation"]["within_bound"] is True


def test_peak_command(tmp_path, capsys):
    path = _write(tmp_path, "lim", fixtures.build("limexp", m=4))
    code, out = _run(capsys, ["peak", path, "--depth", "30"])
    res = json.loads(out)["result"]
    assert code == 0 and res["stability"] == "certified stable"
    assert res["chi_lower"]["value"] > 1.0


def test_witness_command(tmp_path, capsys):
    path = _write(tmp_path, "rot2", fixtures.build("rot2"))
    code, out = _run(capsys, ["witness", path, "--horizon", "30"])
    res = json.loads(out)["result"]
    assert code == 0 and res["found"]
    assert res["witness"]["lambda"]["value"] == pytest.approx(2.0, abs=1e-12)


def test_scan_command_csv(tmp_path, capsys):
    path = _write(tmp_path, "mix", fixtures.build("mixtures_sym_half"))
    code, out = _run(capsys, ["scan", path, "--csv", "--taus", "0.1,0.01"])
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "tau,sigma_grid,sigma_upper,sigma_lower,verdict"
    assert len(lines) == 4


def test_scan_needs_perturbation(tmp_path, capsys):
    path = _write(tmp_path, "shear", fixtures.build("shear"))
    assert main(["scan", path]) == 1


def test_fixtures_command(tmp_path, capsys):
    code, out = _run(capsys, ["fixtures", "--list"])
    assert code == 0 and "E0" in out.split()
    code, out = _run(capsys, ["fixtures", "E0", "--a", "0.4", "--eps", "0.2"])
    assert parse_model(out).parameters["a"] == 0.4
    assert main(["fixtures", "nope"]) == 1
    assert main(["fixtures", "shear", "--m", "3"]) == 1


def test_output_file(tmp_path):
    path = _write(tmp_path, "rot", fixtures.build("shear_rot"))
    out = tmp_path / "report.json"
    assert main(["sigma", path, "-o", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["verdict"] == "yes"
