import io
import json
import subprocess
import sys

import numpy as np
import pytest

from conformal_cauchy import cli
from conformal_cauchy.geometry import ExtendedComplexParam
from conformal_cauchy.moebius import MoebiusMap, moebius_apply_array, moebius_apply_param
from conformal_cauchy.sampling import RngStream, sample_sphere_cauchy


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv(text):
    return np.loadtxt(io.StringIO(text), delimiter=",", ndmin=2)


def test_sample_deterministic(capsys):
    argv = ["sample", "--family", "sphere-cauchy", "--params", '{"phi":[0.5,0,0]}', "--n", "10", "--seed", "1"]
    c1, o1, e1 = run(capsys, *argv)
    c2, o2, _ = run(capsys, *argv)
    assert c1 == c2 == 0 and o1 == o2
    Y = csv(o1)
    assert Y.shape == (10, 3)
    np.testing.assert_allclose(np.linalg.norm(Y, axis=1), 1, atol=1e-14)
    assert json.loads(e1)["config"]["seed"] == 1
    # no header, and 17 significant digits make the round trip lossless
    np.testing.assert_array_equal(Y, sample_sphere_cauchy(np.array([0.5, 0, 0]), 2, 10, RngStream(1, 0)))


def test_seed_from_environment(capsys, monkeypatch):
    argv = ["sample", "--family", "uniform-sphere", "--params", '{"d":2}', "--n", "3"]
    monkeypatch.setenv(cli.SEED_ENV, "42")
    _, o1, e1 = run(capsys, *argv)
    _, o2, _ = run(capsys, *argv, "--seed", "42")
    assert o1 == o2 and json.loads(e1)["config"]["seed"] == 42
    monkeypatch.setenv(cli.SEED_ENV, "not-a-number")
    code, _, err = run(capsys, *argv)
    assert code == 2 and cli.SEED_ENV in err


@pytest.mark.parametrize("family, params, width", [
    ("euclid-cauchy", '{"mu":[1,2],"sigma":0.5}', 2),
    ("kent", '{"mu":[0,0],"L":[[0.3,0],[0,0.5]]}', 3),
    ("marginal", '{"varphi":0.4,"nu":3}', 1),
    ("uniform-sphere", '{"d":3}', 4),
])
def test_sample_families(capsys, family, params, width):
    code, out, _ = run(capsys, "sample", "--family", family, "--params", params, "--n", "5", "--seed", "3")
    assert code == 0 and csv(out).shape == (5, width)


def test_flag_errors_name_the_flag(capsys):
    code, _, err = run(capsys, "sample", "--family", "sphere-cauchy", "--params", "{phi", "--n", "3")
    assert code == 2 and "--params" in err
    code, _, err = run(capsys, "sample", "--family", "bogus", "--params", "{}", "--n", "3")
    assert code == 2 and "--family" in err
    code, _, err = run(capsys, "sample", "--family", "sphere-cauchy", "--params", "{}", "--n", "3")
    assert code == 2 and "phi" in err
    code, _, err = run(capsys, "verify", "--suite", "99")
    assert code == 2 and "--suite" in err
    code, _, err = run(capsys, "lambert-grid", "--a11", "1", "--a12", "2", "--a22", "1")
    assert code == 2 and "--a11" in err


def test_domain_error_exit_code(capsys):
    code, out, err = run(capsys, "sample", "--family", "sphere-cauchy", "--params", '{"phi":[1,0,0]}', "--n", "3")
    assert code == 3 and out == "" and "domain error" in err


def test_fit_round_trip(capsys, tmp_path):
    _, out, _ = run(capsys, "sample", "--family", "euclid-cauchy", "--params", '{"mu":[1,2],"sigma":0.5}',
                    "--n", "10000", "--seed", "5")
    path = tmp_path / "x.csv"
    path.write_text(out)
    code, out, err = run(capsys, "fit", "--input", str(path), "--family", "euclid", "--method", "mle")
    assert code == 0
    res = json.loads(out)
    assert set(res) == {"estimate", "loglik", "diagnostics", "variant"}
    assert res["variant"] == "estimate"
    # n = 10^4: coordinate standard errors are about 0.007
    np.testing.assert_allclose(res["estimate"]["mu"], [1, 2], atol=0.03)
    assert res["estimate"]["sigma"] == pytest.approx(0.5, abs=0.03)
    assert json.loads(err)["config"]["n"] == 10_000


def test_fit_sphere_mle_and_mom(capsys, tmp_path):
    _, out, _ = run(capsys, "sample", "--family", "sphere-cauchy", "--params", '{"phi":[0.6,0,0]}',
                    "--n", "10000", "--seed", "6")
    path = tmp_path / "y.csv"
    path.write_text(out)
    for method in ("mle", "mom"):
        code, out, _ = run(capsys, "fit", "--input", str(path), "--family", "sphere", "--method", method)
        assert code == 0
        np.testing.assert_allclose(json.loads(out)["estimate"]["phi"], [0.6, 0, 0], atol=0.03)
    code, _, err = run(capsys, "fit", "--input", str(path), "--family", "euclid", "--method", "mom")
    assert code == 2 and "--method" in err


def test_fit_degenerate_variants(capsys, tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("-1\n1\n")
    code, out, _ = run(capsys, "fit", "--input", str(path))
    res = json.loads(out)
    assert code == 0 and res["variant"] == "contour_circle" and res["estimate"]["radius"] == 1.0
    path.write_text("0.5\n0.5\n2\n")
    res = json.loads(run(capsys, "fit", "--input", str(path))[1])
    assert res["variant"] == "point_mass" and res["estimate"]["location"] == [0.5]


def test_fit_missing_input(capsys, tmp_path):
    code, _, err = run(capsys, "fit", "--input", str(tmp_path / "missing.csv"))
    assert code == 2 and "--input" in err


def test_transform_points_and_param(capsys, tmp_path):
    m = MoebiusMap(np.eye(2), 1.5, np.array([0.2, -0.1]), np.array([1.0, 0.0]), 2)
    mjson = json.dumps(m.to_dict())
    X = np.random.default_rng(0).normal(size=(4, 2))
    path = tmp_path / "p.csv"
    np.savetxt(path, X, delimiter=",", fmt="%.17g")
    code, out, _ = run(capsys, "transform", "--map", mjson, "--points", str(path))
    assert code == 0
    np.testing.assert_array_equal(csv(out), moebius_apply_array(m, X))
    code, out, _ = run(capsys, "transform", "--map", mjson, "--param", '{"mu":[0,0],"sigma":2}')
    t = moebius_apply_param(m, ExtendedComplexParam(np.zeros(2), 2.0))
    res = json.loads(out)["theta"]
    np.testing.assert_array_equal(res["mu"], t.mu)
    assert res["sigma"] == t.sigma
    code, out, _ = run(capsys, "transform", "--map", '{"R":[[1,0],[0,1]],"phi":[0.5,0]}', "--param", '{"phi":[0,0]}')
    assert json.loads(out)["phi"] == [0.5, 0.0]
    code, out, _ = run(capsys, "transform", "--stereographic", "inverse", "--param", '{"mu":[0],"sigma":1}')
    assert json.loads(out)["phi"] == [0.0, 0.0]
    code, _, err = run(capsys, "transform", "--param", '{"mu":[0],"sigma":1}')
    assert code == 2 and "--map" in err


def test_density_grid_headers(capsys):
    code, out, _ = run(capsys, "density-grid", "--family", "euclid-cauchy", "--params", '{"mu":[0],"sigma":1}',
                       "--num", "5")
    assert code == 0 and out.splitlines()[0] == "x1,pdf"
    assert csv("\n".join(out.splitlines()[1:])).shape == (5, 2)
    code, out, _ = run(capsys, "density-grid", "--family", "kent", "--params", '{"mu":[0,0],"L":[[0.3,0],[0,0.5]]}',
                       "--num", "11")
    assert out.splitlines()[0] == "v1,v2,pdf"
    code, out, _ = run(capsys, "density-grid", "--family", "marginal", "--params", '{"varphi":0,"nu":2}', "--num", "4")
    np.testing.assert_allclose(csv("\n".join(out.splitlines()[1:]))[:, 1], 0.5)


def test_lambert_grid_circles(capsys):
    code, out, _ = run(capsys, "lambert-grid", "--a11", "4", "--a12", "0", "--a22", "4")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "v1,v2,pdf"
    G = csv("\n".join(lines[1:]))
    assert G.shape == (201 * 201, 3)
    r2 = G[:, 0] ** 2 + G[:, 1] ** 2
    inside = r2 <= 4
    assert np.all(np.isnan(G[~inside, 2])) and np.all(np.isfinite(G[inside, 2]))
    # density is a function of the radius alone
    for target in (0.5, 1.0, 2.0):
        ring = np.isclose(r2, target, atol=1e-12)
        assert ring.sum() >= 4 and np.ptp(G[ring, 2]) < 1e-12


def test_verify_exit_codes(capsys, monkeypatch):
    code, out, err = run(capsys, "verify", "--suite", "2,5", "--seed", "7")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert all({"check", "value", "tolerance", "pass"} <= set(c) for c in rep["checks"])
    assert "[PASS] criterion  2" in err
    fake = [{"criterion": 1, "name": "x", "pass": False, "error": None,
             "checks": [{"check": "c", "value": 1.0, "tolerance": 0.1, "pass": False}]}]
    monkeypatch.setattr(cli, "run_suite", lambda keys, seed: fake)
    code, out, _ = run(capsys, "verify", "--suite", "1")
    assert code == 4 and not json.loads(out)["pass"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "conformal_cauchy", "lambert-grid", "--a11", "4", "--a12", "0",
                           "--a22", "4", "--num", "3"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.splitlines()[0] == "v1,v2,pdf"
    proc = subprocess.run([sys.executable, "-m", "conformal_cauchy", "nonsense"], capture_output=True, text=True)
    assert proc.returncode == 2
