import io
import json

import pandas as pd
import pytest

from main import grid_value, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_macmahon(capsys):
    code, out, _ = run(capsys, "macmahon", "--max-n", "10")
    assert code == 0
    coeffs = json.loads(out)
    assert len(coeffs) == 11
    assert coeffs[:4] == [1, 2, 6, 16]
    assert all(isinstance(c, int) for c in coeffs)


def test_output_is_deterministic(capsys):
    argv = ["corr", "--q", "1/10", "--points", "[[1,1],[0,1]]"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    doc = json.loads(first)
    assert doc["points"] == [[0, 1], [1, 1]]
    assert doc["q"] == "1/10"
    assert list(doc) == sorted(doc)


def test_corr_with_oracle_check(capsys):
    code, out, _ = run(capsys, "corr", "--q", "0.1", "--points", "[[0,1],[1,1]]", "--check-oracle", "--vmax", "10")
    assert code == 0
    doc = json.loads(out)
    assert doc["agrees"] is True
    assert abs(doc["value"] - doc["oracle_value"]) <= doc["error_bound"] + 1e-8
    assert doc["params"]["v_max"] == 10


@pytest.mark.slow
def test_corr_with_oracle_at_volume_eighteen(capsys):
    code, out, _ = run(capsys, "corr", "--q", "0.1", "--points", "[[0,1],[1,1]]", "--check-oracle", "--vmax", "18")
    assert code == 0
    assert json.loads(out)["agrees"] is True


def test_corr_on_a_chain(capsys):
    chain = '{"T": 1, "plus": [[0.3]], "minus": [[0.2]]}'
    code, out, _ = run(capsys, "corr", "--chain", chain, "--points", "[[1,1]]", "--method", "reference")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(2 * 0.06 * 0.94 / 1.06, abs=1e-12)
    assert doc["method"] == "reference"


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--q", "1/20", "--points", "[[0,1]]", "--vmax", "8")
    assert code == 0
    doc = json.loads(out)
    assert doc["method"] == "oracle"
    assert 0 < doc["value"] < 1
    assert doc["error_bound"] > 0


def test_kernel(capsys):
    code, out, _ = run(capsys, "kernel", "--q", "0.1", "--x", "1", "--y", "-1", "--t1", "0", "--t2", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["series_method"] == "product"
    assert -1.0 < doc["value"] < 0.0


def test_kernel_honours_explicit_truncation(capsys):
    argv = ["kernel", "--q", "0.1", "--x", "1", "--y", "-1", "--t1", "0", "--t2", "0"]
    code, out, _ = run(capsys, *argv, "--truncation", "40")
    assert code == 0
    assert json.loads(out)["truncation"] == 40
    code, out, err = run(capsys, *argv, "--truncation", "0")
    assert code == 1
    assert out == ""
    assert json.loads(err.strip().splitlines()[-1])["error"] == "WindowTooSmall"


def test_kernel_at_one_half(capsys):
    code, out, _ = run(capsys, "kernel", "--q", "1/2", "--x", "1", "--y", "-1", "--t1", "0", "--t2", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["truncation"] > 100
    assert doc["value"] == pytest.approx(-0.39257, abs=1e-4)


def test_density_csv(capsys, tmp_path):
    target = tmp_path / "mesh.csv"
    code, out, _ = run(capsys, "density", "--tau", "0", "--chi-grid", "0:3:0.05", "--out", str(target))
    assert code == 0
    assert out == ""
    raw = target.read_bytes()
    assert b"\r\n" not in raw
    mesh = pd.read_csv(target)
    assert list(mesh.columns) == ["tau", "chi", "density"]
    assert len(mesh) == 61
    assert mesh["density"].iloc[0] == 0.5


def test_volume_csv(capsys):
    code, out, _ = run(capsys, "volume", "--r-list", "0.2,0.1")
    assert code == 0
    assert out.splitlines()[0] == "r,E,r3E,Var,r4Var"
    table = pd.read_csv(io.StringIO(out))
    assert list(table["r"]) == [0.2, 0.1]


def test_shape_csv(capsys):
    code, out, _ = run(capsys, "--workers", "2", "shape", "--tau-grid", "0:1:0.5", "--chi-grid", "0.5:1:0.5")
    assert code == 0
    table = pd.read_csv(io.StringIO(out))
    assert len(table) == 6
    assert list(table.columns) == ["tau", "chi", "x", "y", "z"]


def test_qpqp_check(capsys):
    code, out, _ = run(capsys, "qpqp-check", "--mu", "[1]", "--nu", "[]", "--x", "[0.3]", "--y", "[0.2]",
                       "--cutoff", "20")
    assert code == 0
    assert json.loads(out)["residual"] < 1e-9


def test_module_self_test(capsys):
    code, out, _ = run(capsys, "macmahon", "--self-test")
    assert code == 0
    report = json.loads(out)
    assert list(report) == ["process"]
    assert all(report["process"].values())


def test_self_test_command(capsys):
    code, out, _ = run(capsys, "self-test", "--modules", "partitions", "pfaffian")
    assert code == 0
    assert set(json.loads(out)) == {"partitions", "pfaffian"}


@pytest.mark.parametrize(
    "argv",
    [
        ["corr", "--q", "1.5", "--points", "[[0,1]]"],
        ["corr", "--q", "0.1", "--points", "[[0,0]]"],
        ["corr", "--q", "0.1"],
        ["corr", "--points", "[[0,1]]"],
        ["density", "--tau", "0", "--chi-grid", "3:0:0.1"],
        ["macmahon", "--max-n", "ten"],
        ["nonsense"],
    ],
)
def test_flag_errors_exit_two(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_computation_errors_exit_one(capsys):
    code, out, err = run(capsys, "oracle", "--q", "0.1", "--points", "[[0,1]]", "--vmax", "30")
    assert code == 1
    assert out == ""
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload["error"] == "CapExceeded"
    assert payload["context"] == "oracle"


def test_grid_value():
    assert grid_value("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert len(grid_value("0:3:0.05")) == 61
