import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from gramnorm.cli import BENCH_HEADER, array_to_json, main, read_array_file, write_array_file


@pytest.fixture
def kernel_file(tmp_path, rng):
    path = tmp_path / "k.json"
    write_array_file(path, rng.standard_normal((2, 2, 3, 3)))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_array_roundtrip(tmp_path, rng):
    A = rng.standard_normal((2, 3, 1, 5))
    path = tmp_path / "a.json"
    write_array_file(path, A)
    np.testing.assert_array_equal(read_array_file(path), A)
    assert json.loads(array_to_json(np.eye(2)))["shape"] == [2, 2]


@pytest.mark.parametrize("method,extra", [
    ("circ", ["--n", "8"]), ("toep", []), ("circ-approx", ["--n", "16", "--iters", "3"]),
    ("power", ["--n", "8"]), ("gram-dense", ["--n", "6"]),
])
def test_estimate_methods(capsys, kernel_file, method, extra):
    code, out, _ = run(capsys, "estimate", kernel_file, "--method", method, *extra)
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] > 0 and set(doc) == {"value", "method", "iterations", "is_upper_bound", "elapsed_ms"}
    assert doc["is_upper_bound"] == (method != "power")


def test_estimate_matrix_file(capsys, tmp_path):
    path = tmp_path / "m.json"
    write_array_file(path, np.diag([3.0, 1.0]))
    code, out, _ = run(capsys, "estimate", str(path), "--method", "gram-dense", "--iters", "1")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(82 ** 0.25)


@pytest.mark.parametrize("argv", [
    ["estimate", "{k}", "--method", "toep", "--n", "8"],
    ["estimate", "{k}", "--method", "circ"],
    ["estimate", "{k}", "--method", "magic"],
    ["estimate", "missing.json", "--method", "toep"],
    ["factor", "--t", "a,b", "--out", "x.csv"],
])
def test_parse_errors(capsys, kernel_file, argv):
    code, _, err = run(capsys, *[a.format(k=kernel_file) for a in argv])
    assert code == 2 and "error" in err


def test_bad_file_contents(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"shape": [1, 1, 1, 2], "data": [1.0]}')
    assert run(capsys, "estimate", str(path), "--method", "toep")[0] == 2
    path.write_text('{"shape": [2, 2], "data": [1.0, NaN, 0, 0]}')
    assert run(capsys, "estimate", str(path), "--method", "gram-dense")[0] == 2


def test_precondition_and_memory_exit_codes(capsys, kernel_file):
    assert run(capsys, "estimate", kernel_file, "--method", "circ-approx", "--n", "8")[0] == 3
    code, _, err = run(capsys, "oracle", kernel_file, "--n", "32", "--element-cap", "100")
    assert code == 4 and "cap" in err


def test_unwritable_output(capsys, tmp_path):
    out = str(tmp_path / "nodir" / "x.csv")
    assert run(capsys, "factor", "--out", out)[0] == 5
    assert run(capsys, "bench", "--channels", "1", "--trials", "1", "--out", out)[0] == 5


def test_oracle(capsys, kernel_file):
    code, out, _ = run(capsys, "oracle", kernel_file, "--n", "6", "--padding", "circular")
    doc = json.loads(out)
    assert code == 0 and doc["lower"] <= doc["upper"] and doc["converged"] is True


def test_factor_csv(capsys, tmp_path):
    out = tmp_path / "f.csv"
    code, _, err = run(capsys, "factor", "--k", "3", "--t", "6", "--n0-min", "60",
                       "--n0-max", "224", "--out", str(out))
    rows = list(csv.DictReader(open(out)))
    assert code == 0 and rows[0]["n0"] == "65"
    assert float(rows[-1]["factor"]) == pytest.approx(1.005272, abs=1e-6)
    assert err.count("omitted:") == 5


def test_bench_csv(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--channels", "1,2", "--k", "3", "--n", "8", "--trials", "1",
                     "--out", str(out))
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert code == 0 and rows[0] == BENCH_HEADER and len(rows) == 1 + 2 * 4
    for r in rows[1:]:
        if r[0] in ("circ-approx", "toep"):
            assert float(r[9]) >= -1e-9


def test_rescale(capsys, tmp_path, rng, kernel_file):
    mat = tmp_path / "w.json"
    write_array_file(mat, rng.standard_normal((5, 4)))
    out = tmp_path / "o.json"
    code, stdout, _ = run(capsys, "rescale", str(mat), "--t", "3", "--out", str(out))
    assert code == 0 and json.loads(stdout)["sigma1"] <= 1 + 1e-9
    assert read_array_file(out).shape == (5, 4)
    code, stdout, _ = run(capsys, "rescale", kernel_file, "--mode", "conv", "--n", "8", "--out", str(out))
    assert code == 0 and json.loads(stdout)["sigma1"] <= 1 + 1e-9
    assert run(capsys, "rescale", kernel_file, "--out", str(out))[0] == 2


def test_console_script(kernel_file):
    proc = subprocess.run([sys.executable, "-m", "gramnorm", "estimate", kernel_file, "--method", "toep"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["method"] == "toep-inf"
