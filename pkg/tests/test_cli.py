import json
import subprocess
import sys

import pytest

from padiccf.cli import EXIT_INVALID, EXIT_NONTERMINATING, EXIT_OK, EXIT_STALLED, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_ruban(capsys):
    code, out, _ = run(capsys, "expand", "--p", "5", "--input", "rat:-5", "--count", "4")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "0, 24/5, 24/5, 24/5"
    assert "repeat from index 1" in out


def test_expand_browkin_terminates(capsys):
    code, out, _ = run(capsys, "expand", "--p", "5", "--algo", "browkin1", "--input", "rat:1/3")
    assert code == EXIT_OK and out.splitlines() == ["2, -3/5", "terminated"]


def test_expand_json(capsys, tmp_path):
    path = tmp_path / "e.json"
    code, _, _ = run(capsys, "expand", "--p", "13", "--input", "surd:0,1,1,95", "--count", "3", "--json", str(path))
    data = json.loads(path.read_text())
    assert code == EXIT_OK and data["branch"] == 2 and len(data["terms"]) == 3


@pytest.mark.parametrize("argv,code", [
    (["expand", "--p", "5", "--input", "rat:-5", "--strict"], EXIT_NONTERMINATING),
    (["expand", "--p", "6", "--input", "rat:1"], EXIT_INVALID),
    (["expand", "--p", "13", "--input", "surd:0,1,1,151"], EXIT_INVALID),
    (["expand", "--p", "5", "--input", "rat:0.5"], EXIT_INVALID),
    (["expand", "--p", "5", "--input", "pi:3"], EXIT_INVALID),
    (["expand", "--p", "5", "--input", "rat:1", "--count", "-1"], EXIT_INVALID),
    (["moebius", "--p", "5", "--coeffs", "1,2,2,4", "--alpha", "rat:2"], EXIT_INVALID),
    (["moebius", "--p", "5", "--coeffs", "1,0,0,25", "--alpha", "cf:1;1/5", "--max-inputs", "300"], EXIT_STALLED),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_moebius_and_trace(capsys, tmp_path):
    trace = tmp_path / "t.json"
    code, out, _ = run(capsys, "moebius", "--p", "7", "--coeffs", "1,2,3,5", "--alpha", "surd:0,1,1,2",
                       "--max-outputs", "4", "--trace", str(trace))
    assert code == EXIT_OK and len(out.splitlines()[0].split(", ")) == 4
    assert json.loads(trace.read_text())[0]["type"] == "ConsumedInput"


def test_bilinear(capsys):
    code, out, _ = run(capsys, "bilinear", "--p", "7", "--coeffs", "1,0,0,0", "--coeffs2", "0,0,0,1",
                       "--alpha", "surd:0,1,1,2", "--beta", "surd:1,1,1,2", "--max-outputs", "3", "--rule", "exact")
    assert code == EXIT_OK and "output_limit" in out


def test_experiment_csv(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "experiment", "mobius-staircase", "--p", "13", "--surd", "95", "--trials", "2",
                     "--outputs", "10", "--coeff-range", "50", "--csv", str(path))
    lines = path.read_text().splitlines()
    assert code == EXIT_OK and lines[0] == "trial,output_index,input_index" and len(lines) == 21


def test_metrics_stdout(capsys):
    code, out, _ = run(capsys, "metrics", "--p", "3", "--samples", "50", "--depth", "30", "--kmax", "2")
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0].startswith("target,k,expected")
    assert len(lines) == 1 + 2 + 6


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "padiccf", "expand", "--p", "7", "--input", "rat:-7", "--count", "2"],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 0 and res.stdout.startswith("0, 48/7")
