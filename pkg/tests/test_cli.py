import json
import math
import subprocess
import sys

import numpy as np
import pytest

from resmex.cli import main
from resmex.formats import save_state
from resmex.qstate import SUBNORMALIZED, DensityState, random_density


@pytest.fixture
def files(tmp_path):
    paths = {}
    states = {
        "ket0": DensityState(np.diag([1.0, 0.0])),
        "ket1": DensityState(np.diag([0.0, 1.0])),
        "mixed": DensityState(np.eye(2) / 2),
        "rand": random_density(2, seed=3),
        "half0": DensityState(np.diag([0.5, 0.0]), SUBNORMALIZED),
        "threeq0": DensityState(np.diag([0.75, 0.0]), SUBNORMALIZED),
        "bell": DensityState(np.outer([1, 0, 0, 1], [1, 0, 0, 1]) / 2),
    }
    for name, s in states.items():
        paths[name] = str(tmp_path / f"{name}.json")
        save_state(s, paths[name])
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_umegaki(files, capsys):
    code, out, _ = run(capsys, "compute", "--divergence", "umegaki", "--rho", files["ket0"], "--sigma", files["mixed"])
    assert code == 0
    rec = json.loads(out)
    assert rec["value"] == 1.0
    assert rec["diagnostics"]["support_contained"] is True


def test_infinite_value_prints_inf(files, capsys):
    code, out, _ = run(capsys, "compute", "--divergence", "umegaki", "--rho", files["ket0"], "--sigma", files["ket1"])
    assert code == 0
    assert json.loads(out)["value"] == "inf"


def test_values_rounded_to_twelve_digits(files, capsys):
    code, out, _ = run(capsys, "compute", "--divergence", "fidelity", "--rho", files["ket0"], "--sigma", files["mixed"])
    assert json.loads(out)["value"] == float(f"{1 / math.sqrt(2):.12g}")


def test_alpha_required_and_infinite_alpha(files, capsys):
    code, _, err = run(capsys, "compute", "--divergence", "sandwiched", "--rho", files["rand"], "--sigma", files["mixed"])
    assert code == 2 and "--alpha" in err
    code, out, _ = run(capsys, "compute", "--divergence", "sandwiched", "--alpha", "inf",
                       "--rho", files["rand"], "--sigma", files["mixed"])
    assert code == 0 and json.loads(out)["alpha"] == "inf"


def test_alpha_out_of_window_is_usage_error(files, capsys):
    code, _, err = run(capsys, "compute", "--divergence", "petz", "--alpha", "3", "--rho", files["rand"], "--sigma", files["mixed"])
    assert code == 2 and "alpha" in err


def test_unknown_divergence(files, capsys):
    code, _, err = run(capsys, "compute", "--divergence", "nope", "--rho", files["rand"], "--sigma", files["mixed"])
    assert code == 2 and "umegaki" in err


def test_malformed_file_names_line(files, capsys):
    bad = files["dir"] / "bad.json"
    bad.write_text('{"dim": 2,\n "matrix": [}\n')
    code, _, err = run(capsys, "compute", "--divergence", "umegaki", "--rho", str(bad), "--sigma", files["mixed"])
    assert code == 2 and "line 2" in err


def test_missing_file(files, capsys):
    code, _, _ = run(capsys, "compute", "--divergence", "umegaki", "--rho", "/nonexistent.json", "--sigma", files["mixed"])
    assert code == 2


def test_extend_subnormalized(files, capsys):
    code, out, _ = run(capsys, "extend", "--kind", "subnorm", "--form", "extended-umegaki",
                       "--rho", files["half0"], "--sigma", files["threeq0"])
    assert code == 0
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(0.5 * math.log2(2 / 3) + 0.5, abs=1e-11)
    assert rec["direction"] == "exact"


def test_extend_classical_directions(files, capsys):
    code, out, _ = run(capsys, "extend", "--kind", "maximal-classical", "--classical", "renyi", "--alpha", "3",
                       "--rho", files["rand"], "--sigma", files["mixed"])
    assert code == 0 and json.loads(out)["direction"] == "upper"
    code, out, _ = run(capsys, "extend", "--kind", "minimal-classical", "--strategy", "random:5",
                       "--rho", files["rand"], "--sigma", files["mixed"])
    assert code == 0 and json.loads(out)["direction"] == "lower"
    code, out, _ = run(capsys, "extend", "--kind", "maximal-classical", "--method", "pure",
                       "--rho", files["ket0"], "--sigma", files["mixed"])
    assert code == 0 and json.loads(out)["value"] == 1.0
    code, _, _ = run(capsys, "extend", "--kind", "minimal-classical", "--strategy", "bogus",
                     "--rho", files["rand"], "--sigma", files["mixed"])
    assert code == 2


def test_suite_pass_and_outputs(files, capsys):
    out_json = str(files["dir"] / "r.json")
    code, out, _ = run(capsys, "suite", "--name", "sandwich", "--trials", "5", "--dims", "2,3", "--out", out_json)
    assert code == 0 and "10/10 pass" in out
    assert json.loads(open(out_json).read())["aggregate"]["total"] == 10
    out_csv = str(files["dir"] / "r.csv")
    code, _, _ = run(capsys, "suite", "--name", "eq1", "--trials", "2", "--out", out_csv)
    assert open(out_csv).readline().startswith("suite,trial")


def test_suite_failure_exit_code(capsys):
    # geometric and Petz agree only to rounding, so a vanishing slack must fail some trial
    code, out, _ = run(capsys, "suite", "--name", "geometric_petz", "--trials", "20", "--slack", "1e-300")
    assert code == 1 and "FAIL" in out


def test_suite_usage_errors(capsys):
    code, _, err = run(capsys, "suite", "--name", "nope")
    assert code == 2 and "sandwich" in err
    code, _, err = run(capsys, "suite", "--name", "dpi", "--extra", "{bad")
    assert code == 2 and "JSON" in err
    code, _, _ = run(capsys, "suite", "--name", "dpi", "--extra", '{"tni": true, "divergences": ["dmin"]}')
    assert code == 2


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("RESMEX_SEED", "42")
    _, first, _ = run(capsys, "suite", "--name", "sandwich", "--trials", "2", "--out", "/dev/null")
    _, explicit, _ = run(capsys, "suite", "--name", "sandwich", "--trials", "2", "--seed", "42", "--out", "/dev/null")
    assert first == explicit
    monkeypatch.setenv("RESMEX_SEED", "x")
    code, _, _ = run(capsys, "suite", "--name", "sandwich", "--trials", "2")
    assert code == 2


def test_aep_csv(files, capsys):
    code, out, _ = run(capsys, "aep", "--n-max", "4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "n,rate,gap,dmax_rate"
    assert len(lines) == 6


def test_schmidt_command(files, capsys):
    code, out, _ = run(capsys, "schmidt", "--state", files["bell"], "--cut", "2x2")
    rec = json.loads(out)
    assert code == 0 and rec["schmidt_number"] == 2 and rec["schmidt_rank"] == 2
    code, _, err = run(capsys, "schmidt", "--state", files["bell"], "--cut", "3x3")
    assert code == 2


def test_list_suites(capsys):
    code, out, _ = run(capsys, "list-suites")
    assert code == 0 and "hypo_chain" in out


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "resmex", "list-suites"], capture_output=True, text=True)
    assert res.returncode == 0 and "sandwich" in res.stdout
