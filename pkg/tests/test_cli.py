import json
import subprocess
import sys

from flagpde.cli import main


def run_cli(args):
    return main(list(args))


def test_basis_harmonic_smoke(tmp_path):
    out = tmp_path / "h.json"
    assert run_cli(["basis", "harmonic", "--n", "3", "--cap", "2", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["result"]["verified"] is True
    assert data["result"]["elements"]


def test_basis_constant_and_flag(tmp_path):
    out = tmp_path / "c.json"
    assert run_cli(["basis", "constant", "--orders", "2,2", "--cap", "3", "--out", str(out)]) == 0
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "orders": [2, 2],
        "coefficients": [[{"exp": {"x1": 1}, "re": "1", "im": "0"}]],
        "variables": ["x1", "x2"],
    }))
    out2 = tmp_path / "f.json"
    assert run_cli(["basis", "flag", "--spec", str(spec), "--cap", "3", "--out", str(out2)]) == 0


def test_basis_anisym_and_dissipative(tmp_path):
    assert run_cli(["basis", "dissipative", "--n", "2", "--cap", "3"]) == 0
    assert run_cli(["basis", "anisym", "--lambda", "-3", "--epsilon", "-1", "--n", "1", "--cap", "3"]) == 0


def test_solve_klein_gordon(tmp_path):
    out = tmp_path / "kg.json"
    assert run_cli(["solve", "klein-gordon", "--a", "1/2", "--monomial", "0,2,0", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["result"]["solutions"]) == 2


def test_tree_validate_rejects_bad_tree(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nodes": 3, "edges": [[1, 3], [2, 3]]}))
    assert run_cli(["tree", "validate", "--tree", str(bad)]) == 2


def test_tree_schema_violation_is_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nodes": "three", "edges": []}))
    assert run_cli(["tree", "validate", "--tree", str(bad)]) == 2


def test_tree_xi_and_splitting(tmp_path):
    tree = tmp_path / "chain3.json"
    tree.write_text(json.dumps({"nodes": 3, "edges": [[1, 2], [2, 3]]}))
    out = tmp_path / "xi.json"
    assert run_cli(["tree", "xi", "--tree", str(tree), "--out", str(out)]) == 0
    assert run_cli(["tree", "check-splitting", "--tree", str(tree), "--cap", "2", "--tcap", "2"]) == 0


def test_ivp_flag_grid(tmp_path):
    symbols = tmp_path / "symbols.json"
    symbols.write_text(json.dumps({
        "variables": ["D2"],
        "symbols": [[], [{"exp": {"D2": 2}, "re": "1", "im": "0"}]],
    }))
    data = tmp_path / "data.json"
    data.write_text(json.dumps({
        "halfWidths": [1.0],
        "conditions": [{"modes": [{"k": [1], "cos": 1.0, "sin": 0.0}]}, {"modes": []}],
    }))
    out = tmp_path / "grid.csv"
    code = run_cli([
        "ivp", "flag", "--orders", "2", "--symbols", str(symbols),
        "--data", str(data), "--grid", "3x3", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x1,x2,value"
    assert len(lines) == 10


def test_ivp_tree_wave_grid(tmp_path):
    tree = tmp_path / "chain3.json"
    tree.write_text(json.dumps({"nodes": 3, "edges": [[1, 2], [2, 3]]}))
    data = tmp_path / "data.json"
    data.write_text(json.dumps({
        "halfWidths": [1.0, 1.0, 1.0],
        "g0": {"modes": [{"k": [1, 1, 1], "cos": 1.0, "sin": 0.0}]},
        "g1": {"modes": []},
    }))
    out = tmp_path / "grid.json"
    code = run_cli([
        "ivp", "tree-wave", "--tree", str(tree), "--data", str(data),
        "--t", "0.05", "--grid", "2x2x2", "--out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["result"]["verification"]["passed"] is True


def test_lie_subcommands(tmp_path):
    assert run_cli(["lie", "harmonic", "--n", "3", "--k", "2"]) == 0
    assert run_cli(["lie", "sl", "--n", "2", "--l1", "1", "--l2", "1"]) == 0
    assert run_cli(["lie", "g2", "--k", "1"]) == 0
    assert run_cli(["lie", "check"]) == 0


def test_ode_subcommand(tmp_path):
    out = tmp_path / "ode.json"
    assert run_cli(["ode", "--coeffs", "0,-1", "--init", "1,0", "--t", "1.0", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    import math

    assert abs(data["result"]["value"] - math.cos(1.0)) < 1e-10


def test_unknown_arguments_exit_two():
    assert run_cli(["basis", "harmonic", "--bogus"]) == 2


def test_missing_required_options_exit_two():
    assert run_cli(["basis", "constant"]) == 2
    assert run_cli(["basis", "anisym"]) == 2
    assert run_cli(["basis", "flag"]) == 2


def test_jobs_flag_runs_parallel_verification():
    assert run_cli(["basis", "harmonic", "--n", "3", "--cap", "3", "--jobs", "2"]) == 0


def test_verification_failure_maps_to_exit_three(monkeypatch):
    import flagpde.cli as cli
    from flagpde.operators import VerificationError

    def boom(*args, **kwargs):
        raise VerificationError("forced failure")

    monkeypatch.setattr(cli, "harmonic_basis", boom)
    assert run_cli(["basis", "harmonic", "--n", "3", "--cap", "2"]) == 3


def test_determinism_byte_identical(tmp_path):
    out = tmp_path / "a.json"
    args = ["basis", "harmonic", "--n", "3", "--cap", "3", "--seed", "0", "--out", str(out)]
    assert run_cli(args) == 0
    first = out.read_bytes()
    assert run_cli(args) == 0
    assert out.read_bytes() == first


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "flagpde.cli", "--version"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "flagpde" in proc.stdout
