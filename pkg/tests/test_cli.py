import json
import subprocess
import sys

import pytest

from focklab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestMatrix:
    def test_htoeplitz_conj_z(self, capsys):
        code, out, _ = run(capsys, "matrix", "--symbol", "conj(z)", "--kind", "htoeplitz", "--rows", "4", "--cols", "8", "--alpha", "1")
        assert code == 0
        data = json.loads(out)
        assert (data["rows"], data["cols"], data["kind"]) == (4, 8, "htoeplitz")
        assert data["entries"][0][2] == [1.0, 0.0]

    def test_zero_symbol(self, capsys):
        code, out, _ = run(capsys, "matrix", "--symbol", "0", "--kind", "hankel", "--rows", "3")
        assert code == 0
        assert all(c == [0.0, 0.0] for row in json.loads(out)["entries"] for c in row)

    def test_syntax_error(self, capsys):
        code, out, err = run(capsys, "matrix", "--symbol", "z^^2", "--kind", "toeplitz", "--rows", "3")
        assert code == 2 and out == ""
        e = json.loads(err)
        assert e["error"] == "SymbolSyntaxError" and e["position"] == 2

    def test_size_limit(self, capsys):
        code, _, err = run(capsys, "matrix", "--symbol", "z", "--kind", "toeplitz", "--rows", "5000")
        assert code == 3 and json.loads(err)["error"] == "SizeLimitError"

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "matrix", "--symbol", "conj(z)", "--kind", "htoeplitz", "--rows", "1", "--cols", "3", "--format", "csv")
        assert code == 0 and out == '"0,0","0,0","1,0"\n'

    def test_bad_format(self, capsys):
        code, _, err = run(capsys, "matrix", "--symbol", "z", "--kind", "toeplitz", "--format", "dot")
        assert code == 2 and "formats" in json.loads(err)["message"]

    def test_bad_kind(self, capsys):
        code, _, err = run(capsys, "matrix", "--symbol", "z", "--kind", "bergman")
        assert code == 2 and json.loads(err)["exit_code"] == 2

    def test_bad_alpha(self, capsys):
        code, _, _ = run(capsys, "matrix", "--symbol", "z", "--kind", "toeplitz", "--alpha", "-1")
        assert code == 2


class TestConfig:
    def test_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("FOCKLAB_ALPHA", "4")
        _, out, _ = run(capsys, "matrix", "--symbol", "z", "--kind", "toeplitz", "--rows", "2")
        data = json.loads(out)
        assert data["alpha"] == 4.0
        assert data["entries"][1][0] == [0.5, 0.0]

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("FOCKLAB_ALPHA", "4")
        _, out, _ = run(capsys, "matrix", "--symbol", "z", "--kind", "toeplitz", "--rows", "2", "--alpha", "1")
        assert json.loads(out)["alpha"] == 1.0

    def test_env_sizes(self, capsys, monkeypatch):
        monkeypatch.setenv("FOCKLAB_ROWS", "3")
        _, out, _ = run(capsys, "matrix", "--symbol", "z", "--kind", "toeplitz")
        assert json.loads(out)["rows"] == 3

    def test_bad_env(self, capsys, monkeypatch):
        monkeypatch.setenv("FOCKLAB_ALPHA", "heavy")
        code, _, err = run(capsys, "matrix", "--symbol", "z", "--kind", "toeplitz")
        assert code == 2 and "FOCKLAB_ALPHA" in json.loads(err)["message"]


class TestOutputFiles:
    def test_writes_file(self, capsys, tmp_path):
        path = tmp_path / "m.csv"
        code, out, _ = run(capsys, "matrix", "--symbol", "z", "--kind", "toeplitz", "--rows", "2", "--format", "csv", "--out", str(path))
        assert code == 0 and out == ""
        assert path.read_text().count("\n") == 2

    def test_no_partial_artifact_on_error(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        code, _, _ = run(capsys, "matrix", "--symbol", "z^^", "--kind", "toeplitz", "--out", str(path))
        assert code == 2 and not path.exists()
        code, _, _ = run(capsys, "graph", "--symbol", "z", "--n", "9999", "--out", str(path))
        assert code == 3 and not path.exists()

    def test_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for p in (a, b):
            run(capsys, "graph", "--symbol", "4*z+z^3+conj(z)^2+7*conj(z)^3", "--n", "30", "--format", "json", "--compare", "--out", str(p))
        assert a.read_bytes() == b.read_bytes()


class TestAnalysisCommands:
    def test_commutator(self, capsys):
        code, out, _ = run(capsys, "commutator", "--phi", "z^2", "--psi", "conj(z)", "--block", "6")
        assert code == 0 and json.loads(out)["verdict"] == "non-commuting"

    def test_commutator_dependent(self, capsys):
        _, out, _ = run(capsys, "commutator", "--phi", "z+conj(z)^2", "--psi", "2.5*z+2.5*conj(z)^2")
        assert json.loads(out)["verdict"] == "commuting"

    def test_apply(self, capsys):
        _, out, _ = run(capsys, "apply", "--symbol", "conj(z)", "--basis", "2", "--alpha", "4")
        assert json.loads(out)["output"] == {"0": [0.5, 0.0]}

    def test_apply_vector(self, capsys):
        _, out, _ = run(capsys, "apply", "--symbol", "1", "--kind", "toeplitz", "--vector", '{"0": [1, 0], "3": 2}')
        assert json.loads(out)["output"] == {"0": [1.0, 0.0], "3": [2.0, 0.0]}

    def test_apply_bad_vector(self, capsys):
        code, _, _ = run(capsys, "apply", "--symbol", "z", "--vector", "[1, 2]")
        assert code == 2

    def test_hsnorm(self, capsys):
        _, out, _ = run(capsys, "hsnorm", "--symbol", "z", "--ncols", "7")
        assert json.loads(out)["partial_sum"] == pytest.approx(11, abs=1e-10)

    def test_defect(self, capsys):
        _, out, _ = run(capsys, "defect", "--symbol", "z", "--nmax", "10")
        data = json.loads(out)
        assert data["vanishes_from"] == 1 and len(data["values"]) == 11

    def test_defect_csv(self, capsys):
        _, out, _ = run(capsys, "defect", "--symbol", "1", "--nmax", "2", "--format", "csv")
        assert out.splitlines()[0] == "n,defect,scale,zero"

    def test_berezin(self, capsys):
        _, out, _ = run(capsys, "berezin", "--symbol", "1", "--radii", "0,5")
        lines = out.splitlines()
        assert lines[0] == "radius,re,im,abs" and float(lines[2].split(",")[1]) < 0.5

    def test_berezin_json(self, capsys):
        _, out, _ = run(capsys, "berezin", "--symbol", "2", "--radii", "0", "--format", "json")
        assert json.loads(out)["values"][0]["value"] == [2.0, 0.0]

    def test_berezin_bad_radii(self, capsys):
        code, _, _ = run(capsys, "berezin", "--symbol", "1", "--radii", "0,x")
        assert code == 2


class TestGraph:
    def test_dot(self, capsys):
        code, out, _ = run(capsys, "graph", "--symbol", "2*conj(z)^1+3*conj(z)^2+conj(z)^3", "--n", "25", "--format", "dot")
        assert code == 0
        assert all(f"  1 -> {j};" in out for j in (3, 5, 7))
        assert "  1 -> 9;" not in out

    def test_params(self, capsys):
        _, out, _ = run(capsys, "graph", "--xs", "2,4,6", "--n", "9", "--format", "csv")
        assert "1,3" in out.splitlines()

    def test_json_compare(self, capsys):
        _, out, _ = run(capsys, "graph", "--symbol", "5*z+9*z^2+z^4", "--n", "25", "--format", "json", "--compare")
        data = json.loads(out)
        assert data["params"]["xs"] == [1, 3, 7]
        assert not data["compare"]["identical"]

    def test_needs_input(self, capsys):
        assert run(capsys, "graph", "--n", "5")[0] == 2
        assert run(capsys, "graph", "--symbol", "z", "--xs", "1")[0] == 2

    def test_bad_offsets(self, capsys):
        assert run(capsys, "graph", "--xs", "4,2", "--n", "9")[0] == 2


class TestVerify:
    def test_subset_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--criteria", "1,5,11")
        assert code == 0 and "3/3 criteria passed" in out

    def test_json(self, capsys):
        code, out, _ = run(capsys, "verify", "--criteria", "4", "--format", "json")
        data = json.loads(out)
        assert code == 0 and data["passed"] and data["criteria"][0]["criterion"] == 4

    def test_unknown_criterion(self, capsys):
        assert run(capsys, "verify", "--criteria", "13")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "focklab", "graph", "--xs", "2", "--n", "3"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert proc.stdout == "digraph W {\n  1;\n  2;\n  3;\n  1 -> 3;\n}\n"
