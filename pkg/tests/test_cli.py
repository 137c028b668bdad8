import json
import subprocess
import sys

import pytest

from qresource.catalog import catalog_state
from qresource.cli import main
from qresource.ket import dumps_ket


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------- states


def test_states_list(capsys):
    code, out, _ = run(capsys, "states", "list")
    assert code == 0
    names = [line.split()[0] for line in out.splitlines()]
    assert names[:5] == ["GHZ4", "W4", "OMEGA", "S1", "S2"]


def test_states_show(capsys):
    code, out, _ = run(capsys, "states", "show", "GHZ4")
    assert out.strip() == "0.7071067812|0000> + 0.7071067812|1111>"
    doc = run_json(capsys, "states", "show", "S1")
    assert doc["n_qubits"] == 4 and len(doc["amplitudes"]) == 16


def test_states_show_needs_name(capsys):
    code, _, err = run(capsys, "states", "show")
    assert code == 2 and err.count("\n") == 1


# ---------------------------------------------------------------- entropy / schmidt


def test_entropy_table_ghz4(capsys):
    code, out, _ = run(capsys, "entropy", "--state", "GHZ4")
    rows = out.splitlines()[1:]
    assert code == 0 and len(rows) == 7
    assert all(r.split()[-1] == "1.0000" for r in rows)


def test_entropy_json_schema(capsys):
    doc = run_json(capsys, "entropy", "--state", "W4")
    assert set(doc) == {"state", "n_qubits", "rows"}
    assert doc["rows"][0] == {"side_a": [1], "side_b": [2, 3, 4], "entropy_bits": pytest.approx(0.8112781244591328, abs=1e-12)}
    assert [r["side_a"] for r in doc["rows"]] == [[1], [1, 3, 4], [1, 2, 4], [1, 2, 3], [1, 2], [1, 3], [1, 4]]


def test_table_and_json_agree(capsys):
    _, out, _ = run(capsys, "entropy", "--state", "S1")
    doc = run_json(capsys, "entropy", "--state", "S1")
    printed = [float(line.split()[-1]) for line in out.splitlines()[1:]]
    for p, row in zip(printed, doc["rows"]):
        assert abs(p - row["entropy_bits"]) <= 5e-5


def test_schmidt(capsys):
    code, out, _ = run(capsys, "schmidt", "--state", "S1", "--side-a", "3,4")
    assert code == 0 and "rank 3" in out and "entropy 1.5000" in out
    doc = run_json(capsys, "schmidt", "--state", "GHZ4", "--side-a", "1")
    assert doc["coefficients"] == pytest.approx([2**-0.5, 2**-0.5])
    assert doc["side_a"] == [1] and doc["side_b"] == [2, 3, 4]
    assert len(doc["right_basis"][0]) == 8


# ---------------------------------------------------------------- teleport


def test_teleport_check_w4(capsys):
    code, out, _ = run(capsys, "teleport", "check", "--state", "W4", "--bob", "4", "--m", "2")
    assert code == 0 and out.strip() == "infeasible, S=0.8113, need 1.0000"


def test_teleport_strict_exit(capsys):
    code, _, _ = run(capsys, "teleport", "check", "--state", "W4", "--bob", "4", "--m", "2", "--strict")
    assert code == 1
    code, _, _ = run(capsys, "teleport", "check", "--state", "GHZ4", "--bob", "4", "--m", "2", "--strict")
    assert code == 0


def test_teleport_check_json(capsys):
    doc = run_json(capsys, "teleport", "check", "--state", "OMEGA", "--bob", "3,4", "--m", "4")
    assert doc["feasible"] and doc["bob_entropy_bits"] == pytest.approx(2.0)
    assert doc["schmidt_spectrum"] == pytest.approx([0.5] * 4)


def test_teleport_run_seed(capsys):
    doc = run_json(capsys, "teleport", "run", "--state", "OMEGA", "--bob", "1,2", "--m", "4", "--seed", "5")
    assert doc["active_count"] == 16 and doc["min_fidelity"] >= 1 - 1e-9
    assert doc["outcome_probabilities"] == pytest.approx([1 / 16] * 16)


def test_teleport_run_alpha(capsys):
    code, out, _ = run(capsys, "teleport", "run", "--state", "GHZ4", "--bob", "4", "--m", "2", "--alpha", "0.6,0.8i")
    assert code == 0 and "min fidelity 1.0000000000" in out


def test_teleport_run_infeasible_and_forced(capsys):
    code, out, _ = run(capsys, "teleport", "run", "--state", "W4", "--bob", "4", "--m", "2", "--strict")
    assert code == 1 and "infeasible" in out
    doc = run_json(capsys, "teleport", "run", "--state", "W4", "--bob", "4", "--m", "2", "--force", "--seed", "1")
    assert doc["min_fidelity"] < 1 - 1e-3 and doc["feasible"] is False


def test_teleport_alpha_and_seed_conflict(capsys):
    code, _, err = run(capsys, "teleport", "run", "--state", "GHZ4", "--bob", "4", "--m", "2", "--alpha", "1,0", "--seed", "1")
    assert code == 2 and "either" in err


# ---------------------------------------------------------------- sdc


def test_sdc_json(capsys):
    doc = run_json(capsys, "sdc", "--state", "OMEGA", "--sender", "1,2")
    assert doc["capacity_cbits"] == 4.0 and doc["k_orthogonal"] == 16
    assert doc["witness"][:2] == ["II", "IX"]


def test_sdc_table_and_strict(capsys):
    code, out, _ = run(capsys, "sdc", "--state", "S1", "--sender", "1,3", "--strict")
    assert code == 1 and "capacity 2.0000" in out
    code, _, _ = run(capsys, "sdc", "--state", "S1", "--sender", "1,2", "--strict")
    assert code == 0


# ---------------------------------------------------------------- qkd


def test_qkd_check_json(capsys):
    doc = run_json(capsys, "qkd", "check", "--state", "GHZ4", "--alice", "1,3")
    assert doc["bob"] == [2, 4] and doc["perfectly_correlated"]
    assert len(doc["correlations"]) == 2
    assert all(len(c["joint"]) == 4 for c in doc["correlations"])
    assert doc["suitability"]["suitable"]


def test_qkd_check_table(capsys):
    code, out, _ = run(capsys, "qkd", "check", "--state", "S1", "--alice", "1,3")
    assert code == 0 and "suitable: False" in out
    code, _, _ = run(capsys, "qkd", "check", "--state", "S1", "--alice", "1,3", "--strict")
    assert code == 1


def test_qkd_run(capsys):
    doc = run_json(capsys, "qkd", "run", "--state", "GHZ4", "--alice", "1,3", "--rounds", "1000", "--seed", "42")
    assert doc["agreement_rate"] == 1.0 and doc["rounds"] == 1000
    assert doc["alice_key"] == doc["bob_key"]


def test_qkd_needs_two_alice_qubits(capsys):
    code, _, err = run(capsys, "qkd", "check", "--state", "GHZ4", "--alice", "1")
    assert code == 2 and err.startswith("error:")


# ---------------------------------------------------------------- inputs and errors


def test_state_files(tmp_path, capsys):
    ket = tmp_path / "s.ket"
    ket.write_text("(|00> + |11>)/sqrt(2)")
    js = tmp_path / "s.json"
    js.write_text(dumps_ket(catalog_state("S1")))
    doc = run_json(capsys, "entropy", "--state", str(ket))
    assert doc["rows"][0]["entropy_bits"] == pytest.approx(1.0)
    code, out, _ = run(capsys, "teleport", "check", "--state", str(js), "--bob", "2", "--m", "2")
    assert out.startswith("feasible")


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["entropy", "--state", "NOPE"], "unknown state"),
        (["entropy", "--state", "missing.ket"], "cannot read"),
        (["sdc", "--state", "GHZ4", "--sender", "1,9"], "out of range"),
        (["sdc", "--state", "GHZ4", "--sender", "a"], "comma-separated"),
        (["sdc", "--state", "GHZ4", "--sender", "1,1"], "repeated"),
        (["sdc", "--state", "GHZ4", "--sender", "1,2,3,4"], "at least one qubit"),
        (["teleport", "check", "--state", "GHZ4", "--bob", "4", "--m", "3"], "m must"),
    ],
)
def test_usage_errors(argv, fragment, capsys):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert fragment in err and err.count("\n") == 1


def test_bad_state_file(tmp_path, capsys):
    bad = tmp_path / "bad.ket"
    bad.write_text("|0> + |")
    code, _, err = run(capsys, "entropy", "--state", str(bad))
    assert code == 2 and "bad state file" in err


def test_unknown_command_exit_code():
    proc = subprocess.run([sys.executable, "-m", "qresource", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert proc.stderr.count("\n") == 1


def test_paper_suite(capsys):
    code, out, _ = run(capsys, "paper-suite")
    assert code == 0
    assert "FAIL" not in out
    doc = run_json(capsys, "paper-suite")
    assert doc["passed"] and len(doc["checks"]) > 50
