# tests/test_commands.py - End-to-end runs of the qgraph command line through click's test runner
import json
import numpy as np
import pytest
from click.testing import CliRunner
from qgraph_logic.a_matrix.opSpace import OperatorSubspace
from qgraph_logic.b_connect import connectDecide
from qgraph_logic.e_cli import commands
from qgraph_logic.e_cli.commands import EXIT_INCONSISTENT, EXIT_NEGATIVE, EXIT_OK, EXIT_VALIDATION, qgraph_cli
from qgraph_logic.e_cli.instanceFiles import fixture_path, load_instance
from qgraph_logic.e_cli.reportWriter import REPORT_FORMAT


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()
    counter = {"k": 0}

    # Invokes the CLI with --report in tmp_path; returns the result and the parsed report
    def invoke(*args, report=True):
        argv = [str(a) for a in args]
        path = None
        if report:
            counter["k"] += 1
            path = tmp_path / f"report_{counter['k']}.json"
            argv += ["--report", str(path)]
        result = runner.invoke(qgraph_cli, argv, catch_exceptions=False)
        data = json.loads(path.read_text(encoding="utf-8")) if path is not None and path.exists() else None
        return result, data, path
    return invoke


def _certificate_types(data):
    return [c["type"] for c in data["certificates"]]


# === Connectedness ===
def test_connectedness_hamming(run):
    result, data, _ = run("connectedness", fixture_path("hamming_c2"))
    assert result.exit_code == EXIT_OK
    assert data["format"] == REPORT_FORMAT
    assert data["results"]["connectivity"]["verdict"] == "Connected"
    assert data["results"]["connectivity"]["stabilization_power"] <= 2


def test_connectedness_scalar_is_negative(run):
    result, data, path = run("connectedness", fixture_path("scalar_2"))
    assert result.exit_code == EXIT_NEGATIVE
    witness = data["results"]["connectivity"]["witness"]
    assert witness["rank"] == 1
    result, _, _ = run("verify", path, report=False)
    assert result.exit_code == EXIT_OK
    assert "1/1 certificate(s) verified" in result.output


def test_connectedness_lifted_path(run):
    result, data, _ = run("connectedness", fixture_path("lifted_p3"))
    assert result.exit_code == EXIT_OK
    assert data["results"]["connectivity"]["stabilization_power"] == 2


def test_report_to_stdout():
    result = CliRunner().invoke(qgraph_cli, ["connectedness", fixture_path("hamming_c2")])
    assert result.exit_code == EXIT_OK
    assert json.loads(result.output)["command"]["name"] == "connectedness"


# === Connectivity Bounds ===
@pytest.mark.parametrize("name,expected", [("lifted_p3", (1, 1)), ("complete_k4", None), ("offdiag_3", (2, 2))])
def test_k_bounds(run, tmp_path, name, expected):
    graph = fixture_path(name)
    if expected is None:
        result, _, _ = run("lift", fixture_path(name), "-o", tmp_path / "k4.json")
        graph, expected = tmp_path / "k4.json", (3, 3)
    result, data, path = run("k-bounds", graph, "--restarts", 4, "--seed", 7)
    assert result.exit_code == EXIT_OK
    bounds = data["results"]["bounds"]
    assert (bounds["lower"], bounds["upper"]) == expected
    assert "separator" in _certificate_types(data)
    result, _, _ = run("verify", path, report=False)
    assert result.exit_code == EXIT_OK


def test_k_bounds_with_lgp_representation(run):
    result, data, _ = run("k-bounds", fixture_path("offdiag_3"), "--lgp-rep", fixture_path("trace_3"),
                          "--no-maximal", "--restarts", 4)
    assert result.exit_code == EXIT_OK
    bounds = data["results"]["bounds"]
    assert bounds["lower"] == 2 and bounds["lower_conditional"]
    assert bounds["maximal"] is None
    assert data["results"]["lgp"]["bound"] == 2
    assert "map" in data["inputs"]


def test_k_bounds_reports_are_byte_identical(run):
    _, _, first = run("k-bounds", fixture_path("lifted_p3"), "--restarts", 4, "--seed", 11)
    _, _, again = run("k-bounds", fixture_path("lifted_p3"), "--restarts", 4, "--seed", 11)
    assert first.read_bytes() == again.read_bytes()


def test_maximal_refutes_scalar_graph(run):
    result, data, path = run("maximal", fixture_path("scalar_2"), "--restarts", 2)
    assert result.exit_code == EXIT_NEGATIVE
    assert data["results"]["maximal"]["verdict"] == "Refuted"
    assert _certificate_types(data) == ["annihilating_vectors"]
    result, _, _ = run("verify", path, report=False)
    assert result.exit_code == EXIT_OK


def test_maximal_verifies_offdiagonal_system(run):
    result, data, _ = run("maximal", fixture_path("offdiag_3"), "--restarts", 4)
    assert result.exit_code == EXIT_OK
    assert data["results"]["maximal"]["verdict"] == "Verified"


# === Tree Packing ===
def test_tree_packing_with_partition(run):
    result, data, path = run("tree-packing", fixture_path("lifted_p3"), fixture_path("partition_p3"))
    assert result.exit_code == EXIT_OK
    assert data["results"]["tree_packing"] == {"total": 2, "bound": 2, "holds": True, "parts": 2}
    result, _, _ = run("verify", path, report=False)
    assert result.exit_code == EXIT_OK


def test_tree_packing_witness_fails_on_disconnected(run):
    result, data, _ = run("tree-packing", fixture_path("scalar_2"), "--witness")
    assert result.exit_code == EXIT_NEGATIVE
    assert not data["results"]["tree_packing"]["holds"]


def test_tree_packing_needs_exactly_one_source(run):
    result, _, _ = run("tree-packing", fixture_path("lifted_p3"))
    assert result.exit_code == EXIT_VALIDATION
    result, _, _ = run("tree-packing", fixture_path("lifted_p3"), fixture_path("partition_p3"), "--witness")
    assert result.exit_code == EXIT_VALIDATION


# === Constructions ===
def test_lift_writes_operator_system(run, tmp_path):
    out = tmp_path / "lifted.json"
    result, data, path = run("lift", fixture_path("path_p3"), "-o", out)
    assert result.exit_code == EXIT_OK
    assert data["results"]["dim"] == 7
    assert load_instance(str(out), "quantum_graph").payload["n"] == 3
    result, _, _ = run("verify", path, report=False)
    assert result.exit_code == EXIT_OK


def test_confusability_of_scalar_graph_in_haar_basis(run):
    result, data, path = run("confusability", fixture_path("scalar_2"), "--haar", "--seed", 3)
    assert result.exit_code == EXIT_OK
    assert data["results"]["edges"] == 0
    assert data["seed"] == 3
    assert data["outputs"]["basis"]["meta"]["name"] == "haar"
    result, _, _ = run("verify", path, report=False)
    assert result.exit_code == EXIT_OK


def test_confusability_standard_basis_recovers_path(run):
    result, data, _ = run("confusability", fixture_path("lifted_p3"))
    assert result.exit_code == EXIT_OK
    assert data["outputs"]["confusability"]["payload"]["edges"] == [[1, 2], [2, 3]]
    assert data["seed"] is None


def test_channel_graph_of_dephasing(run):
    result, data, path = run("channel-graph", fixture_path("dephasing_2"))
    assert result.exit_code == EXIT_OK
    assert data["results"] == {"dim": 2, "n": 2, "connectivity": "Disconnected"}
    result, _, _ = run("verify", path, report=False)
    assert result.exit_code == EXIT_OK


def test_generate_is_reproducible(run, tmp_path):
    _, _, first = run("generate", "gnp", "--param", "n=5", "--param", "p=0.5", "--seed", 9)
    _, _, again = run("generate", "gnp", "--param", "n=5", "--param", "p=0.5", "--seed", 9)
    assert first.read_bytes() == again.read_bytes()
    out = tmp_path / "cube.json"
    result, data, _ = run("generate", "hamming", "--param", "m=2", "-o", out)
    assert result.exit_code == EXIT_OK
    assert data["command"]["args"]["params"] == {"m": 2}
    assert load_instance(str(out), "quantum_graph").payload["n"] == 4


def test_generate_rejects_bad_param(run):
    result, _, _ = run("generate", "gnp", "--param", "n")
    assert result.exit_code == EXIT_VALIDATION


# === Orthogonal Representations ===
def test_quantum_rep_round_trip(run, tmp_path):
    rep = tmp_path / "rep.json"
    result, data, path = run("to-quantum-rep", fixture_path("orth_rep_p3"), "-o", rep)
    assert result.exit_code == EXIT_OK
    assert data["results"] == {"in_dim": 3, "out_dim": 2, "kraus_count": 3}
    assert run("verify", path, report=False)[0].exit_code == EXIT_OK
    result, data, _ = run("check-orth-rep", rep, fixture_path("lifted_p3"), "--samples", 8)
    assert result.exit_code == EXIT_OK
    assert data["results"]["orth_rep"]["verdict"] == "PassSampled"
    result, data, path = run("to-classical-rep", rep, fixture_path("path_p3"))
    assert result.exit_code == EXIT_OK
    assert data["results"] == {"n": 3, "d": 2}
    assert run("verify", path, report=False)[0].exit_code == EXIT_OK


def test_quantum_rep_is_not_order_zero(run, tmp_path):
    rep = tmp_path / "rep.json"
    run("to-quantum-rep", fixture_path("orth_rep_p3"), "-o", rep)
    result, data, path = run("check-orth-rep", rep, "--samples", 4)
    assert result.exit_code == EXIT_NEGATIVE
    assert "scalar" in data["inputs"]
    assert "orth_rep_violation" in _certificate_types(data)
    result, _, _ = run("verify", path, report=False)
    assert result.exit_code == EXIT_OK


def test_check_lgp_trace_map(run):
    result, data, _ = run("check-lgp", fixture_path("trace_3"), fixture_path("offdiag_3"), "--samples", 4)
    assert result.exit_code == EXIT_OK
    assert data["results"]["bound"]["bound"] == 2
    assert not any("between the orthogonality and violation" in line for line in data["summary"])


def _with_borderline(real, count=2):
    def wrapped(*args, **kwargs):
        out = real(*args, **kwargs)
        report = out.orth_report if hasattr(out, "orth_report") else out
        report.borderline = count
        return out
    return wrapped


@pytest.mark.parametrize("argv", [
    ["check-lgp", fixture_path("trace_3"), fixture_path("offdiag_3"), "--samples", 4],
    ["k-bounds", fixture_path("offdiag_3"), "--lgp-rep", fixture_path("trace_3"), "--no-maximal", "--restarts", 4],
])
def test_borderline_pairs_reach_the_summary(run, monkeypatch, argv):
    monkeypatch.setattr(commands, "lgp_connectivity_bound", _with_borderline(commands.lgp_connectivity_bound))
    result, data, _ = run(*argv)
    assert result.exit_code == EXIT_OK
    notes = [line for line in data["summary"] if "between the orthogonality and violation" in line]
    assert len(notes) == 1 and notes[0].startswith("2 annihilating pair(s)")
    assert "PassSampled stands" in notes[0]


def test_check_orth_rep_notes_borderline(run, monkeypatch):
    monkeypatch.setattr(commands, "check_orth_rep", _with_borderline(commands.check_orth_rep, 3))
    result, data, _ = run("check-orth-rep", fixture_path("trace_3"), fixture_path("offdiag_3"), "--samples", 4)
    assert result.exit_code == EXIT_OK
    assert data["results"]["orth_rep"]["borderline"] == 3
    assert any(line.startswith("3 annihilating pair(s) sit between") for line in data["summary"])


def test_to_classical_rep_rejects_non_representation(run):
    result, _, _ = run("to-classical-rep", fixture_path("trace_3"), fixture_path("path_p3"))
    assert result.exit_code == EXIT_VALIDATION


# === Errors and Verification ===
def test_invalid_instance_exits_with_path(run, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "quantum_graph", "payload": {"n": 2, "generators": [[[[1, 0]]]]}}))
    result, data, _ = run("connectedness", bad)
    assert result.exit_code == EXIT_VALIDATION
    assert "$.payload.generators[0]" in result.output
    assert data is None


def test_wrong_kind_is_rejected(run):
    result, _, _ = run("connectedness", fixture_path("path_p3"))
    assert result.exit_code == EXIT_VALIDATION


def test_bad_tolerance_option(run):
    result, _, _ = run("--tol", "abc", "connectedness", fixture_path("scalar_2"), report=False)
    assert result.exit_code == 2


def test_verify_detects_tampering(run, tmp_path):
    _, data, _ = run("k-bounds", fixture_path("lifted_p3"), "--restarts", 4)
    for cert in data["certificates"]:
        if cert["type"] == "separator":
            cert["body"]["rank"] = 2
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(data))
    result, _, _ = run("verify", tampered, report=False)
    assert result.exit_code == EXIT_NEGATIVE
    assert "FAIL separator [graph]" in result.output


def test_verify_rejects_foreign_documents(run, tmp_path):
    result, _, _ = run("verify", fixture_path("scalar_2"), report=False)
    assert result.exit_code == EXIT_VALIDATION
    junk = tmp_path / "junk.json"
    junk.write_text("{")
    result, _, _ = run("verify", junk, report=False)
    assert result.exit_code == EXIT_VALIDATION


def test_disagreeing_tests_exit_inconsistent(run, monkeypatch):
    fake = OperatorSubspace(np.stack([np.eye(3), np.diag([1.0, 0, 0])]) / np.sqrt(2), 3)
    monkeypatch.setattr(connectDecide, "commutant", lambda S: fake)
    result, data, _ = run("connectedness", fixture_path("lifted_p3"))
    assert result.exit_code == EXIT_INCONSISTENT
    assert "commutant_dim" in result.output
    assert data is None
