"""End-to-end tests for the command line interface."""

import json

import pytest

from randposet.cli import main
from randposet.correspondence import count_copies
from randposet.posets import vee
from randposet.ramsey import parse_dimacs


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- antichains -------------------------------------------------------------------


def test_antichains_text_output(capsys):
    code, out, _ = run(capsys, "antichains", "chain:3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "4 antichains"
    assert lines[-1] == "{}"
    assert len(lines) == 5


def test_antichains_count_only_and_json(capsys):
    code, out, _ = run(capsys, "antichains", "boolean:2", "--count-only")
    assert code == 0
    assert out.strip() == "6 antichains"
    code, out, _ = run(capsys, "antichains", "boolean:2", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["count"] == 6
    assert len(record["antichains"]) == 6
    assert record["antichains"][-1] == []


def test_antichains_capacity_exit_code(capsys):
    code, _, err = run(capsys, "antichains", "antichain:24", "--cap", "100")
    assert code == 2
    assert "capacity" in err.lower()


def test_unknown_poset_is_a_usage_error(capsys):
    code, _, err = run(capsys, "antichains", "no-such-poset")
    assert code == 1
    assert "error" in err.lower()


def test_bad_subcommand_is_a_usage_error(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 1


# -- cstar and classify ----------------------------------------------------------


def test_cstar_json_record(capsys):
    code, out, _ = run(capsys, "cstar", "diamond", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["value"] == pytest.approx(0.4476995514, abs=1e-6)
    assert record["class"] == "Balanced"
    assert record["converged"] is True
    assert record["lower"] <= record["value"] <= record["upper"]


def test_cstar_text_output(capsys):
    code, out, _ = run(capsys, "cstar", "chain:2")
    assert code == 0
    assert "value 0.5493" in out
    assert "class Uniform" in out
    assert "bracket [" in out


def test_classify_text_and_json(capsys):
    code, out, _ = run(capsys, "classify", "chain:2")
    assert code == 0
    assert out.startswith("class Uniform")
    code, out, _ = run(capsys, "classify", "dd", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["class"] == "Balanced"
    assert record["details"]["balanced_x"] == pytest.approx(0.1329159960, abs=1e-8)


# -- counting ---------------------------------------------------------------------


def test_count_matches_library(capsys):
    code, out, _ = run(capsys, "count", "v", "--n", "3", "--mode", "injective")
    assert code == 0
    assert int(out.strip()) == count_copies(vee(), 3, mode="injective")
    code, out, _ = run(capsys, "count", "v", "--n", "3", "--mode", "weak", "--json")
    assert code == 0
    assert json.loads(out)["count"] == 5 ** 3


# -- the results table -------------------------------------------------------------


def test_table1_selected_rows(capsys):
    code, out, _ = run(capsys, "table1", "--rows", "V,DD", "--json")
    assert code == 0
    record = json.loads(out)
    assert len(record["rows"]) == 2
    by_name = {row["name"]: row for row in record["rows"]}
    assert by_name["DD"]["flags"] == []
    assert by_name["V"]["flags"] == []
    assert by_name["DD"]["computed"]["value"] == pytest.approx(0.38166486, abs=1e-6)


def test_table1_known_open_row_is_flagged_but_passes(capsys):
    code, out, _ = run(capsys, "table1", "--rows", "P(3)", "--json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["flags"] == ["class-mismatch (known)"]
    assert row["note"]


# -- ramsey commands ----------------------------------------------------------------


def test_ramsey_bounds_chain_pair(capsys):
    code, out, _ = run(capsys, "ramsey-bounds", "--p", "chain:2", "--q", "chain:2", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["exact"] == pytest.approx(0.4620981204, abs=1e-6)


def test_ramsey_bounds_family_argument(capsys):
    code, out, _ = run(capsys, "ramsey-bounds", "--p", "v,lambda", "--q", "v,lambda", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["lower"] == pytest.approx(0.4158883083, abs=1e-6)


def test_arrows_command(capsys):
    code, out, _ = run(capsys, "arrows", "--host", "boolean:2", "--p", "chain:2", "--q", "chain:2")
    assert code == 0
    assert out.strip() == "true"
    code, out, _ = run(capsys, "arrows", "--host", "boolean:1", "--p", "chain:2", "--q", "chain:2", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["arrows"] is False
    assert sorted(set(record["witness"])) in ([1], [1, 2], [2])


def test_ramsey_number_command(capsys):
    code, out, _ = run(capsys, "ramsey-number", "--p", "chain:2", "--q", "chain:2")
    assert code == 0
    assert out.strip() == "2"
    code, out, _ = run(capsys, "ramsey-number", "--p", "chain:2", "--q", "chain:2", "--n-max", "1")
    assert code == 0
    assert "none" in out


# -- SAT plumbing --------------------------------------------------------------------


def test_sat_encode_stdout_and_file(tmp_path, capsys):
    code, out, _ = run(capsys, "sat-encode", "--host", "boolean:2", "--pattern", "chain:2")
    assert code == 0
    assert out.startswith("p cnf 4 ")
    path = tmp_path / "avoid.cnf"
    code, out, _ = run(capsys, "sat-encode", "--host", "boolean:2", "--pattern", "chain:2",
                       "--output", str(path))
    assert code == 0
    assert "wrote" in out
    cnf = parse_dimacs(path.read_text(encoding="utf-8"))
    assert cnf.num_vars == 4


def test_sat_solve_from_dimacs(tmp_path, capsys):
    path = tmp_path / "avoid.cnf"
    run(capsys, "sat-encode", "--host", "boolean:2", "--pattern", "chain:2",
        "--output", str(path))
    capsys.readouterr()
    code, out, _ = run(capsys, "sat-solve", "--dimacs", str(path))
    assert code == 0
    assert out.strip().splitlines()[0] == "UNSAT"


def test_sat_solve_from_patterns(capsys):
    code, out, _ = run(capsys, "sat-solve", "--host", "boolean:3", "--pattern", "boolean:3",
                       "--mode", "all-induced", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["status"] == "sat"
    assert len(record["colouring"]) == 8


def test_sat_solve_requires_an_input(capsys):
    code, _, err = run(capsys, "sat-solve")
    assert code == 1
    assert "need either" in err


# -- simulation ------------------------------------------------------------------------


def test_simulate_csv_stdout(capsys):
    code, out, _ = run(capsys, "simulate", "--pattern", "chain:2", "--n", "8",
                       "--c", "0.1,1.5", "--trials", "3", "--seed", "0")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "c,trials,successes,p_hat"
    assert len(lines) == 3


def test_simulate_deterministic_outputs(tmp_path, capsys):
    argv = ["simulate", "--pattern", "v", "--n", "9", "--c-grid", "0.2:0.6:0.2",
            "--trials", "4", "--seed", "11", "--output"]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + [str(p1)]) == 0
    assert main(argv + [str(p2)]) == 0
    capsys.readouterr()
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text(encoding="utf-8").count("\n") == 4


def test_simulate_weight_sidecar(tmp_path, capsys):
    sidecar = tmp_path / "weights.json"
    code, out, _ = run(capsys, "simulate", "--pattern", "chain:2", "--n", "10",
                       "--c", "0.1", "--trials", "2", "--seed", "3",
                       "--record-weights", str(sidecar))
    assert code == 0
    records = json.loads(sidecar.read_text(encoding="utf-8"))
    assert records and all(abs(sum(r["weighting"]) - 1.0) < 1e-12 for r in records)


def test_simulate_grid_validation(capsys):
    code, _, err = run(capsys, "simulate", "--pattern", "chain:2", "--n", "8",
                       "--c-grid", "0.5:0.1:0.1")
    assert code == 1
    code, _, err = run(capsys, "simulate", "--pattern", "chain:2", "--n", "8")
    assert code == 1
    assert "need --c-grid or --c" in err


def test_simulate_json_output(capsys):
    code, out, _ = run(capsys, "simulate", "--pattern", "chain:2", "--n", "8",
                       "--c", "0.3", "--trials", "2", "--seed", "0", "--json")
    assert code == 0
    record = json.loads(out)
    assert record["pattern"] == "chain:2"
    assert record["rows"][0]["trials"] == 2
