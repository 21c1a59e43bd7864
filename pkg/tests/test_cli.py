import json
import math

import pytest

from qslkit.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, run_cli
from qslkit.states import save_state, validate_state


def run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bounds_subcommand_emits_json(capsys):
    code, out, _ = run(capsys, "bounds", "--qubit-p1", "0.5")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["tau_qsl"] == pytest.approx(math.pi, rel=1e-12)


def test_moments_subcommand_reads_a_state_file(tmp_path, capsys):
    path = tmp_path / "state.json"
    save_state(validate_state([(0.0, 0.8), (1.0, 0.2)]), path)
    code, out, _ = run(capsys, "moments", "--state", str(path))
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["mean"] == pytest.approx(0.2, abs=1e-15)
    assert payload["sigma"] == pytest.approx(0.4, abs=1e-15)


def test_regime_subcommand_accepts_bare_moments(capsys):
    code, out, _ = run(capsys, "regime", "--mean", "0.2", "--sigma", "0.45")
    assert code == EXIT_OK
    assert json.loads(out)["regime"] == "FORBIDDEN"


def test_regime_subcommand_reports_crossover(capsys):
    code, out, _ = run(capsys, "regime", "--qubit-p1", "0.2")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["regime"] == "ML"
    assert payload["crossover"] == pytest.approx(1.8466427569084543, rel=1e-9)


def test_state_source_is_required(capsys):
    code, _, err = run(capsys, "bounds")
    assert code == EXIT_INPUT
    assert "state source" in err


def test_conflicting_state_sources_are_rejected(capsys):
    code, _, err = run(capsys, "bounds", "--qubit-p1", "0.5", "--state", "x.json")
    assert code == EXIT_INPUT


def test_unknown_subcommand_exits_one(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_INPUT


def test_missing_state_file_exits_one(capsys):
    code, _, err = run(capsys, "bounds", "--state", "/nonexistent/state.json")
    assert code == EXIT_INPUT
    assert "error" in err


def test_qutrit_flags_build_a_state(capsys):
    code, out, _ = run(
        capsys, "moments", "--qutrit-mean", "0.5", "--qutrit-sigma", "0.3333333333333333"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["mean"] == pytest.approx(0.5, abs=1e-12)


def test_evolve_writes_deterministic_csv(tmp_path, capsys):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    for path in (first, second):
        code, _, _ = run(
            capsys, "evolve", "--qubit-p1", "0.5", "--steps", "50", "-o", str(path)
        )
        assert code == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert b"\r" not in first.read_bytes()
    header = first.read_text().split("\n")[0]
    assert header == "times,overlap_magnitude,mt_curve,ml_curve,ml_dual_curve"


def test_evolve_json_format(capsys):
    code, out, _ = run(
        capsys, "evolve", "--qubit-p1", "0.2", "--steps", "16", "--format", "json"
    )
    assert code == EXIT_OK
    assert json.loads(out)["metadata"]["regime"] == "ML"


def test_ortho_subcommand_reports_the_balanced_zero(capsys):
    code, out, _ = run(capsys, "ortho", "--qubit-p1", "0.5")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["found"] is True
    assert payload["t_perp"] == pytest.approx(math.pi, abs=1e-9)


def test_ortho_subcommand_reports_absence(capsys):
    code, out, _ = run(capsys, "ortho", "--qubit-p1", "0.2")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["found"] is False
    assert payload["t_perp"] is None


def test_fig1_csv_has_one_row_per_cell(capsys):
    code, out, _ = run(capsys, "fig1", "--resolution", "8")
    assert code == EXIT_OK
    assert len(out.rstrip("\n").split("\n")) == 1 + 64


def test_fig2_rejects_unknown_scenarios(capsys):
    assert run(capsys, "fig2", "--scenario", "q")[0] == EXIT_INPUT


def test_fig3_emits_csv(capsys):
    code, out, _ = run(capsys, "fig3", "--scenario", "b", "--steps", "8")
    assert code == EXIT_OK
    assert out.startswith("times,")


def test_falsify_small_run_passes(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, _, _ = run(
        capsys, "falsify", "--samples", "50", "--seed", "5", "-o", str(out_path)
    )
    assert code == EXIT_OK
    report = json.loads(out_path.read_text())
    assert report["samples"] == 50
    assert report["violations"] == []


def test_falsify_accepts_a_level_range(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, _, _ = run(
        capsys,
        "falsify",
        "--samples", "10",
        "--levels", "2:3",
        "--seed", "7",
        "-o", str(out_path),
    )
    assert code == EXIT_OK
    report = json.loads(out_path.read_text())
    assert report["samples"] == 10
    assert report["violations"] == []


def test_falsify_rejects_a_malformed_level_range(capsys):
    code, _, err = run(capsys, "falsify", "--levels", "eight")
    assert code == EXIT_INPUT
    assert "MIN:MAX" in err


def test_falsify_exits_two_when_the_tolerance_is_impossible(tmp_path, capsys):
    # a tolerance below the documented linear-model error must trip
    out_path = tmp_path / "report.json"
    code, _, _ = run(
        capsys,
        "falsify",
        "--samples", "50",
        "--seed", "5",
        "--slack-tolerance", "1e-12",
        "-o", str(out_path),
    )
    assert code == EXIT_VIOLATION
    report = json.loads(out_path.read_text())
    assert report["violations"]
    assert all(v["check"] == "envelope" for v in report["violations"])


def test_xi_check_passes_and_reports_rows(capsys):
    code, out, _ = run(capsys, "xi-check")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["ok"] is True
    assert len(payload["rows"]) == 20
    assert payload["delta_max"] < 5e-4
