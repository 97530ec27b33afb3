"""Exit codes, report shape and determinism of the command line interface."""

import json

import pytest

from hypschur.cli import (
    EXIT_IDENTITY,
    EXIT_INCONCLUSIVE,
    EXIT_INPUT,
    EXIT_OK,
    SCHEMA_VERSION,
    run,
)


def invoke(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


FAST_NORMS = ["--z", "0.5", "--n", "0", "--schedule", "1", "--tol", "1e-9"]


def test_verify_passes_on_line(capsys):
    code, rep, _ = invoke(capsys, ["verify", "--line", "20"])
    assert code == EXIT_OK
    assert rep["schema_version"] == SCHEMA_VERSION
    assert rep["command"] == "verify"
    assert rep["verdicts"]["passed"]
    assert rep["results"]["partition"]["passed"]
    assert rep["results"]["covering"]["passed"]
    assert rep["results"]["inner_product_table"]["mismatches"] == 0
    assert rep["results"]["binomial_suite"]["passed"]


def test_verify_narrow_corridors_exit_identity(capsys):
    code, rep, _ = invoke(capsys, ["verify", "--line", "40", "--rho", "2.5"])
    assert code == EXIT_IDENTITY
    assert "covering" in rep["verdicts"]["failures"]
    assert not rep["verdicts"]["passed"]


def test_input_errors_exit_four(capsys):
    for argv in (["verify", "--line", "20", "--bogus"],
                 ["verify"],
                 ["verify", "--line", "20", "--z", "1.5"],
                 ["verify", "--line", "20", "--z", "zebra"],
                 ["verify", "--line", "20", "--tol", "-1"],
                 ["verify", "--line", "20", "--rho", "0"],
                 ["verify", "--input", "/does/not/exist"],
                 ["verify", "--line", "20", "--n", "-3"],
                 []):
        code, rep, err = invoke(capsys, argv)
        assert code == EXIT_INPUT, argv
        assert rep is None
        assert err.strip().startswith("error:")


def test_profile_reports_constants(capsys):
    code, rep, _ = invoke(capsys, ["profile", "--cycle", "12"])
    assert code == EXIT_OK
    prof = rep["results"]["hyperbolicity"]
    assert prof["delta_thin"]["float"] == 3.0
    assert prof["delta_four_point"]["float"] == 3.0
    assert rep["results"]["thinness"]["passed"]
    # both constant regimes appear side by side in every report
    assert rep["constants"]["empirical"]["mode"] == "empirical"
    assert rep["constants"]["paper"]["mode"] == "paper"
    assert rep["params"]["active"]["mode"] == "empirical"


def test_profile_tree_reports_zero_delta(capsys):
    code, rep, _ = invoke(capsys, ["profile", "--tree", "3", "4"])
    assert code == EXIT_OK
    assert rep["results"]["hyperbolicity"]["delta_thin"]["float"] == 0.0
    assert rep["graph"]["vertices"] == 46


def test_norms_fast_config(capsys):
    code, rep, _ = invoke(capsys, ["norms", "--line", "12"] + FAST_NORMS)
    assert code in (EXIT_OK, EXIT_INCONCLUSIVE)
    v = rep["verdicts"]
    assert not v["failures"]
    assert (code == EXIT_INCONCLUSIVE) == bool(v["inconclusive"])
    assert rep["results"]["theta_certificates"][0]["within_analytic"]
    assert rep["results"]["sphere_certificates"][0]["within_ceiling"]
    assert rep["results"]["witness_schedule"][0]["within_ceiling"]
    assert rep["results"]["radial_positivity"][0]["passed"]


def test_norms_emits_csv_tables(capsys, tmp_path):
    out = tmp_path / "out"
    code, rep, _ = invoke(
        capsys, ["norms", "--line", "12", "--out", str(out)] + FAST_NORMS)
    assert code in (EXIT_OK, EXIT_INCONCLUSIVE)
    for name in ("report.json", "theta_vs_z.csv", "sphere_vs_n.csv",
                 "witness_schedule.csv", "phi_values.csv"):
        assert (out / name).exists(), name
    disk = json.loads((out / "report.json").read_text())
    assert disk["schema_version"] == rep["schema_version"]
    header = (out / "theta_vs_z.csv").read_text().splitlines()[0]
    assert header.split(",")[:3] == ["z_re", "z_im", "abs_z"]
    phis = (out / "phi_values.csv").read_text().splitlines()
    assert len(phis) == 1 + 13  # header plus one row per vertex


def test_edge_list_input(capsys, tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n2 3\n3 4\nbase 0\n")
    code, rep, _ = invoke(capsys, ["profile", "--input", str(p)])
    assert code == EXIT_OK
    assert rep["graph"]["vertices"] == 5


def _strip_timings(rep):
    rep = dict(rep)
    rep.pop("timings")
    return rep


def test_verify_determinism(capsys):
    runs = [invoke(capsys, ["verify", "--free-group", "2", "3", "--seed", "1"])
            for _ in range(2)]
    assert runs[0][0] == runs[1][0] == EXIT_OK
    a, b = (_strip_timings(r[1]) for r in runs)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_norms_determinism(capsys):
    argv = ["norms", "--line", "12", "--seed", "7"] + FAST_NORMS
    runs = [invoke(capsys, argv) for _ in range(2)]
    assert runs[0][0] == runs[1][0]
    a, b = (_strip_timings(r[1]) for r in runs)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_paper_mode_constants_in_report(capsys):
    code, rep, _ = invoke(
        capsys, ["verify", "--tree", "2", "5", "--mode", "paper"])
    assert code == EXIT_OK
    assert rep["params"]["active"]["mode"] == "paper"
    assert rep["params"]["active"]["r1"] == 402
    assert rep["constants"]["paper"]["R0"] == 201
    assert str(rep["constants"]["paper"]["C0"]).startswith("2^")
    assert rep["results"]["corridor_scan"]["paper_bound_ok"]


def test_config_echo_round_trip(capsys):
    code, rep, _ = invoke(
        capsys, ["norms", "--line", "12", "--z", "0.5,-0.25",
                 "--n", "0,2", "--schedule", "1", "--seed", "5"])
    cfg = rep["config"]
    assert cfg["mode"] == "empirical"
    assert cfg["z"] == [{"re": 0.5, "im": 0.0}, {"re": -0.25, "im": 0.0}]
    assert cfg["n"] == [0, 2]
    assert cfg["seed"] == 5
    assert cfg["provider"] == "line(12)"
