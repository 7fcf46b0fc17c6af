import json

import numpy as np
import pytest

from cachesec.cli import (ConfigError, Scenario, load_scenario, main,
                          parse_scenario_text, sweep_values)


def run(tmp_path, command, config_text=None, extra=None, name="out.csv"):
    args = [command]
    if config_text is not None:
        cfg = tmp_path / "scenario.cfg"
        cfg.write_text(config_text)
        args += ["--config", str(cfg)]
    out = tmp_path / name
    args += ["--out", str(out)]
    args += extra or []
    code = main(args)
    return code, out


def read_rows(path):
    lines = [ln for ln in path.read_text().splitlines()
             if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


SMALL_SWEEP = "sweep_start = 0\nsweep_stop = 10\nsweep_step = 5\n"


def test_scenario_parsing_flat_and_json():
    flat = parse_scenario_text("K = 4\nPs_dBw = 12.5  # comment\n")
    assert flat.K == 4 and flat.Ps_dBw == 12.5
    as_json = parse_scenario_text(json.dumps({"K": 4, "Ps_dBw": 12.5}))
    assert as_json == flat


def test_scenario_unknown_key_is_error():
    with pytest.raises(ConfigError):
        parse_scenario_text("K = 4\nbogus = 1\n")
    with pytest.raises(ConfigError):
        parse_scenario_text(json.dumps({"bogus": 1}))


def test_scenario_value_errors():
    with pytest.raises(ConfigError):
        parse_scenario_text("K = four\n")
    with pytest.raises(ConfigError):
        parse_scenario_text("just text\n")
    with pytest.raises(ConfigError):
        parse_scenario_text("M = 99\nL = 10\n")
    with pytest.raises(ConfigError):
        parse_scenario_text("sweep_var = alpha\n")


def test_load_scenario_missing_file():
    with pytest.raises(ConfigError):
        load_scenario("/nonexistent/path.cfg")


def test_sweep_values_inclusive_endpoint():
    scn = Scenario(sweep_start=0.0, sweep_stop=30.0, sweep_step=5.0)
    assert sweep_values(scn) == [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    scn_n = Scenario(sweep_var="N", sweep_start=10, sweep_stop=30,
                     sweep_step=10)
    assert sweep_values(scn_n) == [10, 20, 30]


def test_cop_sweep_table_shape_and_probabilities(tmp_path):
    code, out = run(tmp_path, "cop-sweep", SMALL_SWEEP,
                    extra=["--trials", "2000"])
    assert code == 0
    header, rows = read_rows(out)
    assert header == ["Ps_dBw", "scheme", "analytic", "mc", "mc_stderr"]
    assert len(rows) == 3 * 4  # three powers, three schemes plus asymptote
    for row in rows:
        assert 0.0 <= float(row[2]) <= 1.0
        if row[3]:
            assert 0.0 <= float(row[3]) <= 1.0


def test_cop_sweep_analytic_only_when_trials_zero(tmp_path):
    code, out = run(tmp_path, "cop-sweep", SMALL_SWEEP,
                    extra=["--trials", "0"])
    assert code == 0
    _, rows = read_rows(out)
    assert all(row[3] == "" and row[4] == "" for row in rows)


def test_cop_sweep_monotone_and_ordered(tmp_path):
    code, out = run(tmp_path, "cop-sweep",
                    "sweep_start = 0\nsweep_stop = 30\nsweep_step = 5\n",
                    extra=["--trials", "0"])
    assert code == 0
    _, rows = read_rows(out)
    by_scheme = {}
    for row in rows:
        by_scheme.setdefault(row[1], []).append(float(row[2]))
    for name, vals in by_scheme.items():
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:])), name
    for d, b, f in zip(by_scheme["dbf"], by_scheme["bsr"], by_scheme["fot"]):
        assert d <= b + 1e-9 <= f + 2e-9


def test_byte_identical_reruns(tmp_path):
    for command, cfg in [
            ("cop-sweep", SMALL_SWEEP),
            ("sop-sweep", SMALL_SWEEP),
            ("throughput", SMALL_SWEEP + "lambda_e = 0.01\n"),
            ("caching",
             "sweep_var = N\nsweep_start = 60\nsweep_stop = 120\n"
             "sweep_step = 30\nlambda_e = 0.002\nPm_dBw = 40\n"),
            ("validate", SMALL_SWEEP)]:
        code1, out1 = run(tmp_path, command, cfg, ["--trials", "400"],
                          name=f"{command}-1.csv")
        code2, out2 = run(tmp_path, command, cfg, ["--trials", "400"],
                          name=f"{command}-2.csv")
        assert code1 == code2 == 0
        assert out1.read_bytes() == out2.read_bytes(), command


def test_threads_do_not_change_output(tmp_path):
    cfg = SMALL_SWEEP
    _, serial = run(tmp_path, "cop-sweep", cfg, ["--trials", "1000"],
                    name="serial.csv")
    _, pooled = run(tmp_path, "cop-sweep", cfg,
                    ["--trials", "1000", "--threads", "4"], name="pool.csv")
    body = lambda p: [ln for ln in p.read_text().splitlines()
                      if not ln.startswith("# scenario: threads")]
    assert body(serial) == body(pooled)


def test_sop_sweep_includes_both_relay_forms(tmp_path):
    code, out = run(tmp_path, "sop-sweep", SMALL_SWEEP,
                    extra=["--trials", "500"])
    assert code == 0
    _, rows = read_rows(out)
    schemes = {row[1] for row in rows}
    assert schemes == {"dbf", "fot", "bsr-exact", "bsr-approx"}
    by_scheme = {}
    for row in rows:
        by_scheme.setdefault(row[1], []).append(float(row[2]))
    for vals in by_scheme.values():
        assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))
    for d, f in zip(by_scheme["dbf"], by_scheme["fot"]):
        assert d <= f + 1e-9


def test_sop_sweep_zero_density_all_zero(tmp_path):
    code, out = run(tmp_path, "sop-sweep", SMALL_SWEEP + "lambda_e = 0\n",
                    extra=["--trials", "200"])
    assert code == 0
    _, rows = read_rows(out)
    assert all(float(row[2]) == 0.0 and float(row[3]) == 0.0 for row in rows)


def test_throughput_rs_sweep_unimodal(tmp_path):
    cfg = ("sweep_var = Rs\nsweep_start = 0.25\nsweep_stop = 8\n"
           "sweep_step = 0.25\nK = 2\nPm_dBw = 10\nPs_dBw = 10\n"
           "lambda_e = 0.01\nepsilon = 0.3\n")
    code, out = run(tmp_path, "throughput", cfg)
    assert code == 0
    _, rows = read_rows(out)
    by_scheme = {}
    for row in rows:
        by_scheme.setdefault(row[1], []).append(float(row[2]))
    for name, vals in by_scheme.items():
        arr = np.array(vals)
        assert (arr >= -1e-15).all()
        diffs = np.diff(arr)
        signs = np.sign(diffs[np.abs(diffs) > 1e-13])
        flips = int(np.sum(signs[:-1] != signs[1:]))
        assert flips <= 1, name


def test_throughput_exact_relay_sop_model(tmp_path):
    base = ("sweep_start = 10\nsweep_stop = 10\nsweep_step = 5\nK = 2\n"
            "Pm_dBw = 10\nlambda_e = 0.01\nepsilon = 0.3\n")
    _, approx = run(tmp_path, "throughput", base, name="approx.csv")
    _, exact = run(tmp_path, "throughput", base + "bsr_sop_model = exact\n",
                   name="exact.csv")
    header, rows_a = read_rows(approx)
    _, rows_e = read_rows(exact)
    psi = header.index("psi_star")
    bsr_a = next(float(r[psi]) for r in rows_a if r[1] == "bsr")
    bsr_e = next(float(r[psi]) for r in rows_e if r[1] == "bsr")
    assert bsr_a > 0.0 and bsr_e > 0.0
    assert bsr_a != bsr_e  # the two SOP forms price redundancy differently


def test_throughput_ps_sweep_monotone(tmp_path):
    cfg = ("sweep_start = 0\nsweep_stop = 30\nsweep_step = 10\nK = 3\n"
           "Pm_dBw = 40\nlambda_e = 0.01\nepsilon = 0.3\n")
    code, out = run(tmp_path, "throughput", cfg)
    assert code == 0
    header, rows = read_rows(out)
    assert header[-1] == "psi_star"
    by_scheme = {}
    for row in rows:
        by_scheme.setdefault(row[1], []).append(float(row[-1]))
    for name, vals in by_scheme.items():
        assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:])), name


def test_caching_sweep_hybrid_dominates(tmp_path):
    cfg = ("sweep_var = N\nsweep_start = 40\nsweep_stop = 160\n"
           "sweep_step = 40\nK = 3\nPm_dBw = 60\nPs_dBw = 25\n"
           "lambda_e = 0.002\nepsilon = 0.2\nL = 10\ntau = 1.2\n")
    code, out = run(tmp_path, "caching", cfg)
    assert code == 0
    header, rows = read_rows(out)
    for row in rows:
        hybrid, mpc, lcd = (float(row[header.index(c)])
                            for c in ("obj_hybrid", "obj_mpc", "obj_lcd"))
        assert hybrid >= mpc - 1e-12
        assert hybrid >= lcd - 1e-12
        m_closed = int(row[header.index("M_closed")])
        m_ex = int(row[header.index("M_exhaustive")])
        assert abs(m_closed - m_ex) <= 1


def test_caching_sweep_see_objective(tmp_path):
    cfg = ("sweep_start = 5\nsweep_stop = 15\nsweep_step = 5\nK = 3\n"
           "Pm_dBw = 30\nlambda_e = 0.01\nepsilon = 0.3\nL = 10\n"
           "N = 100\ntau = 1.5\ncaching_objective = see\n")
    code, out = run(tmp_path, "caching", cfg)
    assert code == 0
    header, rows = read_rows(out)
    for row in rows:
        hybrid, mpc, lcd = (float(row[header.index(c)])
                            for c in ("obj_hybrid", "obj_mpc", "obj_lcd"))
        assert hybrid >= mpc - 1e-12
        assert hybrid >= lcd - 1e-12


def test_validate_command_flags_cells(tmp_path):
    code, out = run(tmp_path, "validate", SMALL_SWEEP,
                    extra=["--trials", "20000"])
    assert code == 0
    header, rows = read_rows(out)
    assert header[-1] == "within_3sigma"
    flags = [int(row[-1]) for row in rows]
    assert sum(flags) >= 0.95 * len(flags)


def test_exit_code_2_for_config_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no_such_key = 1\n")
    assert main(["cop-sweep", "--config", str(cfg)]) == 2


def test_exit_code_3_for_infeasible_epsilon(tmp_path):
    cfg = tmp_path / "eps.cfg"
    cfg.write_text("epsilon = 1.5\n" + SMALL_SWEEP)
    out = tmp_path / "x.csv"
    assert main(["throughput", "--config", str(cfg), "--out", str(out)]) == 3


def test_stdout_output(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(SMALL_SWEEP)
    assert main(["cop-sweep", "--config", str(cfg), "--trials", "0"]) == 0
    captured = capsys.readouterr()
    assert "Ps_dBw,scheme,analytic" in captured.out
