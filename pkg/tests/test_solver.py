import json
import math

import pytest

from kpell.cli import main
from kpell.errors import ParameterError
from kpell.lattice import build_dweger_lattice, gram_schmidt, distance_lower_bound, lll_reduce
from kpell.solver import (
    KNOWN_SOLUTIONS,
    PipelineConfig,
    RunReport,
    emit_report,
    load_config,
    run_tau1_reduction,
    run_tau1_sweep,
    run_theorem12_search,
    run_thm11_verification,
    tau1_naive_spec,
    tau1_spec,
    tau2_naive_spec,
    tau2_spec,
)


def test_config_validation():
    with pytest.raises(ParameterError):
        PipelineConfig(k_min=1)
    with pytest.raises(ParameterError):
        PipelineConfig(worker_count=0)


def test_search_desk_grid():
    rep = run_theorem12_search(PipelineConfig(k_max=100, n_max=300))
    assert rep.verdict
    assert {(r["k"], r["n"], r["value"]) for r in rep.records} == set(KNOWN_SOLUTIONS)


def test_search_small_grid_excludes_4116():
    rep = run_theorem12_search(PipelineConfig(k_max=5, n_max=9))
    assert rep.verdict and len(rep.records) == 3


def test_search_empty_grid():
    rep = run_theorem12_search(PipelineConfig(k_min=5, k_max=4))
    assert rep.verdict and rep.records == []
    assert json.loads(emit_report(rep))["records"] == []
    assert emit_report(rep, "csv") == ""


def test_search_records_carry_exponents():
    rep = run_theorem12_search(PipelineConfig(k_max=5, n_max=12))
    rec = next(r for r in rep.records if r["value"] == 4116)
    assert (rec["a"], rec["b"], rec["c"], rec["d"]) == (2, 1, 0, 3)


def test_checkpoint_resume(tmp_path):
    ckpt = tmp_path / "done.txt"
    cfg = PipelineConfig(k_max=8, n_max=40)
    run_theorem12_search(PipelineConfig(k_max=4, n_max=40), ckpt)
    first = ckpt.read_text().splitlines()
    assert [line.split()[0] for line in first] == ["2", "3", "4"]
    rep = run_theorem12_search(cfg, ckpt)
    lines = ckpt.read_text().splitlines()
    assert sorted(int(line.split()[0]) for line in lines) == list(range(2, 9))
    assert rep.verdict and len(rep.records) == 4


def test_parallel_matches_serial():
    a = run_theorem12_search(PipelineConfig(k_max=12, n_max=60))
    b = run_theorem12_search(PipelineConfig(k_max=12, n_max=60, worker_count=2))
    assert emit_report(a) == emit_report(b)


def test_reports_are_deterministic():
    cfg = PipelineConfig(k_min=3, k_max=4)
    assert emit_report(run_tau1_sweep(cfg)) == emit_report(run_tau1_sweep(cfg))


def test_big_integers_serialize_as_strings(tmp_path):
    rep = RunReport("x", {"big": 10**60, "small": 7})
    path = tmp_path / "r.json"
    emit_report(rep, "json", path)
    doc = json.loads(path.read_text())
    assert doc["inputs"] == {"big": str(10**60), "small": 7}
    assert "timing" not in doc


def test_emit_report_io_error(tmp_path):
    with pytest.raises(Exception, match="cannot write report"):
        emit_report(RunReport("x", {}), "json", tmp_path / "missing" / "r.json")


def test_tau1_single_k():
    out = run_tau1_reduction(3, PipelineConfig())
    assert out.ok and out.H_new <= 1500
    assert out.c2.lower() ** 2 >= out.T**2 + out.S
    with pytest.raises(ParameterError):
        run_tau1_reduction(2501, PipelineConfig())


def test_printed_tau1_lattice_sees_relation_for_k2():
    # log f_2(alpha) = -(3/2) log 2, so the homogeneous six-term lattice has a tiny vector
    spec = tau1_naive_spec(2, 10**25, 299)
    L, y = build_dweger_lattice(spec)
    R = lll_reduce(L)
    assert R.basis[0][:5] == (-3, 0, 0, 0, 0) or R.basis[0][:5] == (3, 0, 0, 0, 0)
    assert distance_lower_bound(R, gram_schmidt(R), y).c2.upper() < 10
    assert tau1_spec(2, 10**25, 299).dim == 5


def test_printed_tau2_lattice_sees_relation():
    # 10/(5 - sqrt5) = sqrt5 * phi
    spec = tau2_naive_spec(10**50, 300)
    L, y = build_dweger_lattice(spec)
    R = lll_reduce(L)
    assert sorted(abs(v) for v in R.basis[0][:5]) == [0, 0, 0, 1, 2]
    assert tau2_spec(10**50, 300).dim == 5


def test_thm11_small_grid():
    rep = run_thm11_verification(PipelineConfig(k_max=4, n_max=60, budget=200))
    assert rep.verdict and rep.outputs["checked"] == 3 * 57
    with pytest.raises(ParameterError):
        run_thm11_verification(PipelineConfig(n_max=3))


def test_load_config(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("# grid\nk-min = 3\nk_max=5\n\nn-max = 20\n")
    assert load_config(path) == {"k_min": "3", "k_max": "5", "n_max": "20"}
    path.write_text("oops\n")
    with pytest.raises(ParameterError):
        load_config(path)


def test_cli_search_and_exit_codes(tmp_path, capsys):
    assert main(["search", "--k-max", "5", "--n-max", "12"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "pass" and len(doc["records"]) == 4
    assert main(["search", "--k-min", "1"]) == 2
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("k-max = 3\nn-max = 8\nworkers = 1\n")
    out = tmp_path / "r.csv"
    assert main(["search", "--config", str(cfg), "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "a,b,c,d,k,n,value"
    cfg.write_text("colour = blue\n")
    assert main(["search", "--config", str(cfg)]) == 2


def test_cli_pell(capsys):
    assert main(["pell", "--k-min", "4", "--k-max", "4", "--format", "csv"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[-1] == "4,13,69156"


def test_cli_reports_assertion_failure(monkeypatch, capsys):
    import kpell.solver as solver

    monkeypatch.setattr(solver, "KNOWN_SOLUTIONS", frozenset())
    assert main(["search", "--k-max", "3", "--n-max", "8"]) == 1
