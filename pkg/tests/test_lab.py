import copy
import json
from pathlib import Path

import pytest

from gblab.lab import (EXPERIMENTS, Quantity, Report, Table, ValidationError, default_lines,
                       emit_report, load_report, parse_scenario, partitions, report_json,
                       run_scenario)
from gblab.lab.cli import main

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"

CONIC = {"name": "conic", "experiment": "gauss_bonnet",
         "variety": {"ambient_dim": 2, "polynomial": "x0*x1 - x2^2"},
         "sampling": {"lines": 20000, "seed": 3}}
CUSP = {"name": "cusp", "experiment": "milnor_suite",
        "variety": {"ambient_dim": 2, "polynomial": "x2^2*x0 - x1^3",
                    "singular_points": [["1", "0", "0"]], "weights": [["1/3", "1/2"]]}}


def scenario(base, **changes):
    d = copy.deepcopy(base)
    for path, value in changes.items():
        node = d
        keys = path.split("__")
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = value
    return d


def problems(data):
    with pytest.raises(ValidationError) as exc:
        parse_scenario(data)
    return dict(exc.value.problems)


def test_valid_scenario_and_defaults():
    cfg = parse_scenario(CONIC)
    assert cfg.dim == 1 and cfg.lines == 20000 and cfg.sigma_level == 3.0
    assert default_lines(1) == 1_000_000 and default_lines(2) == 2_000_000
    assert parse_scenario(scenario(CONIC, sampling={})).lines == 1_000_000


def test_overrides_change_hash():
    a = parse_scenario(CONIC)
    b = parse_scenario(CONIC, lines=30000)
    assert a.content_hash() != b.content_hash()
    assert parse_scenario(CONIC).content_hash() == a.content_hash()


def test_validation_field_paths():
    assert "variety.polynomial" in problems(scenario(CONIC, variety__polynomial="x0*x1 - x2"))
    assert "experiment" in problems(scenario(CONIC, experiment="nope"))
    assert "sampling.lines" in problems(scenario(CONIC, sampling__lines=1))
    p = problems(scenario(CONIC, variety__singular_points=[["1", "0", "0"]]))
    assert "gradient does not vanish" in p["variety.singular_points[0]"]
    p = problems(scenario(CONIC, variety__singular_points=[["1", "1", "0"]]))
    assert "not on the hypersurface" in p["variety.singular_points[0]"]
    p = problems(scenario(CONIC, variety__singular_points=[["1/0", "0", "0"]]))
    assert "variety.singular_points[0][0]" in p


def test_tube_scan_requirements():
    p = problems(scenario(CONIC, experiment="tube_scan"))
    assert {"family", "variety.singular_points", "tube.epsilons"} <= set(p)


def test_partitions():
    assert partitions(1) == [(1,)]
    assert partitions(2) == [(2,), (1, 1)]
    assert sorted(partitions(3)) == sorted([(3,), (2, 1), (1, 1, 1)])


def test_quantity_pass_rule():
    q = Quantity("x", 2.1, 0.02, 2.0)
    assert q.z == pytest.approx(5.0) and not q.passed
    assert Quantity("x", 2.1, 0.02, 2.0, abs_tol=0.2).passed
    assert Quantity("x", 1.0).passed is None
    assert Quantity("x", 1.0).to_dict()["oracle"] == "no oracle"
    assert Quantity("x", 2.0 + 1e-15, 0.0, 2.0).passed


def test_report_json_roundtrip_and_csv():
    r = Report({"a": 1}, "h", 3, "tube_scan")
    r.add(Quantity("q", 1.0 / 3.0, 0.1, 0.3))
    r.tables.append(Table("scan", ("epsilon", "delta", "mean", "stderr", "lines", "resampled"),
                          [(0.5, 1e-4, -1.2, 0.01, 100, 0)]))
    d = load_report(report_json(r))
    assert set(d) >= {"scenario_hash", "seed", "quantities", "tables", "diagnostics"}
    assert d["quantities"][0]["mean"] == 0.333333333333
    assert set(d["quantities"][0]) >= {"name", "mean", "stderr", "exact", "z", "pass"}
    csv = emit_report(r, "csv")
    assert csv.splitlines()[0] == "epsilon,delta,mean,stderr,lines,resampled"
    assert csv.splitlines()[1] == "0.5,0.0001,-1.2,0.01,100,0"
    r.tables.clear()
    with pytest.raises(ValueError):
        emit_report(r, "csv")


def test_gauss_bonnet_conic_run():
    rep = run_scenario(parse_scenario(CONIC))
    q = rep.quantity("gauss_bonnet")
    assert q.exact == 2 and abs(q.mean - 2) < 0.05 and rep.passed
    assert rep.diagnostics["resample_rate"] < 1e-3


def test_reports_byte_identical_and_worker_independent(tmp_path):
    cfg = parse_scenario(CONIC)
    a = report_json(run_scenario(cfg, workers=1))
    b = report_json(run_scenario(cfg, workers=1))
    c = report_json(run_scenario(cfg, workers=4))
    assert a == b == c


def test_milnor_suite_cusp_record():
    rep = run_scenario(parse_scenario(CUSP))
    row = rep.tables[0].rows[0]
    assert row[1:] == [2, 1, 2, 2, -1]     # mu, mu_section, m, eu, sigma
    assert rep.passed


def test_chern_numbers_marks_missing_oracles():
    data = {"experiment": "chern_numbers",
            "variety": {"ambient_dim": 3, "polynomial": "x0*x1 - x2^2",
                        "singular_points": [["0", "0", "0", "1"]]},
            "sampling": {"lines": 8192, "seed": 1}}
    rep = run_scenario(parse_scenario(data))
    oracles = {q.name: q.to_dict()["oracle"] for q in rep.quantities}
    assert oracles == {"c2": "exact", "c1^c1": "no oracle"}


def test_experiment_failure_keeps_partial_results():
    data = scenario(CONIC, experiment="sections_involution")
    data["variety"]["polynomial"] = "x2^2*x0 - x1^2*(x1 + x0)"    # node left undeclared
    cfg = parse_scenario(data)
    rep = run_scenario(cfg)
    assert rep.error is not None and not rep.passed


def test_cli_commands(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(CONIC))
    assert main(["list-experiments"]) == 0
    assert set(EXPERIMENTS) <= set(capsys.readouterr().out.split())
    assert main(["validate", str(path)]) == 0
    out = tmp_path / "r.json"
    assert main(["run", str(path), "--lines", "10000", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["seed"] == 3
    assert main(["run", str(path), "--lines", "10000", "--format", "csv"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(scenario(CONIC, variety__singular_points=[["1", "0", "0"]])))
    assert main(["validate", str(bad)]) == 2
    assert "variety.singular_points[0]" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{")
    assert main(["validate", str(tmp_path / "broken.json")]) == 2


def test_cli_failure_exit_code(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(scenario(CONIC, tolerances={"sigma_level": 0.0})))
    assert main(["run", str(path), "--lines", "4096"]) == 1


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_scenarios_validate(path):
    assert main(["validate", str(path)]) == 0
