import json
import math

import numpy as np
import pytest

from nodal_lab.errors import ConfigurationError, DataError
from nodal_lab.harness import report as rp
from nodal_lab.harness.config import ExperimentConfig, load_config_file, parse_config_text
from nodal_lab.harness.experiments import REGISTRY, bhy_moment_gap, gaussian_square_moment
from nodal_lab.harness.runner import build_config, recompute, run_experiment
from nodal_lab._rng import trial_seed

EXPECTED = {
    "verify-bulk-balance", "two-domains", "verify-edge-balance", "bhy-moments", "typicality",
    "level-repulsion", "detection-consistency", "sticking", "wgw", "sign-probability",
    "signpoly-report", "green-comparison", "interpolation-sweep",
}


def test_registry_names():
    assert EXPECTED <= set(REGISTRY)


@pytest.mark.parametrize("bad", [
    {"trials": 0}, {"bulk_fraction": 0.5}, {"bulk_fraction": 0.0}, {"p": 1.0},
    {"n": 1}, {"n": 5000}, {"workers": 0}, {"master_seed": -1}, {"master_seed": 2**64},
])
def test_config_validation(bad):
    with pytest.raises(ConfigurationError):
        ExperimentConfig(**{"experiment": "two-domains", "n": 100, **bad})


def test_build_config_errors():
    with pytest.raises(ConfigurationError):
        build_config("no-such-experiment")
    with pytest.raises(ConfigurationError):
        build_config("two-domains", params={"bogus": 1})
    with pytest.raises(ConfigurationError):
        build_config("two-domains", thresholds={"bogus": 1})


def test_thresholds_come_from_config():
    cfg = build_config("two-domains", n=60, thresholds={"two_domains_freq": 0.5})
    assert cfg.thresholds["two_domains_freq"] == 0.5
    assert cfg.thresholds["zero_free_freq"] == REGISTRY["two-domains"].thresholds["zero_free_freq"]


def test_text_round_trip(tmp_path):
    cfg = build_config("two-domains", n=80, trials=3, master_seed=2**63 + 5,
                       thresholds={"balanced_freq": 0.9}, params={"indices_per_trial": 4})
    path = tmp_path / "cfg.txt"
    path.write_text("# comment\n\n" + cfg.to_text())
    d = load_config_file(path)
    assert ExperimentConfig.from_dict(d) == cfg


def test_config_text_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        parse_config_text("no equals sign")
    with pytest.raises(ConfigurationError):
        parse_config_text("other.key = 1")
    with pytest.raises(DataError):
        load_config_file(tmp_path / "absent.txt")
    assert parse_config_text("params.name = hello")["params"]["name"] == "hello"


def test_trial_seeds_are_distinct():
    seeds = {trial_seed(7, t) for t in range(2000)}
    assert len(seeds) == 2000
    assert trial_seed(7, 3) == trial_seed(7, 3)
    assert trial_seed(7, 3) != trial_seed(8, 3)


def test_clean_restore():
    v = {"a": np.float64(math.inf), "b": [np.int64(3), np.bool_(True), -math.inf], "c": math.nan}
    c = rp.clean(v)
    json.dumps(c)
    assert c == {"a": "inf", "b": [3, True, "-inf"], "c": "nan"}
    back = rp.restore(c)
    assert back["a"] == math.inf and back["b"][2] == -math.inf and math.isnan(back["c"])


def test_check_semantics():
    assert rp.Check("x", 0.1, 0.2, "<=").passed
    assert not rp.Check("x", 0.3, 0.2, "<=").passed
    assert rp.Check("x", 0.3, 0.2, ">=").passed
    assert not rp.Check("x", math.nan, 0.2, ">=").passed


def test_frequency_and_describe():
    f = rp.frequency([True, False, True, True])
    assert f["value"] == 0.75 and f["count"] == 4
    assert f["se"] == pytest.approx(math.sqrt(0.75 * 0.25 / 4))
    assert rp.frequency([])["count"] == 0
    d = rp.describe([1.0, 2.0, math.inf, 3.0])
    assert d["count"] == 3 and d["mean"] == 2.0 and d["max"] == 3.0


def test_empty_report_csv_is_header_only():
    r = rp.StatReport("x", {}, ["trial", "seed", "value"], [])
    assert r.to_csv() == "trial,seed,value\n"
    assert r.to_long_csv() == "trial,seed,row,metric,value\n"


def test_emit_unknown_format(tmp_path):
    r = rp.StatReport("x", {}, ["trial"], [])
    with pytest.raises(DataError):
        rp.emit(r, tmp_path, "xml")


def test_report_schema_check():
    r = rp.StatReport("x", {}, ["trial"], [])
    d = json.loads(r.to_json())
    d["schema_version"] = 99
    with pytest.raises(DataError):
        rp.StatReport.from_json(json.dumps(d))


@pytest.fixture(scope="module")
def small_report():
    cfg = build_config("detection-consistency", n=12, trials=6, master_seed=11)
    return cfg, run_experiment(cfg)


def test_small_run_passes(small_report):
    _, rep = small_report
    assert rep.passed
    assert [r["trial"] for r in rep.rows] == list(range(6))
    assert all(r["seed"] == trial_seed(11, r["trial"]) for r in rep.rows)


def test_aggregates_recompute_exactly(small_report):
    _, rep = small_report
    agg, checks = recompute(rep)
    assert rp.clean(agg) == rp.clean(rep.aggregates)
    assert [c.to_dict() for c in checks] == [c.to_dict() for c in rep.checks]


def test_json_round_trip_reproduces_aggregates(small_report):
    _, rep = small_report
    back = rp.StatReport.from_json(rep.to_json())
    assert back.rows == rp.restore(rp.clean(rep.rows))
    agg, _ = recompute(back)
    assert rp.clean(agg) == rp.clean(rep.aggregates)
    assert back.to_json() == rep.to_json()


def test_rerun_is_byte_identical(small_report):
    cfg, rep = small_report
    again = run_experiment(cfg)
    assert again.to_json(include_wall_time=False) == rep.to_json(include_wall_time=False)


def test_worker_count_does_not_change_rows():
    cfg = build_config("two-domains", n=60, trials=4, master_seed=3, params={"indices_per_trial": 3})
    one = run_experiment(cfg)
    two = run_experiment(cfg.with_updates(workers=2))
    assert one.to_csv() == two.to_csv()
    assert one.to_long_csv() == two.to_long_csv()
    assert rp.clean(one.aggregates) == rp.clean(two.aggregates)


def test_emit_writes_files(tmp_path, small_report):
    _, rep = small_report
    paths = rp.emit(rep, tmp_path / "out", "both")
    names = sorted(p.name for p in paths)
    assert names == ["detection-consistency.csv", "detection-consistency.json", "detection-consistency.long.csv"]
    header = (tmp_path / "out" / "detection-consistency.csv").read_text().splitlines()[0].split(",")
    assert header[:2] == ["trial", "seed"]
    assert len((tmp_path / "out" / "detection-consistency.csv").read_text().splitlines()) == 7
    assert json.loads((tmp_path / "out" / "detection-consistency.json").read_text())["schema_version"] == 1
    only = rp.emit(rep, tmp_path / "j", "json")
    assert [p.name for p in only] == ["detection-consistency.json"]


def test_emit_reports_path_on_failure(tmp_path, small_report):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(DataError, match="file"):
        rp.emit(small_report[1], blocker / "sub", "csv")


def test_size_cap():
    capped = [e for e in REGISTRY.values() if e.max_n is not None]
    for exp in capped:
        with pytest.raises(ConfigurationError):
            build_config(exp.name, n=exp.max_n + 1)


def test_gaussian_square_moments():
    assert [gaussian_square_moment(k) for k in range(4)] == [1, 1, 3, 15]


def test_bhy_constant_gap_is_zero():
    rows = [{"x": float(x)} for x in np.random.default_rng(0).chisquare(1, 50)]
    assert bhy_moment_gap(rows, [2.5])["gap"] == 0.0
    rows = [{**r, "m1": 1.0, "m2": 3.0, "m3": 15.0} for r in rows]
    assert bhy_moment_gap(rows, [2.5])["gap"] == 0.0
    assert bhy_moment_gap(rows, [1, -2, 0.5, 0.1])["gap"] == pytest.approx(0.0, abs=1e-12)


def test_bhy_rejects_non_orthogonal_direction():
    cfg = build_config("bhy-moments", n=20, trials=1, params={"q": [1.0] + [0.0] * 19})
    with pytest.raises(ConfigurationError):
        run_experiment(cfg)


def test_bhy_small_run_uses_pair_average():
    rep = run_experiment(build_config("bhy-moments", n=200, trials=4, master_seed=1))
    assert all("m2" in r for r in rep.rows)
    assert rep.aggregates["second_moment"]["se"] < 1.0
