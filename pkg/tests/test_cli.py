import csv
import json

import pytest

from artifact import cli, sample


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("sample")
    sample.generate(root)
    assert cli.main(["--config", str(root / "config.ini"), "prepare"]) == 0
    return root


def run(root, *args):
    return cli.main(["--config", str(root / "config.ini"), *args])


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_prepare_aligns_every_symbol(workspace):
    manifest = json.loads((workspace / "out" / "prepared" / "manifest.json").read_text())
    assert set(manifest["symbols"]) == set(sample.UNIVERSE["metals"] + sample.UNIVERSE["autos"])
    assert all(m["rows"] == manifest["calendar_days"] for m in manifest["symbols"].values())
    assert all(m["filled"] > 0 for m in manifest["symbols"].values())


def test_forecast_writes_h_rows(workspace):
    assert run(workspace, "forecast", "--model", "ses", "--symbol", "MTLA", "--h", "30") == 0
    out = workspace / "out"
    table = rows(out / "forecast_ses_MTLA.csv")
    assert len(table) == 30
    assert len({r["forecast"] for r in table}) == 1
    assert (out / "forecast_ses_MTLA.svg").read_text().startswith("<svg")


def test_walkforward_report(workspace):
    assert run(workspace, "walkforward", "--mode", "sliding", "--train", "1000", "--test", "1", "--symbol", "AUTA") == 0
    doc = json.loads((workspace / "out" / "walkforward_ses_sliding_AUTA.json").read_text())
    assert doc["window"] == {"mode": "sliding", "train_size": 1000, "test_size": 1, "step": 1}
    assert doc["metrics"]["rmse_over_mean"] > 0
    folds = rows(workspace / "out" / "walkforward_ses_sliding_AUTA.csv")
    assert len(folds) == doc["n_folds"]
    assert folds[0]["test_start"].startswith("2021-")


def test_portfolio_is_deterministic(workspace, tmp_path):
    args = ["portfolio", "--kind", "max_sharpe", "--budget", "100000"]
    assert cli.main(["--config", str(workspace / "config.ini"), "--seed", "42", "--out", str(tmp_path / "a"), *args]) == 1
    # a fresh output directory has no prepared data; copy it over and retry
    for name in ("a", "b"):
        (tmp_path / name / "prepared").mkdir(parents=True, exist_ok=True)
        for f in (workspace / "out" / "prepared").iterdir():
            (tmp_path / name / "prepared" / f.name).write_bytes(f.read_bytes())
        assert cli.main(["--config", str(workspace / "config.ini"), "--seed", "42", "--out", str(tmp_path / name), *args]) == 0
    a = (tmp_path / "a" / "portfolio_max_sharpe.csv").read_bytes()
    assert a == (tmp_path / "b" / "portfolio_max_sharpe.csv").read_bytes()
    table = rows(tmp_path / "a" / "portfolio_max_sharpe.csv")
    assert sum(float(r["weight"]) for r in table) == pytest.approx(1.0)


def test_backtest_and_report(workspace):
    assert run(workspace, "portfolio", "--kind", "equal") == 0
    assert run(workspace, "backtest", "--kind", "equal") == 0
    doc = json.loads((workspace / "out" / "backtest_equal.json").read_text())
    assert doc["n_days"] > 200
    assert run(workspace, "report") == 0
    report = json.loads((workspace / "out" / "report.json").read_text())
    assert "backtest_equal" in report and "portfolio_equal" in report


def test_train_and_classify(workspace):
    assert run(workspace, "train", "--kind", "ols", "--symbol", "MTLB") == 0
    assert run(workspace, "classify", "--kind", "logistic", "--symbol", "MTLB") == 0
    doc = json.loads((workspace / "out" / "classify_logistic_MTLB.json").read_text())
    assert 0.0 <= doc["auc"] <= 1.0
    assert run(workspace, "decompose", "--symbol", "MTLB") == 0


def test_exit_codes(workspace, tmp_path):
    with pytest.raises(SystemExit) as err:
        cli.main(["frobnicate"])
    assert err.value.code == 2
    assert cli.main(["--config", str(tmp_path / "missing.ini"), "prepare"]) == 1
    assert run(workspace, "forecast", "--symbol", "NOPE") == 1
    assert cli.main(["--config", str(workspace / "config.ini"), "--out", str(tmp_path / "empty"), "forecast"]) == 1


def test_output_precedence(workspace, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "env"))
    args = cli.build_parser().parse_args(["--config", str(workspace / "config.ini"), "report"])
    assert cli.resolve_config(args).output_dir == tmp_path / "env"
    args = cli.build_parser().parse_args(["--config", str(workspace / "config.ini"), "--out", str(tmp_path / "flag"), "report"])
    assert cli.resolve_config(args).output_dir == tmp_path / "flag"
    monkeypatch.delenv(cli.OUTPUT_ENV)
    args = cli.build_parser().parse_args(["--config", str(workspace / "config.ini"), "report"])
    assert cli.resolve_config(args).output_dir == workspace / "out"


def test_bad_config_value(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[universe]\nx = A\n[portfolio]\nkind = max_return\n")
    assert cli.main(["--config", str(cfg), "report"]) == 1
    cfg.write_text("[run]\nseed = abc\n")
    assert cli.main(["--config", str(cfg), "report"]) == 1
