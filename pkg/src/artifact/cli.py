"""Command-line front end.

    artifact [--config FILE] [--out DIR] [--seed N] [--threads N] COMMAND [options]

Settings resolve as command-line flag > ``ARTIFACT_OUTPUT_DIR`` (output
directory only) > config file > built-in default. Exit status is 0 on
success, 1 on an operational error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import charts
from . import data as D
from . import ml
from . import portfolio as P
from . import tsmodels as T
from . import validation as V
from .errors import ArtifactError, ConfigError

logger = logging.getLogger("artifact")

OUTPUT_ENV = "ARTIFACT_OUTPUT_DIR"
COMMANDS = ("prepare", "decompose", "forecast", "walkforward", "train", "classify", "portfolio", "backtest", "report")
FORECAST_MODELS = ("ses", "holt", "hw_add", "hw_mul", "arima")
PORTFOLIO_KINDS = ("equal", "min_variance", "max_sharpe")


@dataclass
class RunConfig:
    data_dir: Path = Path(".")
    calendar: Path | None = None
    universe: dict = field(default_factory=dict)
    split_date: str = "2020-12-31"
    forecast_model: str = "ses"
    forecast_h: int = 30
    season_length: int = T.DEFAULT_SEASON_LENGTH
    wf_model: str = "ses"
    wf_mode: str = "sliding"
    wf_train: int = 1000
    wf_test: int = 1
    wf_step: int = 1
    regressor: str = "random_forest"
    classifier: str = "random_forest"
    portfolio_kind: str = "max_sharpe"
    budget: float = 100_000.0
    risk_free_rate: float = P.DEFAULT_RISK_FREE
    long_only: bool = True
    samples: int = P.DEFAULT_SAMPLES
    seed: int = P.DEFAULT_SEED
    threads: int = 1
    output_dir: Path = Path("out")

    @property
    def symbols(self) -> list[str]:
        return [s for group in self.universe.values() for s in group]

    def validate(self, command: str) -> None:
        if command == "prepare":
            if self.calendar is None or not self.calendar.is_file():
                raise ConfigError(f"calendar file not found: {self.calendar}")
            if not self.data_dir.is_dir():
                raise ConfigError(f"data directory not found: {self.data_dir}")
            missing = [s for s in self.symbols if not (self.data_dir / f"{s}.csv").is_file()]
            if missing:
                raise ConfigError(f"no CSV for symbols {missing} in {self.data_dir}")
        if not self.symbols:
            raise ConfigError("universe is empty; list tickers under [universe]")
        if self.forecast_model not in FORECAST_MODELS or self.wf_model not in FORECAST_MODELS:
            raise ConfigError(f"forecast model must be one of {FORECAST_MODELS}")
        if self.portfolio_kind not in PORTFOLIO_KINDS:
            raise ConfigError(f"portfolio kind must be one of {PORTFOLIO_KINDS}")
        if self.regressor not in ml.REGRESSORS:
            raise ConfigError(f"regressor must be one of {ml.REGRESSORS}")
        if self.classifier not in ml.CLASSIFIERS:
            raise ConfigError(f"classifier must be one of {ml.CLASSIFIERS}")
        if self.budget <= 0 or self.samples < 1 or self.threads < 1 or self.forecast_h < 1:
            raise ConfigError("budget, samples, threads and h must be positive")
        try:
            D.to_date(self.split_date)
        except ValueError:
            raise ConfigError(f"split_date {self.split_date!r} is not an ISO date") from None

    def to_dict(self) -> dict:
        doc = asdict(self)
        for key in ("data_dir", "calendar", "output_dir"):
            doc[key] = None if doc[key] is None else str(doc[key])
        return doc


_CONFIG_KEYS = {
    ("data", "split_date"): ("split_date", str),
    ("forecast", "model"): ("forecast_model", str),
    ("forecast", "h"): ("forecast_h", int),
    ("forecast", "season_length"): ("season_length", int),
    ("walkforward", "model"): ("wf_model", str),
    ("walkforward", "mode"): ("wf_mode", str),
    ("walkforward", "train"): ("wf_train", int),
    ("walkforward", "test"): ("wf_test", int),
    ("walkforward", "step"): ("wf_step", int),
    ("ml", "regressor"): ("regressor", str),
    ("ml", "classifier"): ("classifier", str),
    ("portfolio", "kind"): ("portfolio_kind", str),
    ("portfolio", "budget"): ("budget", float),
    ("portfolio", "risk_free_rate"): ("risk_free_rate", float),
    ("portfolio", "long_only"): ("long_only", "bool"),
    ("portfolio", "samples"): ("samples", int),
    ("run", "seed"): ("seed", int),
    ("run", "threads"): ("threads", int),
}


def load_config(path: Path | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.parent

    def resolve(value):
        p = Path(value).expanduser()
        return p if p.is_absolute() else base / p

    if parser.has_option("data", "dir"):
        cfg.data_dir = resolve(parser.get("data", "dir"))
    if parser.has_option("data", "calendar"):
        cfg.calendar = resolve(parser.get("data", "calendar"))
    if parser.has_option("run", "output_dir"):
        cfg.output_dir = resolve(parser.get("run", "output_dir"))
    if parser.has_section("universe"):
        cfg.universe = {
            sector: [t.strip() for t in tickers.split(",") if t.strip()]
            for sector, tickers in parser.items("universe")
        }
    for (section, option), (attr, kind) in _CONFIG_KEYS.items():
        if not parser.has_option(section, option):
            continue
        try:
            if kind == "bool":
                value = parser.getboolean(section, option)
            else:
                value = kind(parser.get(section, option))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {option}: {exc}") from None
        setattr(cfg, attr, value)
    return cfg


# --------------------------------------------------------------------------
# output helpers

def write_atomic(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv_rows(header, rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _num(v) -> str:
    v = float(v)
    return "" if not np.isfinite(v) else repr(v)


# --------------------------------------------------------------------------
# shared loading

def prepared_dir(cfg: RunConfig) -> Path:
    return cfg.output_dir / "prepared"


def load_prepared(cfg: RunConfig, symbol: str) -> D.PriceSeries:
    path = prepared_dir(cfg) / f"{symbol}.csv"
    if not path.is_file():
        raise ConfigError(f"{path} not found; run 'prepare' first")
    return D.load_csv(path, symbol=symbol)


def _split(cfg, series):
    return D.split_train_test(series, cfg.split_date)


def fan_out(cfg: RunConfig, symbols, task) -> int:
    """Run ``task(symbol)`` per symbol; return the worst exit status."""

    def guarded(sym):
        try:
            task(sym)
            return 0
        except ArtifactError as exc:
            logger.error("%s: %s", sym, exc)
            return 1

    if cfg.threads > 1 and len(symbols) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            statuses = list(pool.map(guarded, symbols))
    else:
        statuses = [guarded(s) for s in symbols]
    return max(statuses, default=0)


def forecaster(name: str, season_length: int):
    """Fit-and-forecast closure usable by walk_forward."""

    def run(train, h):
        if name == "ses":
            return T.ses_forecast(T.ses_fit(train), h)
        if name == "holt":
            return T.holt_forecast(T.holt_fit(train), h)
        if name in ("hw_add", "hw_mul"):
            kind = "additive" if name == "hw_add" else "multiplicative"
            return T.hw_forecast(T.hw_fit(train, season_length, kind), h)
        model = T.arima_auto_fit(train)
        return T.arima_forecast(model, train, h)

    return run


def fit_forecast_model(name: str, train, season_length: int):
    if name == "ses":
        return T.ses_fit(train)
    if name == "holt":
        return T.holt_fit(train)
    if name in ("hw_add", "hw_mul"):
        return T.hw_fit(train, season_length, "additive" if name == "hw_add" else "multiplicative")
    return T.arima_auto_fit(train)


def forecast_from(model, train, h):
    if isinstance(model, T.SesModel):
        return T.ses_forecast(model, h)
    if isinstance(model, T.HoltModel):
        return T.holt_forecast(model, h)
    if isinstance(model, T.HoltWintersModel):
        return T.hw_forecast(model, h)
    return T.arima_forecast(model, train, h)


# --------------------------------------------------------------------------
# commands

def cmd_prepare(cfg: RunConfig, args) -> int:
    calendar = D.load_calendar(cfg.calendar)
    out = prepared_dir(cfg)
    manifest = {}

    def task(sym):
        raw = D.load_csv(cfg.data_dir / f"{sym}.csv", symbol=sym)
        aligned = D.align_calendar(raw, calendar)
        text_path = out / f"{sym}.csv"
        out.mkdir(parents=True, exist_ok=True)
        tmp = text_path.with_suffix(".csv.tmp")
        D.write_csv(aligned, tmp)
        os.replace(tmp, text_path)
        manifest[sym] = {
            "rows": len(aligned),
            "raw_rows": len(raw),
            "filled": len(aligned) - int(np.isin(aligned.dates, raw.dates).sum()),
            "first": str(aligned.dates[0]),
            "last": str(aligned.dates[-1]),
        }

    status = fan_out(cfg, cfg.symbols, task)
    write_atomic(out / "manifest.json", _json({"calendar_days": len(calendar), "symbols": dict(sorted(manifest.items()))}))
    return status


def cmd_decompose(cfg: RunConfig, args) -> int:
    period = args.period or cfg.season_length

    def task(sym):
        series = load_prepared(cfg, sym)
        res = T.decompose(series, period)
        rows = [
            [str(d), _num(o), _num(t), _num(s), _num(r)]
            for d, o, t, s, r in zip(series.dates, res.observed, res.trend, res.seasonal, res.residual)
        ]
        write_atomic(cfg.output_dir / f"decompose_{sym}.csv", _csv_rows(["date", "observed", "trend", "seasonal", "residual"], rows))
        n_lags = min(args.lags, len(series) - 1)
        ret = D.returns(series).values
        acf_v, pacf_v = T.acf(ret, n_lags), T.pacf(ret, n_lags)
        write_atomic(
            cfg.output_dir / f"correlogram_{sym}.csv",
            _csv_rows(["lag", "acf", "pacf"], [[k, _num(a), _num(p)] for k, (a, p) in enumerate(zip(acf_v, pacf_v))]),
        )
        write_atomic(
            cfg.output_dir / f"decompose_{sym}.svg",
            charts.line_chart(
                {"observed": (series.dates, res.observed), "trend": (series.dates, res.trend)},
                f"Seasonal decomposition of {sym} (period {period})",
                "date",
                "close",
            ),
        )

    return fan_out(cfg, _targets(cfg, args), task)


def cmd_forecast(cfg: RunConfig, args) -> int:
    name = args.model or cfg.forecast_model
    h = args.h or cfg.forecast_h

    def task(sym):
        series = load_prepared(cfg, sym)
        train, test = _split(cfg, series)
        model = fit_forecast_model(name, train.close, cfg.season_length)
        fc = forecast_from(model, train.close, h)
        dates = list(test.dates[:h].astype(str)) + [""] * max(0, h - len(test))
        actual = list(test.close[:h]) + [np.nan] * max(0, h - len(test))
        rows = [[i + 1, dates[i], _num(fc[i]), _num(actual[i])] for i in range(h)]
        stem = f"forecast_{name}_{sym}"
        write_atomic(cfg.output_dir / f"{stem}.csv", _csv_rows(["step", "date", "forecast", "actual"], rows))
        write_atomic(cfg.output_dir / f"{stem}_model.json", T.dumps(model) + "\n")
        k = min(h, len(test))
        summary = {"symbol": sym, "model": name, "h": h, "train_end": str(train.dates[-1])}
        if k:
            summary["metrics"] = V.evaluate(fc[:k], test.close[:k]).to_dict()
        write_atomic(cfg.output_dir / f"{stem}.json", _json(summary))
        hist = train.take(slice(max(0, len(train) - 120), None))
        chart_series = {"train": (hist.dates, hist.close)}
        if k:
            chart_series["actual"] = (test.dates[:k], test.close[:k])
            chart_series["forecast"] = (test.dates[:k], fc[:k])
        write_atomic(cfg.output_dir / f"{stem}.svg", charts.line_chart(chart_series, f"{sym}: {name} forecast", "date", "close"))

    return fan_out(cfg, _targets(cfg, args), task)


def cmd_walkforward(cfg: RunConfig, args) -> int:
    name = args.model or cfg.wf_model
    spec = V.WindowSpec(
        args.mode or cfg.wf_mode,
        args.train or cfg.wf_train,
        args.test or cfg.wf_test,
        args.step or cfg.wf_step,
    )
    run = forecaster(name, cfg.season_length)

    def task(sym):
        series = load_prepared(cfg, sym)
        # evaluate over the test period: keep train_size bars of history before it
        cut = int(np.searchsorted(series.dates, D.to_date(cfg.split_date), side="right"))
        window = series.take(slice(max(0, cut - spec.train_size), None))
        folds = V.walk_forward(window, spec, run)
        stem = f"walkforward_{name}_{spec.mode}_{sym}"
        write_atomic(cfg.output_dir / f"{stem}.csv", V.folds_to_csv(folds))
        write_atomic(cfg.output_dir / f"{stem}.json", V.summary_json(folds, spec, symbol=sym, model=name) + "\n")
        pred = np.array([f.predictions[0] for f in folds])
        act = np.array([f.actuals[0] for f in folds])
        dates = np.array([f.test_range[0] for f in folds], dtype="datetime64[D]")
        write_atomic(
            cfg.output_dir / f"{stem}.svg",
            charts.line_chart({"actual": (dates, act), "prediction": (dates, pred)},
                              f"{sym}: {name} {spec.mode} walk-forward", "date", "close"),
        )

    return fan_out(cfg, _targets(cfg, args), task)


def _ml_split(cfg, sym, target):
    series = load_prepared(cfg, sym)
    fm = D.build_dataset(series, D.FeatureConfig(), target)
    split = D.to_date(cfg.split_date)
    is_train = fm.dates <= split
    if is_train.all() or not is_train.any():
        raise ConfigError(f"{sym}: split date {cfg.split_date} leaves an empty train or test set")
    train = ml.Dataset(fm.rows[is_train], fm.labels[is_train], fm.feature_names)
    test = ml.Dataset(fm.rows[~is_train], fm.labels[~is_train], fm.feature_names)
    return fm.dates[~is_train], train, test


def cmd_train(cfg: RunConfig, args) -> int:
    kind = args.kind or cfg.regressor

    def task(sym):
        dates, train, test = _ml_split(cfg, sym, "next_close")
        model = ml.fit_regressor(train, kind, seed=cfg.seed)
        pred = ml.predict_regressor(model, test.features)
        report = V.evaluate(pred, test.targets)
        stem = f"train_{kind}_{sym}"
        write_atomic(cfg.output_dir / f"{stem}.csv", _csv_rows(
            ["date", "prediction", "target"],
            [[str(d), _num(p), _num(t)] for d, p, t in zip(dates, pred, test.targets)],
        ))
        write_atomic(cfg.output_dir / f"{stem}.json", _json({
            "symbol": sym, "kind": kind, "seed": cfg.seed, "n_train": train.n, "n_test": test.n,
            "features": list(train.feature_names), "metrics": report.to_dict(),
        }))
        write_atomic(cfg.output_dir / f"{stem}_model.json", model.to_json() + "\n")
        write_atomic(cfg.output_dir / f"{stem}.svg", charts.line_chart(
            {"target": (dates, test.targets), "prediction": (dates, pred)},
            f"{sym}: {kind} next-day close", "date", "close"))

    return fan_out(cfg, _targets(cfg, args), task)


def cmd_classify(cfg: RunConfig, args) -> int:
    kind = args.kind or cfg.classifier

    def task(sym):
        dates, train, test = _ml_split(cfg, sym, "next_direction")
        model = ml.fit_classifier(train, kind, seed=cfg.seed)
        scores = ml.predict_proba(model, test.features)
        predicted = (scores >= 0.5).astype(int)
        curve = ml.roc_curve(scores, test.targets)
        stem = f"classify_{kind}_{sym}"
        write_atomic(cfg.output_dir / f"{stem}.csv", _csv_rows(
            ["date", "score", "prediction", "target"],
            [[str(d), _num(s), int(p), int(t)] for d, s, p, t in zip(dates, scores, predicted, test.targets)],
        ))
        write_atomic(cfg.output_dir / f"{stem}_roc.csv", ml.roc_to_csv(curve))
        write_atomic(cfg.output_dir / f"{stem}.json", _json({
            "symbol": sym, "kind": kind, "seed": cfg.seed, "n_train": train.n, "n_test": test.n,
            "auc": ml.auc(scores, test.targets),
            "accuracy": float(np.mean(predicted == test.targets)),
        }))
        write_atomic(cfg.output_dir / f"{stem}_model.json", model.to_json() + "\n")
        fpr = np.array([p.fpr for p in curve])
        tpr = np.array([p.tpr for p in curve])
        write_atomic(cfg.output_dir / f"{stem}_roc.svg", charts.line_chart(
            {"ROC": (fpr, tpr), "chance": (np.array([0.0, 1.0]), np.array([0.0, 1.0]))},
            f"{sym}: {kind} ROC", "false positive rate", "true positive rate"))

    return fan_out(cfg, _targets(cfg, args), task)


def _panels(cfg):
    series = [load_prepared(cfg, s) for s in cfg.symbols]
    pairs = [_split(cfg, s) for s in series]
    train = P.AssetPanel.from_series([a for a, _ in pairs])
    test = P.AssetPanel.from_series([b for _, b in pairs])
    return train, test


def build_weights(cfg: RunConfig, kind: str, stats: P.AssetStats) -> P.Weights:
    if kind == "equal":
        return P.equal_weight(stats.symbols)
    if kind == "min_variance":
        return P.min_variance(stats, cfg.long_only, cfg.samples, cfg.seed)
    return P.max_sharpe(stats, cfg.risk_free_rate, cfg.long_only, cfg.samples, cfg.seed)


def cmd_portfolio(cfg: RunConfig, args) -> int:
    kind = args.kind or cfg.portfolio_kind
    train, test = _panels(cfg)
    stats = P.compute_stats(train)
    weights = build_weights(cfg, kind, stats)
    alloc = P.allocate_shares(cfg.budget, weights, test.closes[0], weights.symbols)
    ret, vol = P.portfolio_stats(weights, stats)
    sharpe = P.sharpe_ratio(ret, cfg.risk_free_rate, vol) if vol > 0 else None
    frontier = P.monte_carlo_frontier(stats, cfg.samples, cfg.risk_free_rate, cfg.seed)

    write_atomic(cfg.output_dir / f"portfolio_{kind}.csv", P.allocation_to_csv(weights, alloc))
    write_atomic(cfg.output_dir / f"portfolio_{kind}.json", _json({
        "kind": kind,
        "seed": cfg.seed,
        "long_only": weights.long_only,
        "risk_free_rate": cfg.risk_free_rate,
        "buy_date": str(test.dates[0]),
        "budget": str(alloc.budget),
        "spent": str(alloc.spent),
        "residual_cash": str(alloc.residual_cash),
        "expected_return": ret,
        "volatility": vol,
        "sharpe": sharpe,
        "note": weights.note,
        "weights": dict(zip(weights.symbols, weights.values.tolist())),
        "stats": stats.to_dict(),
    }))
    write_atomic(cfg.output_dir / "frontier.csv", P.frontier_to_csv(frontier, stats.symbols))
    write_atomic(cfg.output_dir / f"frontier_{kind}.svg", charts.scatter_chart(
        frontier.volatilities, frontier.returns, "Monte Carlo portfolios", "annual volatility", "annual return",
        highlight={kind: (vol, ret)}))
    if alloc.empty:
        logger.error("budget %s buys no shares", cfg.budget)
        return 1
    return 0


def cmd_backtest(cfg: RunConfig, args) -> int:
    kind = args.kind or cfg.portfolio_kind
    path = cfg.output_dir / f"portfolio_{kind}.csv"
    if not path.is_file():
        raise ConfigError(f"{path} not found; run 'portfolio --kind {kind}' first")
    weights, alloc = P.read_allocation_csv(path.read_text(), cfg.budget)
    _, test = _panels(cfg)
    report = P.backtest(alloc, test)
    write_atomic(cfg.output_dir / f"backtest_{kind}.csv", P.backtest_to_csv(report))
    write_atomic(cfg.output_dir / f"backtest_{kind}.json", _json({"kind": kind, **report.summary()}))
    write_atomic(cfg.output_dir / f"backtest_{kind}.svg", charts.line_chart(
        {"portfolio value": (report.dates, report.values)}, f"{kind} portfolio, buy and hold", "date", "value"))
    return 0


def cmd_report(cfg: RunConfig, args) -> int:
    """Collect every JSON summary already in the output directory."""
    out = cfg.output_dir
    if not out.is_dir():
        raise ConfigError(f"output directory {out} does not exist")
    sections = {}
    for path in sorted(out.glob("*.json")):
        if path.name == "report.json" or path.name.endswith("_model.json"):
            continue
        sections[path.stem] = json.loads(path.read_text())
    write_atomic(out / "report.json", _json(sections))

    lines = ["# Run report", ""]
    for name, doc in sections.items():
        metrics = doc.get("metrics") or {}
        bits = []
        for key in ("rmse", "rmse_over_mean"):
            if metrics.get(key) is not None:
                bits.append(f"{key}={metrics[key]:.4g}")
        for key in ("auc", "accuracy", "expected_return", "volatility", "sharpe", "spent",
                    "total_return", "total_return_pct", "max_drawdown_pct"):
            if doc.get(key) is not None:
                v = doc[key]
                bits.append(f"{key}={v:.4g}" if isinstance(v, float) else f"{key}={v}")
        lines.append(f"- {name}: " + (", ".join(bits) if bits else "see JSON"))
    write_atomic(out / "report.md", "\n".join(lines) + "\n")
    return 0


HANDLERS = {
    "prepare": cmd_prepare,
    "decompose": cmd_decompose,
    "forecast": cmd_forecast,
    "walkforward": cmd_walkforward,
    "train": cmd_train,
    "classify": cmd_classify,
    "portfolio": cmd_portfolio,
    "backtest": cmd_backtest,
    "report": cmd_report,
}


def _targets(cfg, args):
    sym = getattr(args, "symbol", None)
    if sym is None:
        return cfg.symbols
    if sym not in cfg.symbols:
        raise ConfigError(f"symbol {sym!r} is not in the configured universe")
    return [sym]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description="stock forecasting and portfolio toolkit")
    parser.add_argument("--config", type=Path, help="INI config file")
    parser.add_argument("--out", type=Path, help=f"output directory (env {OUTPUT_ENV})")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("prepare", help="load CSVs, align to the calendar, write prepared data")

    p = sub.add_parser("decompose", help="seasonal decomposition and correlograms")
    p.add_argument("--symbol")
    p.add_argument("--period", type=int)
    p.add_argument("--lags", type=int, default=20)

    p = sub.add_parser("forecast", help="fit on the training split and forecast h steps")
    p.add_argument("--model", choices=FORECAST_MODELS)
    p.add_argument("--symbol")
    p.add_argument("--h", type=int)

    p = sub.add_parser("walkforward", help="walk-forward validation over the test period")
    p.add_argument("--model", choices=FORECAST_MODELS)
    p.add_argument("--mode", choices=("rolling", "sliding"))
    p.add_argument("--train", type=int)
    p.add_argument("--test", type=int)
    p.add_argument("--step", type=int)
    p.add_argument("--symbol")

    p = sub.add_parser("train", help="fit a regressor for next-day close")
    p.add_argument("--kind", choices=ml.REGRESSORS)
    p.add_argument("--symbol")

    p = sub.add_parser("classify", help="fit a classifier for next-day direction")
    p.add_argument("--kind", choices=ml.CLASSIFIERS)
    p.add_argument("--symbol")

    for name, text in (("portfolio", "build weights and allocate the budget"), ("backtest", "buy-and-hold backtest")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--kind", choices=PORTFOLIO_KINDS)
        if name == "portfolio":
            p.add_argument("--budget", type=float)
            p.add_argument("--risk-free-rate", type=float)
            p.add_argument("--samples", type=int)
            p.add_argument("--allow-short", action="store_true")

    sub.add_parser("report", help="aggregate existing JSON artifacts")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config)
    env_out = os.environ.get(OUTPUT_ENV)
    if env_out:
        cfg.output_dir = Path(env_out)
    overrides = {
        "output_dir": args.out,
        "seed": args.seed,
        "threads": args.threads,
        "budget": getattr(args, "budget", None),
        "risk_free_rate": getattr(args, "risk_free_rate", None),
        "samples": getattr(args, "samples", None),
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "allow_short", False):
        cfg.long_only = False
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        cfg.validate(args.command)
        return HANDLERS[args.command](cfg, args)
    except ArtifactError as exc:
        print(f"artifact {args.command}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"artifact {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
