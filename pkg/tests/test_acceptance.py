"""Acceptance checks, one test per criterion.

Each test prints a single ``[AC-nn] PASS|FAIL`` line with the measured
quantities, then asserts at the stated tolerance.
"""

import filecmp
import time
from decimal import Decimal
from pathlib import Path

import numpy as np
import pytest
from scipy.signal import lfilter

from artifact import cli, ml, sample
from artifact import portfolio as P
from artifact import tsmodels as T
from artifact import validation as V
from artifact.tsmodels.smoothing import holt_one_step, ses_one_step


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[AC-{number:02d}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, f"acceptance criterion {number} failed: {detail}"

    return emit


def test_ac01_ses_oracle(verdict):
    t0 = time.perf_counter()
    worst, grid_ok = 0.0, True
    for seed in range(100):
        y = np.cumsum(np.random.default_rng(seed).normal(size=100)) + 50
        model = T.ses_fit(y)
        f = [y[0]]
        for v in y:
            f.append(model.alpha * v + (1 - model.alpha) * f[-1])
        worst = max(worst, float(np.max(np.abs(ses_one_step(y, model.alpha) - f))))
        worst = max(worst, abs(model.last_forecast - f[-1]))
        for a in T.DEFAULT_GRID:
            fa = ses_one_step(y, a)
            grid_ok &= model.mse <= np.mean((y[1:] - fa[1:-1]) ** 2) + 1e-12
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and grid_ok and elapsed < 5
    verdict(1, "SES oracle equivalence", ok, f"max |diff| {worst:.2e}, grid-optimal {grid_ok}, {elapsed:.2f}s")


def test_ac02_holt_exactness(verdict):
    n = 50
    t = np.arange(1, n + 1)
    y = 2.0 + 3.0 * t
    model = T.holt_fit(y)
    one_step = holt_one_step(y, model.alpha, model.beta)  # forecasts for t = 2..n
    err = float(np.max(np.abs(one_step - y[1:])))
    h = np.arange(1, 21)
    fc_err = float(np.max(np.abs(T.holt_forecast(model, 20) - (2 + 3 * (n + h)))))
    verdict(2, "Holt exactness", err < 1e-9 and fc_err < 1e-6, f"one-step {err:.2e}, h-step {fc_err:.2e}")


def test_ac03_holt_winters_exactness(verdict):
    m, n = 4, 40
    t = np.arange(1, n + 9)
    s = np.array([1.0, -1.0, 2.0, -2.0])
    f = np.array([1.1, 0.9, 1.2, 0.8])
    cases = {"additive": 10 + t + s[t % m], "multiplicative": (10 + t) * f[t % m]}
    errors = {}
    for kind, y in cases.items():
        model = T.hw_fit(y[:n], m, kind)
        errors[kind] = float(np.max(np.abs(T.hw_forecast(model, 8) - y[n:])))
    k_ok = T.seasonal_index(n, 5, m) == n - 3
    ok = all(e < 1e-6 for e in errors.values()) and k_ok
    detail = ", ".join(f"{k} {e:.2e}" for k, e in errors.items())
    verdict(3, "Holt-Winters exactness", ok, f"{detail}, h=5 index n-3 {k_ok}")


def test_ac04_adf_discrimination(verdict):
    t0 = time.perf_counter()
    noise_hits = walk_hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        noise_hits += T.adf_test(rng.standard_normal(500)).is_stationary
        walk_hits += T.adf_test(np.cumsum(rng.standard_normal(500))).is_stationary
    elapsed = time.perf_counter() - t0
    ok = noise_hits >= 90 and walk_hits <= 15 and elapsed < 10
    verdict(4, "ADF discrimination", ok, f"white noise {noise_hits}/100, random walk {walk_hits}/100, {elapsed:.2f}s")


def test_ac05_arima_recovery(verdict):
    t0 = time.perf_counter()
    ar_hits = walk_hits = 0
    for seed in range(20):
        x = lfilter([1.0], [1.0, -0.7], np.random.default_rng(seed).standard_normal(1000))
        m = T.arima_auto_fit(x)
        ar_hits += m.d == 0 and m.p >= 1 and abs(m.ar[0] - 0.7) <= 0.1
        walk = np.cumsum(np.random.default_rng(100 + seed).standard_normal(1000))
        walk_hits += T.arima_auto_fit(walk).d == 1
    elapsed = time.perf_counter() - t0
    ok = ar_hits >= 18 and walk_hits >= 18 and elapsed < 60
    verdict(5, "ARIMA recovery", ok, f"AR(1) {ar_hits}/20, random walk d=1 {walk_hits}/20, {elapsed:.1f}s")


def test_ac06_walk_forward_protocol(verdict):
    n, train, test, step = 40, 10, 3, 4
    y = np.arange(float(n))
    problems = []
    for mode in ("rolling", "sliding"):
        seen = []

        def factory(window, h):
            seen.append(window.copy())
            return np.zeros(h)

        folds = V.walk_forward(y, V.WindowSpec(mode, train, test, step), factory)
        i = 0
        while True:
            start = 0 if mode == "rolling" else i * step
            stop = train + i * step
            if stop >= n:
                break
            if i >= len(folds):
                problems.append(f"{mode}: missing fold {i}")
                break
            expected_test = y[stop:min(stop + test, n)]
            if not np.array_equal(seen[i], y[start:stop]) or folds[i].actuals != tuple(expected_test):
                problems.append(f"{mode}: fold {i} boundaries")
            if mode == "sliding" and seen[i].min() < i * step:
                problems.append(f"sliding: fold {i} reaches before {i * step}")
            i += 1
        if len(folds) != i:
            problems.append(f"{mode}: {len(folds)} folds, expected {i}")
    verdict(6, "walk-forward protocol", not problems, "; ".join(problems) or "rolling and sliding windows exact")


def test_ac07_metric_oracle(verdict):
    worst = scale = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        act = rng.uniform(5, 50, 40)
        pred = act + rng.normal(0, 3, 40)
        r = V.evaluate(pred, act)
        e = pred - act
        rmse = np.sqrt(np.sum(e * e) / len(e))
        oracle = (rmse, np.sum(np.abs(e)) / len(e), 100 * np.sum(np.abs(e / act)) / len(e), 100 * rmse / np.mean(act))
        worst = max([worst] + [abs(a - b) for a, b in zip((r.rmse, r.mae, r.mape, r.rmse_over_mean), oracle)])
        scaled = V.evaluate(7.3 * pred, 7.3 * act)
        scale = max(scale, abs(scaled.rmse_over_mean - r.rmse_over_mean))
    ok = worst < 1e-12 and scale < 1e-10
    verdict(7, "metric oracle", ok, f"max formula diff {worst:.2e}, scale drift {scale:.2e}")


def test_ac08_auc_oracle(verdict):
    worst_pairs = worst_area = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 2, 200)
        scores = np.round(rng.random(200) + 0.3 * labels, 1)  # rounding forces ties
        pos, neg = scores[labels == 1], scores[labels == 0]
        wins = sum((p > q) + 0.5 * (p == q) for p in pos for q in neg)
        exhaustive = wins / (len(pos) * len(neg))
        value = ml.auc(scores, labels)
        worst_pairs = max(worst_pairs, abs(value - exhaustive))
        worst_area = max(worst_area, abs(ml.roc_area(ml.roc_curve(scores, labels)) - value))
    ok = worst_pairs < 1e-12 and worst_area < 1e-10
    verdict(8, "AUC oracle", ok, f"pair counting {worst_pairs:.2e}, trapezoid {worst_area:.2e}")


def test_ac09_ml_sanity(verdict):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(200, 3))
    y = 1.5 + X @ np.array([3.0, -2.0, 0.5])
    ols = ml.fit_regressor(ml.Dataset(X, y), "ols")
    coef_err = max(np.max(np.abs(np.array(ols.params["coefficients"]) - [3.0, -2.0, 0.5])),
                   abs(ols.params["intercept"] - 1.5))

    labels = np.repeat([0.0, 1.0], 100)
    pts = rng.normal(size=(200, 2)) + np.where(labels[:, None] == 1, 4.0, -4.0)
    nb = ml.fit_classifier(ml.Dataset(pts, labels), "gaussian_nb")
    acc = float(np.mean(ml.predict_classes(nb, pts) == labels))

    noisy = ml.Dataset(X, y + rng.normal(size=200))
    same = {}
    for kind in ("random_forest", "gradient_boost"):
        a, b = (ml.fit_regressor(noisy, kind, seed=11) for _ in range(2))
        same[kind] = a.to_json() == b.to_json() and np.array_equal(
            ml.predict_regressor(a, X), ml.predict_regressor(b, X))
    ok = coef_err < 1e-8 and acc >= 0.99 and all(same.values())
    verdict(9, "ML sanity", ok, f"OLS err {coef_err:.1e}, NB accuracy {acc:.3f}, deterministic {same}")


def _random_stats(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(5, 5))
    cov = (A @ A.T / 5 + 0.05 * np.eye(5)) * 0.08
    mu = rng.uniform(-0.05, 0.35, 5)
    return P.AssetStats(tuple("ABCDE"), mu, np.sqrt(np.diag(cov)), cov)


def test_ac10_portfolio_oracles(verdict):
    t0 = time.perf_counter()
    two = P.AssetStats(("X", "Y"), np.array([0.1, 0.1]), np.array([1.0, 2.0]), np.diag([1.0, 4.0]))
    w_err = float(np.max(np.abs(P.min_variance(two).values - [0.8, 0.2])))

    foc = beats = 0
    frontier_ok = True
    for seed in range(20):
        s = _random_stats(seed)
        g = s.covariance @ P.min_variance_closed_form(s)
        foc = max(foc, float(np.max(np.abs(g - g.mean())) / abs(g.mean())))
        sharpe = lambda w: P.sharpe_ratio(*P.portfolio_stats(w, s)[:1], 0.01, P.portfolio_stats(w, s)[1])
        best = sharpe(P.max_sharpe(s, 0.01, mc_samples=10_000, seed=seed))
        eq = sharpe(P.equal_weight(5))
        mv = sharpe(P.min_variance(s, mc_samples=10_000, seed=seed))
        beats += best >= eq - 1e-12 and best >= mv - 1e-12
        f = P.monte_carlo_frontier(s, 10_000, 0.01, seed)
        w = P.min_variance_closed_form(s)
        frontier_ok &= float(f.volatilities.min() ** 2) >= float(w @ s.covariance @ w) - 1e-15
    elapsed = time.perf_counter() - t0
    ok = w_err < 1e-6 and foc < 1e-8 and beats == 20 and frontier_ok and elapsed < 30
    verdict(10, "portfolio oracles", ok,
            f"two-asset err {w_err:.1e}, FOC residual {foc:.1e}, max-Sharpe wins {beats}/20, "
            f"frontier bound {frontier_ok}, {elapsed:.1f}s")


def test_ac11_allocation_arithmetic(verdict):
    rng = np.random.default_rng(2024)
    overspend = gap_violations = identity = checked = 0
    for _ in range(1000):
        k = int(rng.integers(1, 11))
        w = rng.exponential(size=k) * (rng.random(k) < 0.8)
        if not w.any():
            w[0] = 1.0
        w = w / w.sum()
        prices = np.round(rng.uniform(1, 2000, k), 2)
        budget = Decimal(str(round(float(rng.uniform(500, 500_000)), 2)))
        a = P.allocate_shares(budget, w, prices)
        overspend += a.spent > a.budget
        identity += a.spent + a.residual_cash != a.budget
        positive = [i for i in range(k) if w[i] > 0]
        priciest = max(positive, key=lambda i: a.prices[i])
        if a.shares[priciest] > 0:
            checked += 1
            gap_violations += not (a.budget - a.spent < max(a.prices[i] for i in positive))
    eq = P.equal_weight(25).values
    eq_ok = bool(np.allclose(eq, 0.04, rtol=0, atol=1e-15))
    ok = overspend == 0 and gap_violations == 0 and identity == 0 and eq_ok
    verdict(11, "allocation arithmetic", ok,
            f"overspends {overspend}, residual>=max price {gap_violations}/{checked}, "
            f"spent+residual!=budget {identity}, 25-asset weight 0.04 {eq_ok}")


def _pipeline(root: Path) -> float:
    t0 = time.perf_counter()
    for command in ("prepare", "forecast", "walkforward", "portfolio", "backtest"):
        status = cli.main(["--config", str(root / "config.ini"), command])
        assert status == 0, f"{command} exited {status}"
    return time.perf_counter() - t0


def _compare(a: Path, b: Path) -> list[str]:
    names = sorted(p.relative_to(a) for p in a.rglob("*") if p.suffix in (".csv", ".json"))
    other = sorted(p.relative_to(b) for p in b.rglob("*") if p.suffix in (".csv", ".json"))
    if names != other:
        return ["file sets differ"]
    return [str(n) for n in names if not filecmp.cmp(a / n, b / n, shallow=False)]


def test_ac12_end_to_end_determinism(verdict, tmp_path):
    runs = []
    for name in ("first", "second"):
        root = sample.generate(tmp_path / name)
        runs.append((root, _pipeline(root)))
    diffs = _compare(runs[0][0] / "out", runs[1][0] / "out")
    n_files = sum(1 for p in (runs[0][0] / "out").rglob("*") if p.suffix in (".csv", ".json"))
    slowest = max(t for _, t in runs)
    ok = not diffs and n_files > 0 and slowest < 120
    verdict(12, "end-to-end determinism", ok,
            f"{n_files} CSV/JSON files, {len(diffs)} differ {diffs[:3]}, slowest run {slowest:.1f}s")
