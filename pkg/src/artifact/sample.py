"""Deterministic synthetic six-symbol dataset for demos and end-to-end tests.

    python -m artifact.sample OUT_DIR

writes ``<SYMBOL>.csv`` files, ``calendar.txt`` and a ready-to-run
``config.ini`` covering 2016-01-01 .. 2021-12-31.
"""

from __future__ import annotations

import argparse
import datetime as dt
from pathlib import Path

import numpy as np

UNIVERSE = {
    "metals": ("MTLA", "MTLB", "MTLC"),
    "autos": ("AUTA", "AUTB", "AUTC"),
}
START, END = "2016-01-01", "2021-12-31"
# fixed weekday holidays (month, day) applied every year
HOLIDAYS = ((1, 26), (3, 10), (4, 14), (5, 1), (8, 15), (10, 2), (11, 12), (12, 25))


def trading_calendar(start=START, end=END, seed: int = 7) -> np.ndarray:
    days = np.arange(np.datetime64(start), np.datetime64(end) + 1)
    days = days[np.is_busday(days)]
    years = range(int(start[:4]), int(end[:4]) + 1)
    fixed = {np.datetime64(dt.date(y, m, d)) for y in years for m, d in HOLIDAYS}
    rng = np.random.default_rng(seed)
    extra = set(rng.choice(days, size=4 * len(years), replace=False).tolist())
    keep = [d for d in days if d not in fixed and d.astype(dt.date) not in extra]
    return np.array(keep, dtype="datetime64[D]")


def generate(out_dir, seed: int = 7) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cal = trading_calendar(seed=seed)
    rng = np.random.default_rng(seed)
    symbols = [s for group in UNIVERSE.values() for s in group]
    n, k = len(cal), len(symbols)

    drift = rng.uniform(0.0002, 0.0012, k)
    vol = rng.uniform(0.012, 0.025, k)
    sector = np.repeat(np.arange(len(UNIVERSE)), [len(g) for g in UNIVERSE.values()])
    market = rng.standard_normal(n)
    sector_f = rng.standard_normal((n, len(UNIVERSE)))
    idio = rng.standard_normal((n, k))
    shocks = 0.4 * market[:, None] + 0.5 * sector_f[:, sector] + 0.77 * idio
    weekday = cal.astype("datetime64[D]").view("int64") % 7
    weekly = 0.001 * np.sin(2 * np.pi * weekday / 5.0)
    log_ret = drift + vol * shocks + weekly[:, None]
    start_price = rng.uniform(80, 900, k)
    closes = start_price * np.exp(np.cumsum(log_ret, axis=0))

    with (out / "calendar.txt").open("w") as fh:
        fh.writelines(f"{d}\n" for d in cal)

    for j, sym in enumerate(symbols):
        c = np.round(closes[:, j], 2)
        prev = np.r_[c[0], c[:-1]]
        o = np.round(prev * (1 + 0.003 * rng.standard_normal(n)), 2)
        hi = np.round(np.maximum(o, c) * (1 + np.abs(0.006 * rng.standard_normal(n))), 2)
        lo = np.round(np.minimum(o, c) * (1 - np.abs(0.006 * rng.standard_normal(n))), 2)
        vol_shares = rng.integers(50_000, 2_000_000, n)
        # a few missing sessions per symbol, never the first day
        missing = set(rng.choice(np.arange(1, n), size=n // 100, replace=False).tolist())
        with (out / f"{sym}.csv").open("w") as fh:
            fh.write("Date,Open,High,Low,Close,Volume\n")
            for i in range(n):
                if i in missing:
                    continue
                fh.write(f"{cal[i]},{o[i]:.2f},{hi[i]:.2f},{lo[i]:.2f},{c[i]:.2f},{vol_shares[i]}\n")

    universe = "\n".join(f"{name} = {', '.join(syms)}" for name, syms in UNIVERSE.items())
    (out / "config.ini").write_text(
        f"""[data]
dir = .
calendar = calendar.txt
split_date = 2020-12-31

[universe]
{universe}

[forecast]
model = ses
h = 30
season_length = 5

[walkforward]
model = ses
mode = sliding
train = 1000
test = 1
step = 1

[ml]
regressor = random_forest
classifier = random_forest

[portfolio]
kind = max_sharpe
budget = 100000
risk_free_rate = 0.01
long_only = true
samples = 10000

[run]
seed = 42
threads = 1
output_dir = out
"""
    )
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description="write the synthetic sample dataset")
    parser.add_argument("out_dir")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    print(generate(args.out_dir, args.seed))


if __name__ == "__main__":
    main()
