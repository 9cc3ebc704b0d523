#!/usr/bin/env python3
"""Rebuild the daily BTC-USD surrogate series from monthly OHLC anchors.

The daily path is a log-space Brownian bridge pinned to every monthly
close. Each month's daily volatility is the Parkinson estimate from that
month's high/low range, spread over its days. Output is deterministic for a
fixed seed.

    python3 data/make_surrogate.py > data/btc_usd_daily.csv
"""

import csv
import datetime as dt
import pathlib
import sys

import numpy as np

SEED = 20150901
START = dt.date(2015, 9, 1)
END = dt.date(2018, 8, 31)


def bridge(rng, a, b, steps, sigma):
    """Values at 1..steps of a Brownian bridge from a (step 0) to b (step steps)."""
    if steps == 1:
        return np.array([b])
    w = np.concatenate([[0.0], np.cumsum(rng.normal(0.0, sigma, steps))])
    t = np.arange(steps + 1) / steps
    path = a + w - t * w[-1] + t * (b - a)
    return path[1:]


def main():
    here = pathlib.Path(__file__).resolve().parent
    with open(here / "monthly_anchors.csv") as fh:
        rows = list(csv.DictReader(fh))
    rng = np.random.default_rng(SEED)

    prev_close = np.log(float(rows[0]["close"]))
    out = []
    for row in rows[1:]:
        month_end = dt.date.fromisoformat(row["date"])
        first = month_end.replace(day=1)
        days = month_end.day
        hi, lo, close = (np.log(float(row[k])) for k in ("high", "low", "close"))
        # Parkinson: var = range^2 / (4 ln 2) over the month
        sigma = (hi - lo) / (2.0 * np.sqrt(np.log(2.0)) * np.sqrt(days))
        level = bridge(rng, prev_close, close, days, sigma)
        for k in range(days):
            out.append((first + dt.timedelta(days=k), float(np.exp(level[k]))))
        prev_close = close

    out = [(d, v) for d, v in out if START <= d <= END]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["date", "close"])
    for d, v in out:
        w.writerow([d.isoformat(), f"{v:.2f}"])


if __name__ == "__main__":
    main()
