#!/usr/bin/env python3
"""Generates the synthetic fixture under data/fixture/.

The fixture is committed; this script documents how it was produced.
Prices follow a seeded geometric random walk and network hash rate a noisy
exponential trend. Surplus energy per region follows a seasonal profile that
peaks in spring.
"""
import datetime as dt
import math
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixture"


def market(rng):
    start = dt.date(2021, 1, 1)
    end = dt.date(2023, 12, 31)
    days = (end - start).days + 1
    price = 30000.0
    rows = []
    for i in range(days):
        d = start + dt.timedelta(days=i)
        price *= math.exp(rng.normal(0.0002, 0.03))
        hashrate = 150e6 * math.exp(i * math.log(500 / 150) / days) * (1 + rng.normal(0, 0.04))
        rows.append(f"{d.isoformat()},{price:.2f},{hashrate:.0f}")
    return "date,price_usd,network_hashrate_ths\n" + "\n".join(rows) + "\n"


def surplus(rng):
    regions = [f"R{i:02d}" for i in range(40)]
    base = {r: rng.uniform(0.5, 1.5) for r in regions}
    households = {r: int(rng.integers(20, 400)) for r in regions}
    rows = []
    for year in (2021, 2022, 2023):
        for month in range(1, 13):
            season = 1.0 + 0.45 * math.cos(2 * math.pi * (month - 5) / 12)
            growth = 1.0 + 0.08 * (year - 2021)
            for r in regions:
                kwh = 2.4e6 * base[r] * season * growth * (1 + rng.normal(0, 0.05))
                rows.append(f"{r},{year}-{month:02d},{households[r]},{max(kwh, 0):.1f}")
    return "region,month,households,surplus_kwh\n" + "\n".join(rows) + "\n"


def main():
    rng = np.random.default_rng(20240601)
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "market.csv").write_text(market(rng))
    (OUT / "surplus.csv").write_text(surplus(rng))


if __name__ == "__main__":
    main()
