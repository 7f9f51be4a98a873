#!/usr/bin/env python3
"""Recomputes expected revenue figures with exact rational arithmetic.

  revenue_oracle.py ten-day   -> revenue of 1,000 S21 XP Hyd units over revenue_10day.csv
  revenue_oracle.py fixture   -> actual-price totals of both scenarios on data/fixture

Each mode prints JSON; the outputs are committed next to this script.
"""
import csv
import datetime as dt
import json
import pathlib
import sys
from fractions import Fraction as F

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent.parent

HASHRATE = F(473)
POWER_KW = F(5676, 1000)
UNIT_PRICE = F(10165)
LIFESPAN = 90
LOSS = F("0.0359")
HALVINGS = [
    (dt.date(2012, 11, 28), F(25)),
    (dt.date(2016, 7, 10), F(25, 2)),
    (dt.date(2020, 5, 12), F(25, 4)),
    (dt.date(2024, 4, 20), F(25, 8)),
]


def reward(day):
    r = None
    for start, value in HALVINGS:
        if day >= start:
            r = value
    return r


def read_market(path):
    rows = {}
    with open(path) as f:
        for row in csv.DictReader(line for line in f if not line.startswith("#")):
            rows[dt.date.fromisoformat(row["date"])] = (F(row["price_usd"]), F(row["network_hashrate_ths"]))
    return rows


def day_revenue(units, price, network, day):
    fleet = units * HASHRATE
    share = min(fleet / network, F(1))
    return price * reward(day) * 144 * share


def days_in_month(y, m):
    nxt = dt.date(y + (m == 12), m % 12 + 1, 1)
    return (nxt - dt.date(y, m, 1)).days


def ten_day():
    market = read_market(HERE / "revenue_10day.csv")
    total = sum(day_revenue(1000, p, n, d) for d, (p, n) in sorted(market.items()))
    return {"units": 1000, "revenue_usd": float(total)}


def fixture():
    market = read_market(ROOT / "data" / "fixture" / "market.csv")
    totals = {}
    with open(ROOT / "data" / "fixture" / "surplus.csv") as f:
        for row in csv.DictReader(f):
            y, m = map(int, row["month"].split("-"))
            totals[(y, m)] = totals.get((y, m), F(0)) + F(row["surplus_kwh"])
    supported = {}
    for (y, m), kwh in totals.items():
        usable = kwh * (1 - LOSS)
        supported[(y, m)] = int(usable / (POWER_KW * 24 * days_in_month(y, m)))
    peak = max(supported.values())
    count = len(supported)
    mean = F(sum(supported.values()), count)
    owned2 = int(mean + F(1, 2))

    out = {}
    for name, owned, op in (
        ("sim1", peak, lambda s: s),
        ("sim2", owned2, lambda s: min(owned2, s)),
    ):
        revenue = F(0)
        day = dt.date(2023, 1, 1)
        while day <= dt.date(2023, 12, 31):
            price, network = market[day]
            revenue += day_revenue(op(supported[(day.year, day.month)]), price, network, day)
            day += dt.timedelta(days=1)
        cost = owned * UNIT_PRICE * 12 / LIFESPAN
        cost_cents = int(cost * 100 + F(1, 2))
        out[name] = {"owned_units": owned, "revenue_usd": float(revenue), "cost_cents": cost_cents}
    return out


if __name__ == "__main__":
    mode = sys.argv[1] if len(sys.argv) > 1 else "ten-day"
    print(json.dumps(ten_day() if mode == "ten-day" else fixture(), indent=2))
