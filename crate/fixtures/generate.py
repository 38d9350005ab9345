"""Regenerates the dated training-log fixture. Output is deterministic."""
import csv
import datetime as dt
import random

rng = random.Random(2017)

PERIODS = [
    (dt.date(2013, 3, 1), dt.date(2014, 5, 14), 126),
    (dt.date(2014, 5, 15), dt.date(2015, 7, 14), 134),
    (dt.date(2015, 7, 15), dt.date(2016, 5, 31), 139),
    (dt.date(2016, 10, 1), dt.date(2017, 10, 31), 136),
]
LEVELS3 = ["LOW", "MEDIUM", "HIGH"]


def pick(level, names, noise=0.15):
    if rng.random() < noise:
        return rng.choice(names)
    return names[level]


def row(day):
    effort = rng.choices([0, 1, 2], weights=[0.4, 0.35, 0.25])[0]
    hilly = rng.choices([0, 1, 2], weights=[0.45, 0.35, 0.2])[0]
    if effort == 0:
        hilly = 0 if rng.random() < 0.85 else hilly
    return [
        day.isoformat(),
        pick(effort, ["SHORT", "MEDIUM", "LONG"]),
        pick(effort, ["SHORT", "MEDIUM", "LONG"], 0.2),
        pick(effort, ["SMALL", "MEDIUM", "HIGH"], 0.1),
        "HIGH" if effort + hilly >= 3 or rng.random() < 0.2 else "MEDIUM",
        pick(hilly, LEVELS3, 0.3),
        pick(hilly, LEVELS3, 0.1),
        pick(hilly, LEVELS3, 0.1),
    ]


rows = []
for start, end, count in PERIODS:
    span = (end - start).days
    days = sorted(start + dt.timedelta(days=rng.randint(0, span)) for _ in range(count))
    rows.extend(row(d) for d in days)

with open("training_log.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["timestamp", "DURATION", "DISTANCE", "CALORIES", "HR", "ALTITUDE", "ASCENT", "DESCENT"])
    w.writerows(rows)
