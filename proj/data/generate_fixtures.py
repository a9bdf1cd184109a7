"""Regenerates the synthetic fixtures in this directory (deterministic)."""

import csv
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

ISSUES = [
    "handicapped-infants", "water-project-cost-sharing", "adoption-of-the-budget-resolution",
    "physician-fee-freeze", "el-salvador-aid", "religious-groups-in-schools",
    "anti-satellite-test-ban", "aid-to-nicaraguan-contras", "mx-missile", "immigration",
    "synfuels-corporation-cutback", "education-spending", "superfund-right-to-sue", "crime",
    "duty-free-exports", "export-administration-act-south-africa",
]


def num(v):
    return "%.12g" % v


def dump_nb(name, prior, threshold, features):
    lines = ["{", '  "kind": "naive_bayes",', '  "threshold": %s,' % num(threshold),
             '  "class": {"name": %s, "prior": %s},' % (json.dumps(name), num(prior)), '  "features": [']
    rows = []
    for fname, fp, fn in features:
        rows.append('    {"name": %s, "values": ["-", "+"], "fp": %s, "fn": %s}'
                    % (json.dumps(fname), num(fp), num(fn)))
    lines.append(",\n".join(rows))
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def votes_csv(rng):
    # Party-dependent yes rates, loosely shaped like a two-party roll call.
    rates = []
    for _ in ISSUES:
        base = rng.uniform(0.15, 0.85)
        split = rng.uniform(-0.7, 0.7)
        rates.append((min(0.97, max(0.03, base + split / 2)), min(0.97, max(0.03, base - split / 2))))
    rows = []
    for _ in range(435):
        party = "democrat" if rng.random() < 0.61 else "republican"
        cells = [party]
        for dem, rep in rates:
            if rng.random() < 0.05:
                cells.append("?")
                continue
            p = dem if party == "democrat" else rep
            cells.append("y" if rng.random() < p else "n")
        rows.append(cells)
    with open(HERE / "votes_synthetic.csv", "w", newline="") as out:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["party"] + ISSUES)
        w.writerows(rows)


def random16(rng):
    feats = [("R%d" % i, round(rng.uniform(0.02, 0.6), 4), round(rng.uniform(0.02, 0.6), 4)) for i in range(16)]
    (HERE / "random16.json").write_text(dump_nb("C", 0.45, 0.5, feats))


if __name__ == "__main__":
    rng = random.Random(1984)
    votes_csv(rng)
    random16(rng)
