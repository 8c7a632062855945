#!/usr/bin/env python3
"""Writes the five-county fixture: matrix, schema, store, series, geometry.

Pattern ids and the dataset fingerprint are computed here independently of
the C++ code, so the unit tests can cross-check both implementations.
Run from any directory; files land next to this script.
"""

import hashlib
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

FEATURES = ["% minority population", "avg. GPA", "% in poverty", "% aged 65+"]
TARGET = "death_rate"

# fips, name, state, features..., target (None = missing)
COUNTIES = [
    ("09003", "Hartford", "CT", [37.6, 2.9, 11.0, 18.5], 100.0),
    ("09001", "Fairfield", "CT", [52.0, 2.4, 9.0, 15.1], 120.0),
    ("09009", "New Haven", "CT", [20.0, 3.7, 12.5, 17.0], 90.0),
    ("48061", "Cameron", "TX", [99.2, 0.0, 31.0, 13.0], 60.0),
    ("30069", "Petroleum", "MT", [0.0, 4.0, 6.0, 23.0], None),
]

M, G, P, A = FEATURES

# Constraints per pattern; members and means follow from the matrix.
PATTERNS = [
    ([(G, 2.4, 2.9), (P, 6.0, 9.0)], 1e-6, [0.55, 0.45]),
    ([(A, 15.1, 17.0), (M, 0.0, 52.0)], 4e-6, [0.7, 0.3]),
    ([(M, 20.0, 52.0), (A, 15.1, 18.5)], 8e-6, [0.6, 0.4]),
    ([(G, 2.4, 3.7), (A, 15.1, 18.5)], 9e-6, [0.5, 0.5]),
    ([(P, 9.0, 12.5), (M, 20.0, 52.0), (A, 15.1, 18.5)], 1.2e-5, [0.2, 0.5, 0.3]),
    ([(A, 18.5, 23.0), (M, 20.0, 99.2)], 2e-5, [0.8, 0.2]),
    ([(G, 2.9, 4.0), (M, 37.6, 99.2)], 3e-5, [0.35, 0.65]),
    ([(P, 9.0, 11.0), (G, 2.9, 4.0)], 3.5e-5, [0.4, 0.6]),
    ([(G, 2.9, 4.0), (P, 6.0, 12.5)], 5e-5, [0.9, 0.1]),
    ([(A, 17.0, 23.0), (P, 11.0, 12.5)], 6e-5, [0.5, 0.5]),
    ([(M, 37.6, 99.2), (G, 0.0, 2.9)], 2e-4, [0.75, 0.25]),
    ([(G, 0.0, 2.9), (A, 13.0, 18.5)], 3e-4, [0.6, 0.4]),
]

DATES = ["2020-04-01", "2020-05-01", "2020-06-01", "2020-07-01"]
SERIES = {
    "09003": ["0", "5", "4", "12"],
    "09001": ["2", "10", "25", "40"],
    "09009": ["1", "3", "", "9"],
    "48061": ["0", "0", "1", "6"],
}


def fmt(v):
    """Shortest round-trip decimal, with integral values printed bare."""
    if v == 0:
        return "0"
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def csv_field(text):
    if any(c in text for c in ',"\r\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def canonical_csv():
    lines = [",".join(csv_field(h) for h in ["fips", "name", "state"] + FEATURES + [TARGET])]
    for fips, name, state, values, target in COUNTIES:
        cells = [fips, name, state] + [fmt(v) for v in values]
        cells.append("" if target is None else fmt(target))
        lines.append(",".join(csv_field(c) for c in cells))
    return "\n".join(lines) + "\n"


def pattern_id(constraints):
    canon = "".join(f"{f}\x1f{fmt(lo)}\x1f{fmt(hi)}\n" for f, lo, hi in sorted(constraints))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def members_of(constraints):
    out = []
    for fips, _, _, values, target in COUNTIES:
        if target is None:
            continue
        if all(lo <= values[FEATURES.index(f)] <= hi for f, lo, hi in constraints):
            out.append((fips, target))
    return out


def build_store(fingerprint):
    patterns = []
    for constraints, p, weights in PATTERNS:
        members = members_of(constraints)
        mean = sum(t for _, t in members) / len(members)
        patterns.append(
            {
                "id": pattern_id(constraints),
                "constraints": [{"feature": f, "lo": lo, "hi": hi} for f, lo, hi in constraints],
                "members": [fips for fips, _ in members],
                "mean_target": mean,
                "p_value": p,
                "p_adjusted": min(1.0, p * len(PATTERNS)),
                "direction": "high",
                "contributions": weights,
            }
        )
    patterns.sort(key=lambda q: (-q["mean_target"], q["id"]))
    targets = [c[4] for c in COUNTIES if c[4] is not None]
    return {
        "schema_version": 1,
        "created_at": "2020-05-15T00:00:00Z",
        "dataset_fingerprint": fingerprint,
        "global_target_mean": sum(targets) / len(targets),
        "config": {
            "min_support": 2,
            "alpha": 0.01,
            "max_depth": 3,
            "bins_per_feature": 3,
            "max_merge_run": 2,
            "direction": "high",
        },
        "patterns": patterns,
    }


def square(fips, name, x, y):
    ring = [[x, y], [x + 1, y], [x + 1, y + 1], [x, y + 1], [x, y]]
    return {
        "type": "Feature",
        "properties": {"GEOID": fips, "NAME": name},
        "geometry": {"type": "Polygon", "coordinates": [ring]},
    }


def main():
    matrix = canonical_csv()
    fingerprint = hashlib.sha256(matrix.encode()).hexdigest()
    store = build_store(fingerprint)

    def write(name, text):
        with open(os.path.join(HERE, name), "w", newline="\n") as f:
            f.write(text)

    write("matrix.csv", matrix)
    write(
        "schema.cfg",
        "# five-county fixture\n"
        f"target_column = {TARGET}\n"
        "unit.avg. GPA = grade points\n",
    )
    write("store.json", json.dumps(store, indent=2) + "\n")
    write(
        "timeseries.csv",
        "fips," + ",".join(DATES) + "\n"
        + "".join(f"{fips},{','.join(v)}\n" for fips, v in SERIES.items()),
    )
    geo = {
        "type": "FeatureCollection",
        "features": [square(c[0], c[1], i, 0) for i, c in enumerate(COUNTIES)],
    }
    write("counties.geojson", json.dumps(geo) + "\n")
    write("expected.json", json.dumps(
        {
            "dataset_fingerprint": fingerprint,
            "pattern_ids": [q["id"] for q in store["patterns"]],
            "means": [q["mean_target"] for q in store["patterns"]],
        },
        indent=2,
    ) + "\n")


if __name__ == "__main__":
    main()
