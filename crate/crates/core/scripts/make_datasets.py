"""Regenerates the bundled CSV datasets under ../data.

synthetic_housing.csv: 506 x 13 regression table with a housing-style layout
(one categorical column, target `medv`).
wine.csv: the UCI wine recognition data shipped with scikit-learn (178 x 13,
three classes, target `cultivar`).
"""
import csv
import pathlib

import numpy as np
from sklearn.datasets import load_wine

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"


def housing(rng):
    n = 506
    crim = np.round(rng.lognormal(-1.0, 1.5, n), 4)
    zn = np.round(np.where(rng.random(n) < 0.7, 0.0, rng.uniform(10, 100, n)), 1)
    indus = np.round(rng.uniform(0.5, 27.0, n), 2)
    chas = (rng.random(n) < 0.07).astype(int)
    nox = np.round(0.35 + 0.02 * indus + rng.normal(0, 0.05, n), 3)
    rm = np.round(rng.normal(6.3, 0.7, n), 3)
    age = np.round(np.clip(rng.normal(68, 28, n), 3, 100), 1)
    dis = np.round(np.clip(12.0 - 0.09 * age + rng.normal(0, 1.2, n), 1.1, 12.0), 4)
    rad = rng.choice([1, 2, 3, 4, 5, 6, 7, 8, 24], n)
    tax = np.round(180 + 12 * rad + 8 * indus + rng.normal(0, 40, n))
    ptratio = np.round(rng.uniform(12.6, 22.0, n), 1)
    lstat = np.round(np.clip(30 - 3.2 * (rm - 5) + 0.05 * age + rng.normal(0, 3, n), 1.7, 38), 2)
    zone = rng.choice(["urban", "suburban", "rural"], n, p=[0.4, 0.4, 0.2])
    zone_eff = np.select([zone == "urban", zone == "suburban"], [-1.5, 1.0], 2.5)
    medv = (
        22.0
        + 6.5 * (rm - 6.3)
        - 0.55 * (lstat - 12)
        - 0.7 * np.log1p(crim)
        - 0.9 * (ptratio - 18)
        + 3.0 * chas
        + zone_eff
        + 4.0 * (rm > 7.0)
        + rng.normal(0, 2.5, n)
    )
    medv = np.round(np.clip(medv, 5.0, 50.0), 1)
    cols = {
        "crim": crim, "zn": zn, "indus": indus, "chas": chas, "nox": nox, "rm": rm,
        "age": age, "dis": dis, "rad": rad, "tax": tax, "ptratio": ptratio,
        "lstat": lstat, "zone": zone, "medv": medv,
    }
    with open(OUT / "synthetic_housing.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols.keys())
        for i in range(n):
            w.writerow([cols[k][i] for k in cols])


def wine():
    ds = load_wine()
    names = [n.replace("/", "_") for n in ds.feature_names]
    with open(OUT / "wine.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["cultivar"])
        for x, y in zip(ds.data, ds.target):
            w.writerow([repr(float(v)) for v in x] + [f"class_{y}"])


if __name__ == "__main__":
    housing(np.random.default_rng(20230125))
    wine()
