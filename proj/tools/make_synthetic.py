#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under data/ (deterministic)."""
import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"
NAMES = ["alpha", "beta", "gamma"]


def blobs(rng, per_class, radius=3.0, spread=0.6):
    rows, labels = [], []
    for k, name in enumerate(NAMES):
        angle = 2.0 * np.pi * k / len(NAMES)
        centre = radius * np.array([np.cos(angle), np.sin(angle)])
        rows.append(centre + spread * rng.standard_normal((per_class, 2)))
        labels += [name] * per_class
    x = np.vstack(rows)
    order = rng.permutation(len(labels))
    return x[order], [labels[i] for i in order]


def write_csv(path, x, y):
    with open(path, "w") as f:
        for row, label in zip(x, y):
            f.write(",".join(repr(float(v)) for v in row) + "," + label + "\n")


def write_sparse(path, x, y):
    with open(path, "w") as f:
        for row, label in zip(x, y):
            pairs = " ".join(f"{j + 1}:{float(v)!r}" for j, v in enumerate(row) if v != 0.0)
            f.write(f"{label} {pairs}\n")


def main():
    rng = np.random.default_rng(20240601)
    x, y = blobs(rng, 30)
    write_csv(OUT / "blobs3.csv", x, y)
    write_sparse(OUT / "blobs3.svm", x, y)
    xt, yt = blobs(rng, 20)
    write_csv(OUT / "blobs3_test.csv", xt, yt)
    # Overlapping classes: hold-out and leave-one-out errors are nonzero.
    rng = np.random.default_rng(20240602)
    x, y = blobs(rng, 60, radius=1.5, spread=1.0)
    write_csv(OUT / "overlap3.csv", x, y)
    xt, yt = blobs(rng, 40, radius=1.5, spread=1.0)
    write_csv(OUT / "overlap3_test.csv", xt, yt)
    manifest = {
        "seed": 1,
        "split_fraction": 0.8,
        "datasets": [
            {"name": "blobs3", "train": "blobs3.csv", "test": "blobs3_test.csv", "format": "csv"},
            {"name": "overlap3", "train": "overlap3.csv", "test": "overlap3_test.csv", "format": "csv"},
        ],
        "solvers": [
            {"name": "SC-SVM online (ho)", "loss": "sc-svm", "mode": "online", "kernel": "linear", "select": "ho"},
            {"name": "SH-SVM online (ho)", "loss": "sh-svm", "mode": "online", "kernel": "linear", "select": "ho"},
            {"name": "S-LS online (ho)", "loss": "s-ls", "mode": "online", "kernel": "linear", "select": "ho"},
            {"name": "S-LS batch (loo)", "loss": "s-ls", "mode": "batch", "kernel": "linear", "select": "loo"},
            {"name": "S-LS rbf batch (loo)", "loss": "s-ls", "mode": "batch", "kernel": "rbf", "select": "loo"},
        ],
    }
    (OUT / "benchmark.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
