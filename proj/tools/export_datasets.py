#!/usr/bin/env python3
"""Export bundled scikit-learn datasets to CSV for the real-data benchmarks.

Writes wine.csv (UCI Wine: 178 samples, 13 attributes, 3 classes) and
diabetes.csv (442 samples, 10 attributes, continuous target). Both ship
inside scikit-learn, so no network access is needed. KEEL's laser set is not
redistributed here; convert it to laser.csv (4 attributes + target) yourself
and drop it in the same directory to enable the Laser benchmarks.

Usage: python3 tools/export_datasets.py [OUT_DIR]
"""

import csv
import sys
from pathlib import Path


def write_csv(path, feature_names, X, y):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + ["target"])
        for row, target in zip(X, y):
            writer.writerow([repr(float(v)) for v in row] + [target])
    print(f"wrote {path} ({len(X)} rows, {len(feature_names)} attributes)")


def main():
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    out_dir.mkdir(parents=True, exist_ok=True)

    from sklearn.datasets import load_diabetes, load_wine

    wine = load_wine()
    write_csv(out_dir / "wine.csv", wine.feature_names, wine.data,
              [int(t) for t in wine.target])

    diabetes = load_diabetes()
    write_csv(out_dir / "diabetes.csv", diabetes.feature_names, diabetes.data,
              [repr(float(t)) for t in diabetes.target])


if __name__ == "__main__":
    main()
