#!/usr/bin/env python3
"""Rebuild data/wdbc.data and data/pima-indians-diabetes.csv from offline copies.

WDBC comes from the copy bundled with scikit-learn; Pima comes from the KEEL
copy bundled in the `imbalanced-databases` wheel. Both are rewritten into the
UCI comma-separated layouts the loaders read. Record ids in the rebuilt WDBC
file are sequential (the loader ignores column 0).

Usage: prepare_data.py [path/to/imbalanced_databases-*.whl]
"""
import hashlib
import os
import sys
import zipfile

import sklearn

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def wdbc():
    src = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data", "breast_cancer.csv")
    lines = open(src).read().strip().splitlines()[1:]
    out = []
    for i, line in enumerate(lines):
        fields = line.split(",")
        feats, target = fields[:30], fields[30]
        diagnosis = "M" if target == "0" else "B"
        out.append(",".join([str(900000 + i), diagnosis] + feats))
    return "\n".join(out) + "\n"


def pima(wheel):
    raw = zipfile.ZipFile(wheel).read("imbalanced_databases/data/pima/pima.dat").decode()
    out = []
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        fields = line.split(",")
        outcome = {"positive": "1", "negative": "0"}[fields[8]]
        out.append(",".join(fields[:8] + [outcome]))
    return "\n".join(out) + "\n"


def main():
    wheel = sys.argv[1] if len(sys.argv) > 1 else "/tmp/pd/imbalanced_databases-0.1.1-py3-none-any.whl"
    os.makedirs(ROOT, exist_ok=True)
    for name, body in [("wdbc.data", wdbc()), ("pima-indians-diabetes.csv", pima(wheel))]:
        path = os.path.join(ROOT, name)
        with open(path, "w") as f:
            f.write(body)
        print(name, len(body.splitlines()), hashlib.sha256(body.encode()).hexdigest())


if __name__ == "__main__":
    main()
