#!/usr/bin/env python3
"""Convert a Planetoid citation dataset (ind.<name>.* files) to the
single-graph CSV layout: features.csv, edges.csv, labels.csv, split.csv.

Uses the public split: the first |y| nodes train, the next 500 validate,
and the nodes in test.index test.

    python3 planetoid_to_csv.py RAW_DIR cora OUT_DIR

Needs numpy and scipy (the raw files are pickled scipy matrices).
"""

import argparse
import csv
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load(raw: Path, name: str, part: str):
    with open(raw / f"ind.{name}.{part}", "rb") as f:
        return pickle.load(f, encoding="latin1")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("raw_dir", type=Path)
    parser.add_argument("name")
    parser.add_argument("out_dir", type=Path)
    args = parser.parse_args()

    x, y, tx, ty, allx, ally, graph = (load(args.raw_dir, args.name, p)
                                       for p in ("x", "y", "tx", "ty", "allx", "ally", "graph"))
    test_index = [int(line) for line in (args.raw_dir / f"ind.{args.name}.test.index").read_text().split()]
    test_sorted = np.sort(test_index)

    # Citeseer has isolated test nodes missing from tx/ty; pad them with zeros.
    span = test_sorted[-1] - test_sorted[0] + 1
    if span != len(test_index):
        tx_full = sp.lil_matrix((span, tx.shape[1]))
        tx_full[test_sorted - test_sorted[0], :] = tx
        tx = tx_full
        ty_full = np.zeros((span, y.shape[1]))
        ty_full[test_sorted - test_sorted[0], :] = ty
        ty = ty_full

    features = sp.vstack((allx, tx)).tolil()
    features[test_index, :] = features[test_sorted, :]
    labels = np.vstack((ally, ty))
    labels[test_index, :] = labels[test_sorted, :]
    n = features.shape[0]

    roles = {i: "train" for i in range(len(y))}
    roles.update({i: "val" for i in range(len(y), len(y) + 500)})
    roles.update({i: "test" for i in test_index})

    args.out_dir.mkdir(parents=True, exist_ok=True)
    dense = features.toarray()
    with open(args.out_dir / "features.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"f{j}" for j in range(dense.shape[1])])
        for row in dense:
            w.writerow([repr(float(v)) if v % 1 else int(v) for v in row])

    edges = set()
    for src, targets in graph.items():
        for dst in targets:
            if src != dst and src < n and dst < n:
                edges.add((min(src, dst), max(src, dst)))
    with open(args.out_dir / "edges.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["source", "target"])
        w.writerows(sorted(edges))

    with open(args.out_dir / "labels.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["node", "label"])
        for i in range(n):
            if labels[i].any():
                w.writerow([i, int(labels[i].argmax())])

    with open(args.out_dir / "split.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["node", "role"])
        for i in sorted(roles):
            if labels[i].any():
                w.writerow([i, roles[i]])

    print(f"{args.name}: {n} nodes, {len(edges)} edges, {labels.shape[1]} classes", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
