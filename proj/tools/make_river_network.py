#!/usr/bin/env python3
"""Writes a synthetic river-like tree in the `u v mu sigma` network format.

Channels grow upstream from the mouth: each new junction extends a recent
channel head with high probability, otherwise it branches off an older node.
Per-edge delays are PosNormal(mu, mu/4) with mu drawn from [0.5, 2].
"""

import argparse
import random


def build(nodes: int, seed: int):
    rng = random.Random(seed)
    labels = ["mouth"] + [f"j{i:03d}" for i in range(1, nodes)]
    heads = [0]
    edges = []
    for child in range(1, nodes):
        if rng.random() < 0.75 and heads:
            parent = rng.choice(heads[-4:])
        else:
            parent = rng.randrange(child)
        edges.append((parent, child))
        if parent in heads and rng.random() < 0.8:
            heads.remove(parent)
        heads.append(child)
    out = []
    for parent, child in edges:
        mu = round(rng.uniform(0.5, 2.0), 3)
        out.append((labels[parent], labels[child], mu, round(mu / 4.0, 4)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=246)
    ap.add_argument("--seed", type=int, default=20111)
    ap.add_argument("--out", default="data/river_synthetic.txt")
    args = ap.parse_args()
    rows = build(args.nodes, args.seed)
    with open(args.out, "w") as f:
        f.write("# synthetic river-like tree, not measured data\n")
        f.write(f"# nodes={args.nodes} seed={args.seed}; root is the first label (mouth)\n")
        f.write("# columns: u v mu sigma (PosNormal delay per edge)\n")
        for u, v, mu, sigma in rows:
            f.write(f"{u} {v} {mu} {sigma}\n")


if __name__ == "__main__":
    main()
