#!/usr/bin/env python3
"""Regenerates the bundled instances in data/instances (fixed seed)."""
import json
import os
import random
import sys

OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data", "instances")


def voting(rng, n):
    while True:
        w = [rng.randint(0, 10) for _ in range(n)]
        total = sum(w)
        if total == 0:
            continue
        t = rng.randint(1, total)
        # nonempty imputation set: at most one player wins alone
        if sum(1 for x in w if x >= t) <= 1:
            return {"type": "weighted_voting", "weights": w, "threshold": t}


def graph(rng, n, p):
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append([u, v, str(rng.randint(1, 5))])
    return edges


def path_td(n):
    bags = [[i, i + 1] for i in range(n - 1)]
    return {"bags": bags, "edges": [[i, i + 1] for i in range(len(bags) - 1)], "root": 0}


def cycle_td(n):
    bags = [[0, i, i + 1] for i in range(1, n - 1)]
    return {"bags": bags, "edges": [[i, i + 1] for i in range(len(bags) - 1)], "root": 0}


def star_td(n):
    bags = [[0, i] for i in range(1, n)]
    return {"bags": bags, "edges": [[i, i + 1] for i in range(len(bags) - 1)], "root": 0}


def main():
    rng = random.Random(20261019)
    os.makedirs(OUT, exist_ok=True)
    items = []
    items.append(("voting_majority3", {"type": "weighted_voting", "weights": [1, 1, 1], "threshold": 2}))
    items.append(("voting_majority4", {"type": "weighted_voting", "weights": [1, 1, 1, 1], "threshold": 3}))
    items.append(("voting_311", {"type": "weighted_voting", "weights": [3, 1, 1], "threshold": 4}))
    for k in range(22):
        items.append((f"voting_random{k:02d}", voting(rng, rng.randint(3, 8))))

    def bm(n, edges, b, td=None):
        inst = {"type": "b_matching", "n": n, "edges": edges, "b": b}
        if td is not None:
            inst["tree_decomposition"] = td
        return inst

    items.append(("bm_single_edge", bm(2, [[0, 1, "1"]], [1, 1])))
    items.append(("bm_path3", bm(3, [[0, 1, "1"], [1, 2, "1"]], [1, 1, 1], path_td(3))))
    items.append(("bm_cycle4", bm(4, [[0, 1, "1"], [1, 2, "1"], [2, 3, "1"], [0, 3, "1"]], [1] * 4, cycle_td(4))))
    items.append(("bm_triangle", bm(3, [[0, 1, "1"], [1, 2, "1"], [0, 2, "1"]], [1, 1, 1])))
    items.append(("bm_star4", bm(4, [[0, i, str(i)] for i in range(1, 4)], [2, 1, 1, 1], star_td(4))))
    for k in range(5):
        n = rng.randint(4, 7)
        edges = [[i, i + 1, str(rng.randint(1, 5))] for i in range(n - 1)]
        items.append((f"bm_path{k:02d}", bm(n, edges, [rng.randint(1, 2) for _ in range(n)], path_td(n))))
    for k in range(3):
        n = rng.randint(4, 7)
        edges = [[i, i + 1, str(rng.randint(1, 5))] for i in range(n - 1)] + [[0, n - 1, str(rng.randint(1, 5))]]
        items.append((f"bm_cycle{k:02d}", bm(n, edges, [rng.randint(1, 2) for _ in range(n)], cycle_td(n))))
    k = 0
    while k < 12:
        n = rng.randint(3, 7)
        edges = graph(rng, n, 0.45)
        if not edges:
            continue
        items.append((f"bm_random{k:02d}", bm(n, edges, [rng.randint(1, 2) for _ in range(n)])))
        k += 1

    assert len(items) == 50, len(items)
    for name, inst in items:
        with open(os.path.join(OUT, name + ".json"), "w") as f:
            json.dump(inst, f, sort_keys=True)
            f.write("\n")


if __name__ == "__main__":
    main()
