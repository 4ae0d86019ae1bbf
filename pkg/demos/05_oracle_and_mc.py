"""Two independent ways to check the engine.

The exhaustive oracle re-enumerates every route in plain Python and must
agree with the engine to 1e-12. The percolation sampler estimates the same
reach probabilities from random edge/node activations; on trees the routes
are disjoint, so the estimate converges to the exact value.
"""

import numpy as np

from overlap_spread import Graph, SpreadParams, compute_ism
from overlap_spread.oracle import compare_with_engine, exhaustive_reach, percolation_mc


def main():
    r = np.random.default_rng(42)
    n = 9
    pairs = [(0, 1)] + [(i, j) for i in range(n) for j in range(i + 1, n) if r.random() < 0.3]
    g = Graph.from_edges(pairs, node_ids=range(n), edge_weight=0.4, node_weight=0.9)

    for model in ("sc", "cc"):
        p = SpreadParams(model=model, l_max=7, prune_eps=0.0)
        rep = compare_with_engine(compute_ism(g, p), g, p)
        print(f"{model}: engine vs exhaustive oracle over {rep.n_pairs} pair-times: "
              f"max |diff| = {rep.max_abs_diff:.3e} (tolerance {rep.tolerance:g}) "
              f"{'OK' if rep.passed else 'MISMATCH'}")

    tree = Graph.from_edges([(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)], edge_weight=0.35)
    p = SpreadParams(model="sc", l_max=5, prune_eps=0.0)
    exact = exhaustive_reach(tree, p, [5])[5]
    trials = 400_000
    freq = percolation_mc(tree, 5, trials, seed=99)
    off = ~np.eye(tree.n, dtype=bool)
    worst = np.max(np.abs(freq - exact)[off])
    sigma = np.sqrt(np.max(exact[off] * (1 - exact[off])) / trials)
    print(f"\ntree percolation, {trials} trials: worst |freq - exact| = {worst:.2e} "
          f"(binomial sigma at worst entry about {sigma:.2e})")
    print("per-pair reach from node 0:", np.array_str(exact[0], precision=4))
    print("sampled                  :", np.array_str(freq[0], precision=4))


if __name__ == "__main__":
    main()
