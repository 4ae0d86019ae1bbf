"""Centrality, vertex-removal importance and class comparisons.

Computes the per-node metrics on the fixture network, compares the OL and
NOL classes with the relative-difference and geometric-mean statistics,
and summarises concentration with the Lorenz curve shares.
"""

from pathlib import Path

import numpy as np

from overlap_spread import SpreadParams, compute_ism, parse_circles, parse_edge_list
from overlap_spread import classify_ol_nol, restrict_circles
from overlap_spread.metrics import (
    betweenness_all,
    bootstrap_gm_ratio,
    cohesion,
    group_relative_difference,
    in_centrality,
    lorenz,
    out_centrality,
    percentile_class_shares,
)

DATA = Path(__file__).parent.parent / "tests" / "data"


def main():
    g = parse_edge_list((DATA / "net_a.edges").read_text())
    circles = restrict_circles(parse_circles((DATA / "net_a.circles").read_text(), "ego-circles"), g)
    part = classify_ol_nol(circles, g)
    is_ol = part.ol_mask(g.ids)

    p = SpreadParams(model="cc", uniform_edge_weight=0.3, l_max=12)
    m = compute_ism(g, p)
    t = 12
    c = m.evaluate(t)
    out_c = out_centrality(c)
    in_c = in_centrality(c)
    print(f"cohesion at T={t}: {cohesion(c):.4f} "
          f"(= sum of in = {in_c.sum():.4f} = sum of out = {out_c.sum():.4f})")

    b = betweenness_all(g, p, t)
    print("\nnode  out      in       removal-drop  class")
    for i, node in enumerate(g.ids):
        print(f"{node:>4}  {out_c[i]:.4f}  {in_c[i]:.4f}  {b[i]:.4f}        "
              f"{'OL' if is_ol[i] else 'NOL'}")

    d_out = group_relative_difference(out_c, is_ol)
    d_in = group_relative_difference(in_c, is_ol)
    print(f"\nrelative difference of class means: out {d_out:+.1f}%  in {d_in:+.1f}%")

    r = bootstrap_gm_ratio(out_c, is_ol, n_resamples=2000, seed=7)
    print(f"geometric-mean ratio R={r.r:.3f}, 1%-99% bootstrap bounds "
          f"[{r.ci_low:.3f}, {r.ci_high:.3f}]")

    lz = lorenz(b)
    shares = percentile_class_shares(b, is_ol)
    print(f"\nremoval-drop concentration: bulk(10-90%) holds {100 * lz.bulk_share:.1f}% "
          f"of the total, top 10% holds {100 * lz.top10_share:.1f}%")
    print(f"OL share overall {shares.ol_pct_total:.1f}%, inside the top decile "
          f"{shares.ol_pct_top10:.1f}% (band of {shares.n_top10})")
    frac = np.interp(0.5, lz.curve[:, 0], lz.curve[:, 1])
    print(f"bottom half of nodes carries {100 * frac:.1f}% of the value")


if __name__ == "__main__":
    main()
