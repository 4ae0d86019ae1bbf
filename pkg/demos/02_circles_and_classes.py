"""Circle files, overlap classes and network summary statistics.

Reads the bundled fixture network, shows each supported circle format,
and walks the restrict -> threshold -> classify pipeline that splits
nodes into overlapping (OL, in two or more circles) and non-overlapping
(NOL) classes.
"""

from pathlib import Path

from overlap_spread import (
    Graph,
    classify_ol_nol,
    filter_min_circle_size,
    network_stats,
    parse_circles,
    parse_edge_list,
    restrict_circles,
)

DATA = Path(__file__).parent.parent / "tests" / "data"


def main():
    g = parse_edge_list((DATA / "net_a.edges").read_text())
    print(f"fixture A: n={g.n} m={g.m}")

    circles = parse_circles((DATA / "net_a.circles").read_text(), "ego-circles")
    for name, members in circles.circles.items():
        print(f"  circle {name}: {sorted(members)}")

    # the same content in the community-lines format: one circle per line
    community_text = "0 1 2 3 4 5\n4 5 6 7 8 9\n0 10 11 12 13\n"
    as_communities = parse_circles(community_text, "community-lines")
    print(f"community-lines parse gives {len(as_communities.circles)} circles "
          f"named {list(as_communities.circles)}")

    restricted = restrict_circles(circles, g)
    part = classify_ol_nol(restricted, g)
    print(f"\nOL nodes (two or more circles): {sorted(part.ol)}")
    print(f"NOL nodes: {sorted(part.nol)}")

    s = network_stats(g, part)
    print(f"stats: avg_degree={s.avg_degree:.3f} clustering={s.avg_clustering:.3f} "
          f"overlap={s.overlap_pct:.1f}%")

    # raising the minimum circle size reclassifies members of small circles
    for k in (1, 6, 7):
        kept = filter_min_circle_size(restricted, k)
        p = classify_ol_nol(kept, g)
        print(f"  min size {k}: {len(kept.circles)} circles, {p.s} OL / {p.t} NOL")


if __name__ == "__main__":
    main()
