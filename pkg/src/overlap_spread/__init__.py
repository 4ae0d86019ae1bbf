"""Influence spreading over social networks with overlapping-circle analysis."""

from .errors import BudgetExceededError, ManifestError, OverlapSpreadError, ParseError
from .graphio import (
    AttributeTable,
    CircleSet,
    Graph,
    NetworkStats,
    NodePartition,
    attribute_circles,
    classify_ol_nol,
    extract_ego_network,
    filter_min_circle_size,
    network_stats,
    parse_attributes,
    parse_circles,
    parse_edge_list,
    restrict_circles,
    select_ego_candidates,
    top_n_circles,
)
from .engine import (
    InfluenceMatrix,
    SpreadParams,
    compute_ism,
    load_matrix,
    remove_node,
    save_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeTable",
    "BudgetExceededError",
    "CircleSet",
    "Graph",
    "InfluenceMatrix",
    "ManifestError",
    "NetworkStats",
    "NodePartition",
    "OverlapSpreadError",
    "ParseError",
    "SpreadParams",
    "attribute_circles",
    "classify_ol_nol",
    "compute_ism",
    "extract_ego_network",
    "filter_min_circle_size",
    "load_matrix",
    "network_stats",
    "parse_attributes",
    "parse_circles",
    "parse_edge_list",
    "remove_node",
    "restrict_circles",
    "save_matrix",
    "select_ego_candidates",
    "top_n_circles",
    "__version__",
]
