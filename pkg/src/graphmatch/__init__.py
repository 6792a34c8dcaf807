"""graphmatch: error-tolerant graph matching.

Exact and approximate graph edit distance, structure-reducing contractions
(homeomorphic, degree-bounded, centrality-ranked), and a geometric distance
framework for plane graphs, plus IAM-style GXL/CXL dataset handling and a
small benchmarking CLI.
"""

from .graphs import AttributedGraph, GeometricGraph, random_graph

__all__ = ["AttributedGraph", "GeometricGraph", "random_graph"]
__version__ = "0.1.0"
