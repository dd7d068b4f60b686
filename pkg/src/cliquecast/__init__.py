"""Workbench for predicting annealer accuracy on Maximum Clique instances.

Pipeline: random graph generation -> Max-Clique QUBO -> Chimera clique
embedding -> (simulated) annealing -> labeling against an exact solver ->
46-feature extraction -> decision-tree classification and gradient-boosted
clique-size regression.
"""

from cliquecast.graphs import Graph, GraphStats, complement, graph_stats, sample_erdos_renyi
from cliquecast.qubo import ProblemBundle, QuadraticModel, build_max_clique_qubo

__all__ = [
    "Graph",
    "GraphStats",
    "ProblemBundle",
    "QuadraticModel",
    "build_max_clique_qubo",
    "complement",
    "graph_stats",
    "sample_erdos_renyi",
]

__version__ = "0.1.0"
