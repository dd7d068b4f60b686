"""Undirected simple graphs: random sampling, complements, basic statistics.

The same Graph type plays three roles downstream: the original input graph,
the unembedded problem graph (complement structure of the QUBO), and the
embedded hardware subgraph.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

DEFAULT_RETRY_BUDGET = 10_000


class IsolatedVertexError(RuntimeError):
    """Raised when rejection sampling cannot avoid zero-degree vertices."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices 0..n-1 with a canonical edge set."""

    n: int
    edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        canon = sorted({(min(u, v), max(u, v)) for u, v in self.edges})
        for u, v in canon:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency_sets(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float64)
        for u, v in self.edges:
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self._edge_set()

    def _edge_set(self) -> frozenset[tuple[int, int]]:
        cached = getattr(self, "_edges_frozen", None)
        if cached is None:
            cached = frozenset(self.edges)
            object.__setattr__(self, "_edges_frozen", cached)
        return cached


@dataclass(frozen=True)
class GraphStats:
    density: float
    min_degree: int
    max_degree: int
    mean_degree: float
    num_nodes: int
    num_edges: int
    num_triangles: int


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def sample_erdos_renyi(n: int, p: float, seed, retry_budget: int = DEFAULT_RETRY_BUDGET) -> Graph:
    """Sample G(n, p) rejecting any draw with a zero-degree vertex.

    The whole graph is redrawn on rejection (preserving the conditional
    Erdos-Renyi distribution); deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = list(itertools.combinations(range(n), 2))
    for _ in range(retry_budget):
        mask = rng.random(len(pairs)) < p
        deg = np.zeros(n, dtype=np.int64)
        for (u, v), keep in zip(pairs, mask):
            if keep:
                deg[u] += 1
                deg[v] += 1
        if n >= 2 and deg.min() >= 1:
            return Graph(n, tuple(pair for pair, keep in zip(pairs, mask) if keep))
    raise IsolatedVertexError(
        f"could not sample G({n}, {p}) without zero-degree vertices "
        f"in {retry_budget} attempts"
    )


def complement(g: Graph) -> Graph:
    """Complement on the same vertex set; may contain zero-degree vertices."""
    present = set(g.edges)
    edges = tuple(
        (u, v) for u, v in itertools.combinations(range(g.n), 2) if (u, v) not in present
    )
    return Graph(g.n, edges)


def count_triangles(g: Graph) -> int:
    """Exact triangle count via sorted adjacency intersection."""
    adj = [sorted(s) for s in g.adjacency_sets()]
    adj_sets = [set(a) for a in adj]
    total = 0
    for u, v in g.edges:
        small, large = (u, v) if len(adj[u]) <= len(adj[v]) else (v, u)
        for w in adj[small]:
            if w > v and w in adj_sets[large]:
                total += 1
    return total


def graph_stats(g: Graph) -> GraphStats:
    deg = g.degrees()
    m = g.num_edges
    if g.n >= 2:
        density = 2.0 * m / (g.n * (g.n - 1))
    else:
        density = 0.0
    return GraphStats(
        density=density,
        min_degree=int(deg.min()) if g.n else 0,
        max_degree=int(deg.max()) if g.n else 0,
        mean_degree=float(deg.mean()) if g.n else 0.0,
        num_nodes=g.n,
        num_edges=m,
        num_triangles=count_triangles(g),
    )


def graph_record(graph_id: str, g: Graph, gen_seed: int, target_density: float) -> dict:
    return {
        "id": graph_id,
        "n": g.n,
        "edges": [list(e) for e in g.edges],
        "gen_seed": gen_seed,
        "target_density": target_density,
    }


def graph_from_record(rec: dict) -> Graph:
    return Graph(rec["n"], tuple((int(u), int(v)) for u, v in rec["edges"]))


def write_graphs(path, records: list[dict], meta: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_graphs(path) -> tuple[list[dict], dict]:
    records: list[dict] = []
    meta: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: malformed record on line {lineno}") from exc
            if "_meta" in rec:
                meta = rec["_meta"]
            else:
                records.append(rec)
    return records, meta
