"""Ideal Chimera topology, deterministic clique minor embedding, chain-strength
heuristics, and construction of the embedded spin problem.

Qubit numbering: id = 8*(row*m + col) + 4*side + offset, where side 0 is the
vertical shore of a unit cell and side 1 the horizontal shore. Each unit cell
is a complete bipartite 4+4 block; vertical qubits couple to the cell below,
horizontal qubits to the cell on the right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from cliquecast.graphs import Graph
from cliquecast.qubo import SPIN, QuadraticModel


class EmbeddingError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChimeraSpec:
    """m x m grid of complete-bipartite 4+4 unit cells (ideal, no dead qubits)."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("grid size m must be >= 1")

    @property
    def num_qubits(self) -> int:
        return 8 * self.m * self.m

    @property
    def num_couplers(self) -> int:
        return 16 * self.m * self.m + 8 * self.m * (self.m - 1)

    def qubit_id(self, row: int, col: int, side: int, offset: int) -> int:
        return 8 * (row * self.m + col) + 4 * side + offset

    def coordinates(self, qubit: int) -> tuple[int, int, int, int]:
        cell, rem = divmod(qubit, 8)
        row, col = divmod(cell, self.m)
        side, offset = divmod(rem, 4)
        return row, col, side, offset

    def has_edge(self, a: int, b: int) -> bool:
        if a == b or not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
            return False
        ra, ca, sa, oa = self.coordinates(a)
        rb, cb, sb, ob = self.coordinates(b)
        if (ra, ca) == (rb, cb):
            return sa != sb
        if sa != sb:
            return False
        if sa == 0:  # vertical qubits couple along a column
            return ca == cb and abs(ra - rb) == 1 and oa == ob
        return ra == rb and abs(ca - cb) == 1 and oa == ob

    def edges(self):
        """All couplers, each yielded once as an ordered pair."""
        for row in range(self.m):
            for col in range(self.m):
                for ov in range(4):
                    v = self.qubit_id(row, col, 0, ov)
                    for oh in range(4):
                        yield (min(v, self.qubit_id(row, col, 1, oh)),
                               max(v, self.qubit_id(row, col, 1, oh)))
                    if row + 1 < self.m:
                        yield (v, self.qubit_id(row + 1, col, 0, ov))
                for oh in range(4):
                    if col + 1 < self.m:
                        h = self.qubit_id(row, col, 1, oh)
                        yield (h, self.qubit_id(row, col + 1, 1, oh))


def build_chimera(m: int) -> ChimeraSpec:
    return ChimeraSpec(m)


@dataclass(frozen=True)
class Embedding:
    """One chain (connected qubit set) per logical vertex, pairwise disjoint."""

    chimera: ChimeraSpec
    chains: tuple[frozenset[int], ...]

    @property
    def num_logical(self) -> int:
        return len(self.chains)

    def chain_lengths(self) -> list[int]:
        return [len(c) for c in self.chains]


def staircase_clique_embedding(spec: ChimeraSpec, k: int) -> Embedding:
    """Deterministic complete-graph embedding with uniform chains of length m+1.

    Logical vertex v = 4t + j occupies the vertical qubits of column t down to
    row t plus the horizontal qubits of row t from column t rightwards, all at
    offset j. Capacity is 4m chains.
    """
    if not 1 <= k <= 4 * spec.m:
        raise EmbeddingError(f"k={k} exceeds staircase capacity 4*m={4 * spec.m}")
    chains = []
    for v in range(k):
        t, j = divmod(v, 4)
        chain = {spec.qubit_id(r, t, 0, j) for r in range(t + 1)}
        chain |= {spec.qubit_id(t, c, 1, j) for c in range(t, spec.m)}
        chains.append(frozenset(chain))
    return Embedding(spec, tuple(chains))


@dataclass(frozen=True)
class ValidationReport:
    disjointness_violations: tuple[str, ...]
    connectivity_violations: tuple[str, ...]
    coupler_violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not (
            self.disjointness_violations
            or self.connectivity_violations
            or self.coupler_violations
        )


def _chain_connected(spec: ChimeraSpec, chain: frozenset[int]) -> bool:
    if not chain:
        return False
    nodes = sorted(chain)
    seen = {nodes[0]}
    frontier = [nodes[0]]
    while frontier:
        q = frontier.pop()
        for other in nodes:
            if other not in seen and spec.has_edge(q, other):
                seen.add(other)
                frontier.append(other)
    return len(seen) == len(chain)


def couplers_between(spec: ChimeraSpec, a: frozenset[int], b: frozenset[int]):
    """Available physical couplers between two chains, sorted ascending."""
    found = []
    for qa in sorted(a):
        for qb in sorted(b):
            if spec.has_edge(qa, qb):
                found.append((min(qa, qb), max(qa, qb)))
    return sorted(set(found))


def validate_embedding(spec: ChimeraSpec, emb: Embedding, p: Graph) -> ValidationReport:
    """Check disjointness, per-chain connectivity, and coupler availability
    for every edge of the logical graph p. Violations are report content."""
    disjoint: list[str] = []
    connect: list[str] = []
    couplers: list[str] = []
    seen: dict[int, int] = {}
    for v, chain in enumerate(emb.chains):
        for q in sorted(chain):
            if not 0 <= q < spec.num_qubits:
                connect.append(f"chain {v}: qubit {q} out of range")
            elif q in seen:
                disjoint.append(f"qubit {q} shared by chains {seen[q]} and {v}")
            else:
                seen[q] = v
        if not _chain_connected(spec, chain):
            connect.append(f"chain {v} is not connected ({len(chain)} qubits)")
    for u, v in p.edges:
        if u >= emb.num_logical or v >= emb.num_logical:
            couplers.append(f"logical edge ({u},{v}) outside embedding")
        elif not couplers_between(spec, emb.chains[u], emb.chains[v]):
            couplers.append(f"no coupler available for logical edge ({u},{v})")
    return ValidationReport(tuple(disjoint), tuple(connect), tuple(couplers))


def utc_chain_strength(logical_ising: QuadraticModel, prefactor: float) -> float:
    """Uniform-torque-compensation chain strength:
    prefactor * RMS(quadratic coefficients) * sqrt(mean structural degree).
    Falls back to 1.0 when the model has no quadratic terms."""
    if logical_ising.variable_space != SPIN:
        raise ValueError("chain strength is computed on the spin-space model")
    if prefactor <= 0:
        raise ValueError("prefactor must be positive")
    if not logical_ising.quadratic:
        return 1.0
    values = np.array(list(logical_ising.quadratic.values()))
    rms = float(np.sqrt(np.mean(values**2)))
    return prefactor * rms * float(np.sqrt(logical_ising.structural_mean_degree()))


@dataclass(frozen=True)
class EmbeddedProblem:
    """Spin model over the active qubits, densely relabeled 0..q-1.

    active_qubits maps dense index -> Chimera qubit id (ascending). Chain and
    logical coupler structure is kept explicitly so the embedded graph stays
    well defined even at chain strength zero.
    """

    model: QuadraticModel
    chain_strength: float
    embedding: Embedding
    logical_count: int
    active_qubits: tuple[int, ...]
    chain_edges: tuple[tuple[int, int], ...]
    logical_coupler_edges: tuple[tuple[int, int], ...]

    def dense_chains(self) -> list[list[int]]:
        """Chains expressed in dense active-qubit indices."""
        pos = {q: i for i, q in enumerate(self.active_qubits)}
        return [
            sorted(pos[q] for q in self.embedding.chains[v])
            for v in range(self.logical_count)
        ]


def embed_ising(
    logical_ising: QuadraticModel, emb: Embedding, chain_strength: float
) -> EmbeddedProblem:
    """Map a logical spin model onto the embedding.

    Linear terms split equally over each chain; each logical coupling goes on
    the lexicographically smallest available physical coupler; all intra-chain
    couplers get -chain_strength.
    """
    if logical_ising.variable_space != SPIN:
        raise ValueError("embed_ising expects a spin-space model")
    if chain_strength < 0:
        raise ValueError("chain strength must be >= 0")
    n = logical_ising.num_vars
    if n > emb.num_logical:
        raise EmbeddingError(f"{n} logical variables exceed {emb.num_logical} chains")
    spec = emb.chimera
    active = sorted(q for v in range(n) for q in emb.chains[v])
    pos = {q: i for i, q in enumerate(active)}

    linear = {pos[q]: 0.0 for q in active}
    for v in range(n):
        h = logical_ising.linear.get(v, 0.0)
        share = h / len(emb.chains[v])
        for q in emb.chains[v]:
            linear[pos[q]] += share

    quadratic: dict[tuple[int, int], float] = {}
    chain_edges: list[tuple[int, int]] = []
    for v in range(n):
        qs = sorted(emb.chains[v])
        for i, qa in enumerate(qs):
            for qb in qs[i + 1 :]:
                if spec.has_edge(qa, qb):
                    e = (pos[qa], pos[qb])
                    chain_edges.append(e)
                    quadratic[e] = -chain_strength

    logical_edges: list[tuple[int, int]] = []
    for (u, v), jij in sorted(logical_ising.quadratic.items()):
        avail = couplers_between(spec, emb.chains[u], emb.chains[v])
        if not avail:
            raise EmbeddingError(f"no coupler available for logical pair ({u},{v})")
        qa, qb = avail[0]
        e = (pos[qa], pos[qb])
        logical_edges.append(e)
        quadratic[e] = quadratic.get(e, 0.0) + jij

    model = QuadraticModel(SPIN, len(active), linear, quadratic, logical_ising.offset)
    return EmbeddedProblem(
        model=model,
        chain_strength=chain_strength,
        embedding=emb,
        logical_count=n,
        active_qubits=tuple(active),
        chain_edges=tuple(sorted(set(chain_edges))),
        logical_coupler_edges=tuple(sorted(set(logical_edges))),
    )


def embedded_graph(ep: EmbeddedProblem) -> Graph:
    """The embedded graph P': chain edges plus couplers carrying logical terms,
    over the densely relabeled active qubits."""
    edges = set(ep.chain_edges) | set(ep.logical_coupler_edges)
    return Graph(len(ep.active_qubits), tuple(sorted(edges)))


def save_embedding(path, emb: Embedding, meta: dict | None = None) -> None:
    doc = {"chimera_m": emb.chimera.m, "chains": [sorted(c) for c in emb.chains]}
    if meta is not None:
        doc["_meta"] = meta
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_embedding(path) -> Embedding:
    """Load an embedding file and validate it as a complete-graph embedding."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    spec = ChimeraSpec(int(doc["chimera_m"]))
    chains = tuple(frozenset(int(q) for q in chain) for chain in doc["chains"])
    emb = Embedding(spec, chains)
    from cliquecast.graphs import complete_graph

    report = validate_embedding(spec, emb, complete_graph(len(chains)))
    if not report.valid:
        problems = (
            report.disjointness_violations
            + report.connectivity_violations
            + report.coupler_violations
        )
        raise EmbeddingError(f"invalid embedding file {path}: " + "; ".join(problems))
    return emb
