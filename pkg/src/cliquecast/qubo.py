"""Quadratic models (QUBO/Ising), the Maximum Clique QUBO, and small-instance
brute-force minimization.

The Maximum Clique objective over binary x is
    -a * sum_i x_i + b * sum_{(i,j) in complement edges} x_i x_j
with defaults a=1, b=2; its minimum is -a times the maximum clique size and
every minimizer's support is a maximum clique.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cliquecast.graphs import Graph, complement

BRUTE_FORCE_VAR_LIMIT = 24
_CHUNK_BITS = 16

BINARY = "binary"
SPIN = "spin"


@dataclass(frozen=True)
class QuadraticModel:
    """Linear terms h_i and quadratic terms J_ij over binary or spin variables."""

    variable_space: str
    num_vars: int
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        if self.variable_space not in (BINARY, SPIN):
            raise ValueError(f"unknown variable space {self.variable_space!r}")
        canon_lin = {int(i): float(v) for i, v in self.linear.items() if v != 0.0}
        canon_quad = {}
        for (i, j), v in self.quadratic.items():
            if i == j:
                raise ValueError(f"self-pair ({i},{i}) in quadratic terms")
            key = (min(i, j), max(i, j))
            if key in canon_quad:
                raise ValueError(f"duplicate quadratic pair {key}")
            if v != 0.0:
                canon_quad[key] = float(v)
        for i in canon_lin:
            if not 0 <= i < self.num_vars:
                raise ValueError(f"linear index {i} out of range")
        for i, j in canon_quad:
            if not 0 <= i < self.num_vars or not 0 <= j < self.num_vars:
                raise ValueError(f"quadratic pair ({i},{j}) out of range")
        object.__setattr__(self, "linear", canon_lin)
        object.__setattr__(self, "quadratic", canon_quad)

    def structural_mean_degree(self) -> float:
        """Stored quadratic entries per variable (2|J| / num_vars)."""
        if self.num_vars == 0:
            return 0.0
        return 2.0 * len(self.quadratic) / self.num_vars


@dataclass(frozen=True)
class ProblemBundle:
    """Input graph G, unembedded graph P (complement structure), and the QUBO."""

    input_graph: Graph
    unembedded_graph: Graph
    model: QuadraticModel


def build_max_clique_qubo(g: Graph, a: float = 1.0, b: float = 2.0) -> ProblemBundle:
    if a <= 0:
        raise ValueError("a must be positive")
    if b <= a:
        raise ValueError("b must exceed a (penalty dominance)")
    comp = complement(g)
    model = QuadraticModel(
        variable_space=BINARY,
        num_vars=g.n,
        linear={i: -a for i in range(g.n)},
        quadratic={e: b for e in comp.edges},
    )
    return ProblemBundle(input_graph=g, unembedded_graph=comp, model=model)


def to_ising(m: QuadraticModel) -> QuadraticModel:
    """Convert a binary model to spin space via x = (1 + s) / 2, energy-exact."""
    if m.variable_space != BINARY:
        raise ValueError("to_ising expects a binary model")
    linear = {i: 0.0 for i in range(m.num_vars)}
    offset = m.offset
    for i, h in m.linear.items():
        linear[i] += h / 2.0
        offset += h / 2.0
    quadratic = {}
    for (i, j), jij in m.quadratic.items():
        quadratic[(i, j)] = jij / 4.0
        linear[i] += jij / 4.0
        linear[j] += jij / 4.0
        offset += jij / 4.0
    return QuadraticModel(SPIN, m.num_vars, linear, quadratic, offset)


def _check_values(m: QuadraticModel, assignment: np.ndarray) -> None:
    allowed = {0, 1} if m.variable_space == BINARY else {-1, 1}
    bad = set(np.unique(assignment)) - allowed
    if bad:
        raise ValueError(f"values {sorted(bad)} invalid for {m.variable_space} space")


def energy(m: QuadraticModel, assignment) -> float:
    v = np.asarray(assignment)
    if v.shape != (m.num_vars,):
        raise ValueError(f"assignment length {v.shape} != num_vars {m.num_vars}")
    _check_values(m, v)
    e = m.offset
    for i, h in m.linear.items():
        e += h * v[i]
    for (i, j), jij in m.quadratic.items():
        e += jij * v[i] * v[j]
    return float(e)


def _assignment_block(num_vars: int, start: int, stop: int, spin: bool) -> np.ndarray:
    """Rows start..stop-1 of the lexicographic assignment table (x_0 = MSB)."""
    idx = np.arange(start, stop, dtype=np.uint64)
    shifts = np.arange(num_vars - 1, -1, -1, dtype=np.uint64)
    bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.float64)
    if spin:
        bits = 2.0 * bits - 1.0
    return bits


def energies_of_block(m: QuadraticModel, block: np.ndarray) -> np.ndarray:
    e = np.full(block.shape[0], m.offset, dtype=np.float64)
    for i, h in m.linear.items():
        e += h * block[:, i]
    for (i, j), jij in m.quadratic.items():
        e += jij * block[:, i] * block[:, j]
    return e


def brute_force_minimum(m: QuadraticModel) -> tuple[float, list[tuple[int, ...]]]:
    """Exact minimum and all minimizers, lexicographically ordered.

    Refuses models beyond BRUTE_FORCE_VAR_LIMIT variables.
    """
    if m.num_vars > BRUTE_FORCE_VAR_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_VAR_LIMIT} variables")
    if m.num_vars == 0:
        return m.offset, [()]
    spin = m.variable_space == SPIN
    total = 1 << m.num_vars
    chunk = 1 << _CHUNK_BITS
    best = np.inf
    minimizers: list[tuple[int, ...]] = []
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        block = _assignment_block(m.num_vars, start, stop, spin)
        e = energies_of_block(m, block)
        lo = e.min()
        if lo < best - 1e-12:
            best = lo
            minimizers = []
        hits = np.nonzero(np.abs(e - best) <= 1e-12)[0]
        minimizers.extend(tuple(int(x) for x in block[i]) for i in hits)
    return float(best), minimizers
