"""Annealer backend interface with a seeded simulated-annealing reference
implementation, majority-vote unembedding, and read evaluation.

The reference backend runs independent Metropolis single-spin-flip annealing
per read on the embedded spin model, with a geometric inverse-temperature
schedule. Reads are fully deterministic given (seed, read index), so a read
set is reproducible and independent of execution order.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from cliquecast.chimera import EmbeddedProblem
from cliquecast.graphs import Graph

BETA_MIN_DEFAULT = 0.1
BETA_MAX_DEFAULT = 10.0
SWEEPS_PER_UNIT_DEFAULT = 1.0

_ANNEAL_STREAM = 0
_TIE_STREAM = 1


def stable_id_int(identifier: str) -> int:
    """Platform-independent 64-bit integer for a string id."""
    digest = hashlib.blake2b(identifier.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def derive_seed(*parts: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(tuple(int(p) for p in parts))


@njit(cache=True)
def _splitmix64(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def _anneal_reads(h, j_data, j_indices, j_indptr, betas, seeds):
    num_reads = seeds.shape[0]
    n = h.shape[0]
    out = np.empty((num_reads, n), dtype=np.int8)
    for r in range(num_reads):
        state = seeds[r]
        spins = out[r]
        for i in range(n):
            state, z = _splitmix64(state)
            spins[i] = 1 if (z >> np.uint64(63)) else -1
        for b in betas:
            for q in range(n):
                f = h[q]
                for k in range(j_indptr[q], j_indptr[q + 1]):
                    f += j_data[k] * spins[j_indices[k]]
                d_e = -2.0 * spins[q] * f
                if d_e <= 0.0:
                    spins[q] = -spins[q]
                else:
                    state, z = _splitmix64(state)
                    u = (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)
                    if u < np.exp(-b * d_e):
                        spins[q] = -spins[q]
    return out


@dataclass(frozen=True)
class AnnealRequest:
    problem: EmbeddedProblem
    num_reads: int
    annealing_time: float  # microseconds, typically in [1, 2000]
    seed: int

    def __post_init__(self):
        if self.num_reads < 1:
            raise ValueError("num_reads must be >= 1")
        if self.annealing_time < 1:
            raise ValueError("annealing_time must be >= 1")


@dataclass(frozen=True)
class Read:
    spins: tuple[int, ...]
    energy: float


@dataclass(frozen=True)
class LogicalRead:
    bits: tuple[int, ...]
    broken_chains: int


@dataclass(frozen=True)
class ReadSet:
    reads: tuple[Read, ...]
    logical_reads: tuple[LogicalRead, ...]

    @property
    def min_energy(self) -> float:
        return min(r.energy for r in self.reads)

    def broken_chain_rate(self, num_chains: int) -> float:
        if num_chains == 0:
            return 0.0
        total = sum(lr.broken_chains for lr in self.logical_reads)
        return total / (num_chains * len(self.logical_reads))


@dataclass(frozen=True)
class AnnealOutcome:
    best_clique_size: int
    best_assignment: tuple[int, ...] | None
    reads_with_valid_clique: int


def unembed_majority_vote(physical, chains, tie_seed) -> tuple[tuple[int, ...], int]:
    """Resolve each chain to its majority spin; exact balance falls to an
    unbiased coin flip drawn from tie_seed. Returns (bits, broken count)."""
    spins = np.asarray(physical)
    rng = np.random.Generator(np.random.PCG64(tie_seed))
    bits = []
    broken = 0
    for chain in chains:
        if len(chain) == 0:
            raise ValueError("chain with zero qubits")
        values = spins[list(chain)]
        up = int(np.sum(values == 1))
        down = len(chain) - up
        if up and down:
            broken += 1
        if up > down:
            bits.append(1)
        elif down > up:
            bits.append(0)
        else:
            bits.append(int(rng.integers(0, 2)))
    return tuple(bits), broken


def _csr_arrays(problem: EmbeddedProblem):
    n = problem.model.num_vars
    h = np.zeros(n, dtype=np.float64)
    for i, v in problem.model.linear.items():
        h[i] = v
    neighbors: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (i, j), v in problem.model.quadratic.items():
        neighbors[i].append((j, v))
        neighbors[j].append((i, v))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = []
    data = []
    for i in range(n):
        entries = sorted(neighbors[i])
        indptr[i + 1] = indptr[i] + len(entries)
        indices.extend(j for j, _ in entries)
        data.extend(v for _, v in entries)
    return (
        h,
        np.asarray(data, dtype=np.float64),
        np.asarray(indices, dtype=np.int64),
        indptr,
    )


def _read_energies(problem: EmbeddedProblem, spins: np.ndarray) -> np.ndarray:
    model = problem.model
    s = spins.astype(np.float64)
    e = np.full(s.shape[0], model.offset)
    if model.linear:
        idx = np.fromiter(model.linear.keys(), dtype=np.int64)
        val = np.fromiter(model.linear.values(), dtype=np.float64)
        e += s[:, idx] @ val
    if model.quadratic:
        qi = np.array([i for i, _ in model.quadratic], dtype=np.int64)
        qj = np.array([j for _, j in model.quadratic], dtype=np.int64)
        qv = np.fromiter(model.quadratic.values(), dtype=np.float64)
        e += (s[:, qi] * s[:, qj]) @ qv
    return e


@dataclass(frozen=True)
class SimulatedAnnealingBackend:
    """Reference backend: Metropolis simulated annealing, one independent and
    reproducible chain per read."""

    beta_min: float = BETA_MIN_DEFAULT
    beta_max: float = BETA_MAX_DEFAULT
    sweeps_per_unit: float = SWEEPS_PER_UNIT_DEFAULT

    name: str = field(default="simulated-annealing", init=False)

    def num_sweeps(self, annealing_time: float) -> int:
        return max(1, round(annealing_time * self.sweeps_per_unit))

    def sample(self, req: AnnealRequest) -> ReadSet:
        problem = req.problem
        if problem.model.num_vars == 0:
            raise ValueError("cannot sample an empty problem")
        h, j_data, j_indices, j_indptr = _csr_arrays(problem)
        sweeps = self.num_sweeps(req.annealing_time)
        betas = np.geomspace(self.beta_min, self.beta_max, sweeps)
        seeds = np.empty(req.num_reads, dtype=np.uint64)
        for r in range(req.num_reads):
            seeds[r] = derive_seed(req.seed, r, _ANNEAL_STREAM).generate_state(
                1, dtype=np.uint64
            )[0]
        spins = _anneal_reads(h, j_data, j_indices, j_indptr, betas, seeds)
        energies = _read_energies(problem, spins)
        chains = problem.dense_chains()
        reads = []
        logical = []
        for r in range(req.num_reads):
            reads.append(Read(tuple(int(s) for s in spins[r]), float(energies[r])))
            bits, broken = unembed_majority_vote(
                spins[r], chains, derive_seed(req.seed, r, _TIE_STREAM)
            )
            logical.append(LogicalRead(bits, broken))
        return ReadSet(tuple(reads), tuple(logical))


def evaluate_reads(rs: ReadSet, g: Graph, mode: str = "best") -> AnnealOutcome:
    """Score a read set against the input graph.

    mode="best" takes the largest valid clique over all reads; the stricter
    mode="lowest-energy" checks only the lowest-energy read.
    """
    if mode not in ("best", "lowest-energy"):
        raise ValueError(f"unknown evaluation mode {mode!r}")
    candidates = list(rs.logical_reads)
    if mode == "lowest-energy":
        best_idx = min(range(len(rs.reads)), key=lambda i: (rs.reads[i].energy, i))
        candidates = [rs.logical_reads[best_idx]]
    edge_set = set(g.edges)
    best_size = 0
    best_bits: tuple[int, ...] | None = None
    valid_count = 0
    for lr in candidates:
        if len(lr.bits) != g.n:
            raise ValueError("logical read length does not match graph size")
        chosen = [i for i, b in enumerate(lr.bits) if b]
        if any(
            (chosen[a], chosen[b]) not in edge_set
            for a in range(len(chosen))
            for b in range(a + 1, len(chosen))
        ):
            continue
        valid_count += 1
        if len(chosen) > best_size:
            best_size = len(chosen)
            best_bits = lr.bits
    return AnnealOutcome(best_size, best_bits, valid_count)
