"""Exact maximum-clique oracle and clique validity checks.

max_clique_size runs a branch-and-bound over bitset vertex sets with pivot
selection and incumbent pruning; a configurable deadline turns pathological
instances into an explicit timeout instead of a wrong answer.
"""

from __future__ import annotations

import itertools
import time

from cliquecast.graphs import Graph

BRUTE_FORCE_NODE_LIMIT = 20
DEFAULT_DEADLINE_S = 60.0


class CliqueTimeout(RuntimeError):
    """Deadline exceeded while searching for the maximum clique."""


def is_clique(g: Graph, vertices) -> bool:
    """True iff every pair in the set is an edge; empty sets and singletons
    are vacuously cliques."""
    vs = sorted(set(vertices))
    if vs and (vs[0] < 0 or vs[-1] >= g.n):
        raise ValueError(f"vertex out of range for n={g.n}")
    edge_set = set(g.edges)
    return all((u, v) in edge_set for u, v in itertools.combinations(vs, 2))


def _adjacency_masks(g: Graph) -> list[int]:
    masks = [0] * g.n
    for u, v in g.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def max_clique_size(g: Graph, deadline_s: float = DEFAULT_DEADLINE_S) -> int:
    """Exact maximum clique size via pivoting branch-and-bound."""
    if g.n == 0:
        return 0
    adj = _adjacency_masks(g)
    start = time.monotonic()
    best = 1 if g.n else 0
    counter = 0

    def expand(size: int, candidates: int) -> None:
        nonlocal best, counter
        counter += 1
        if counter % 4096 == 0 and time.monotonic() - start > deadline_s:
            raise CliqueTimeout(f"max clique search exceeded {deadline_s} s")
        if candidates == 0:
            best = max(best, size)
            return
        if size + candidates.bit_count() <= best:
            return
        # pivot: candidate covering the most other candidates
        pivot, pivot_cover = -1, -1
        rest = candidates
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            cover = (candidates & adj[v]).bit_count()
            if cover > pivot_cover:
                pivot, pivot_cover = v, cover
        branch = candidates & ~adj[pivot]
        while branch:
            v = (branch & -branch).bit_length() - 1
            branch &= branch - 1
            candidates &= ~(1 << v)
            expand(size + 1, candidates & adj[v])
            if size + 1 + candidates.bit_count() <= best:
                return

    expand(0, (1 << g.n) - 1)
    return best


def max_clique_witness(g: Graph, deadline_s: float = DEFAULT_DEADLINE_S) -> list[int]:
    """One maximum clique (vertex list); size matches max_clique_size."""
    target = max_clique_size(g, deadline_s)
    adj = _adjacency_masks(g)

    def extend(chosen: list[int], candidates: int) -> list[int] | None:
        if len(chosen) == target:
            return chosen
        while candidates:
            v = (candidates & -candidates).bit_length() - 1
            candidates &= candidates - 1
            if len(chosen) + 1 + (candidates & adj[v]).bit_count() >= target:
                found = extend(chosen + [v], candidates & adj[v])
                if found:
                    return found
        return None

    return extend([], (1 << g.n) - 1) or []


def brute_force_max_clique(g: Graph) -> int:
    """Subset-enumeration oracle; refuses graphs beyond 20 vertices."""
    if g.n > BRUTE_FORCE_NODE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_NODE_LIMIT} vertices")
    adj = _adjacency_masks(g)
    best = 0
    for subset in range(1 << g.n):
        size = subset.bit_count()
        if size <= best:
            continue
        ok = True
        rest = subset
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if (subset & ~(1 << v)) & ~adj[v]:
                ok = False
                break
        if ok:
            best = size
    return best
