"""Extremal adjacency eigenvalues and the spectral gap.

Eigenvalues are ordered algebraically (by signed value). The spectral gap is
the difference of the moduli of the two algebraically largest eigenvalues.
Dense symmetric eigendecomposition is used up to DENSE_LIMIT vertices; larger
graphs fall back to an iterative extremal-eigenvalue solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from cliquecast.graphs import Graph

DENSE_LIMIT = 1_500
PAD_VALUE = 0.0


class EigensolverError(RuntimeError):
    """Iterative eigensolver failed to converge within its budget."""


@dataclass(frozen=True)
class SpectralSummary:
    """k algebraically largest eigenvalues (descending) plus the smallest."""

    largest_eigenvalues: tuple[float, ...]
    smallest_eigenvalue: float

    @property
    def spectral_gap(self) -> float:
        return spectral_gap(self)


def _sparse_adjacency(g: Graph) -> sp.csr_matrix:
    if not g.edges:
        return sp.csr_matrix((g.n, g.n), dtype=np.float64)
    rows = [u for u, _ in g.edges] + [v for _, v in g.edges]
    cols = [v for _, v in g.edges] + [u for u, _ in g.edges]
    data = np.ones(2 * g.num_edges, dtype=np.float64)
    return sp.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def _iterative_extremes(g: Graph, k: int) -> tuple[np.ndarray, float]:
    a = _sparse_adjacency(g)
    try:
        top = spla.eigsh(a, k=min(k, g.n - 1), which="LA", return_eigenvectors=False)
        bottom = spla.eigsh(a, k=1, which="SA", return_eigenvectors=False)
    except (spla.ArpackNoConvergence, spla.ArpackError) as exc:
        raise EigensolverError(f"ARPACK failed on graph with n={g.n}") from exc
    return np.sort(top)[::-1], float(bottom[0])


def extremal_eigenvalues(g: Graph, k: int = 5) -> SpectralSummary:
    """k algebraically largest eigenvalues plus the smallest one.

    If the graph has fewer than k vertices the list is padded with 0 so that
    feature vectors keep a fixed width.
    """
    if g.n < 1:
        raise ValueError("graph must have at least one vertex")
    if not 1 <= k <= max(g.n, k):
        raise ValueError("k must be >= 1")
    if g.n <= DENSE_LIMIT:
        spectrum = np.linalg.eigvalsh(g.adjacency_matrix())  # ascending
        top = spectrum[::-1][: min(k, g.n)]
        smallest = float(spectrum[0])
    else:
        top, smallest = _iterative_extremes(g, k)
    values = [float(x) for x in top]
    values += [PAD_VALUE] * (k - len(values))
    return SpectralSummary(tuple(values), smallest)


def spectral_gap(s: SpectralSummary) -> float:
    """|lambda_1| - |lambda_2| over the two algebraically largest eigenvalues."""
    if len(s.largest_eigenvalues) < 2:
        raise ValueError("spectral gap needs at least two eigenvalues")
    l1, l2 = s.largest_eigenvalues[0], s.largest_eigenvalues[1]
    return abs(l1) - abs(l2)
