"""46-feature extraction over the three graph roles plus embedding/annealing
features, dataset persistence (CSV) and deterministic train/test splitting.

Feature schema (fixed order): 13 structural/spectral features for each of
input, unembedded, and embedded graphs; triangle counts for input and
unembedded; then chain statistics, chain strength, and annealing time.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from cliquecast.anneal import AnnealOutcome
from cliquecast.chimera import EmbeddedProblem, embedded_graph
from cliquecast.graphs import Graph, graph_stats
from cliquecast.qubo import ProblemBundle
from cliquecast.spectral import extremal_eigenvalues, spectral_gap

ROLES = ("input", "unembedded", "embedded")
_ORDINALS = ("2nd", "3rd", "4th", "5th")

_PER_ROLE = (
    "density",
    "min_degree",
    "max_degree",
    "mean_degree",
    "num_nodes",
    "num_edges",
    "largest_eigenvalue",
    *(f"{o}_largest_eigenvalue" for o in _ORDINALS),
    "smallest_eigenvalue",
    "spectral_gap",
)

FEATURE_NAMES: tuple[str, ...] = tuple(
    [f"{role}_{name}" for role in ROLES for name in _PER_ROLE]
    + ["input_num_triangles", "unembedded_num_triangles"]
    + ["min_chain_length", "max_chain_length", "avg_chain_length",
       "chain_strength", "annealing_time"]
)

NUM_FEATURES = len(FEATURE_NAMES)
assert NUM_FEATURES == 46

LABEL_COLUMNS = ("solvable", "annealer_clique_size", "exact_clique_size")


class DatasetSchemaError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureRecord:
    graph_id: str
    features: dict[str, float]
    solvable: bool
    annealer_clique_size: int
    exact_clique_size: int

    def __post_init__(self):
        if tuple(self.features.keys()) != FEATURE_NAMES:
            raise DatasetSchemaError(
                f"expected the {NUM_FEATURES} canonical feature keys in order"
            )

    def vector(self) -> np.ndarray:
        return np.array([self.features[k] for k in FEATURE_NAMES], dtype=np.float64)


def _role_features(role: str, g: Graph) -> dict[str, float]:
    stats = graph_stats(g)
    summary = extremal_eigenvalues(g, k=5)
    out = {
        f"{role}_density": stats.density,
        f"{role}_min_degree": float(stats.min_degree),
        f"{role}_max_degree": float(stats.max_degree),
        f"{role}_mean_degree": stats.mean_degree,
        f"{role}_num_nodes": float(stats.num_nodes),
        f"{role}_num_edges": float(stats.num_edges),
        f"{role}_largest_eigenvalue": summary.largest_eigenvalues[0],
    }
    for ordinal, value in zip(_ORDINALS, summary.largest_eigenvalues[1:]):
        out[f"{role}_{ordinal}_largest_eigenvalue"] = value
    out[f"{role}_smallest_eigenvalue"] = summary.smallest_eigenvalue
    out[f"{role}_spectral_gap"] = spectral_gap(summary)
    return out


def extract_features(
    g: Graph, bundle: ProblemBundle, ep: EmbeddedProblem, annealing_time: float
) -> dict[str, float]:
    """The 46 features for one instance, keyed in canonical order."""
    p_prime = embedded_graph(ep)
    values: dict[str, float] = {}
    values.update(_role_features("input", g))
    values.update(_role_features("unembedded", bundle.unembedded_graph))
    values.update(_role_features("embedded", p_prime))
    values["input_num_triangles"] = float(graph_stats(g).num_triangles)
    values["unembedded_num_triangles"] = float(
        graph_stats(bundle.unembedded_graph).num_triangles
    )
    lengths = [len(ep.embedding.chains[v]) for v in range(ep.logical_count)]
    values["min_chain_length"] = float(min(lengths))
    values["max_chain_length"] = float(max(lengths))
    values["avg_chain_length"] = float(np.mean(lengths))
    values["chain_strength"] = ep.chain_strength
    values["annealing_time"] = float(annealing_time)
    return {k: values[k] for k in FEATURE_NAMES}


def assemble_record(
    graph_id: str, outcome: AnnealOutcome, exact: int, features: dict[str, float]
) -> FeatureRecord:
    if exact < outcome.best_clique_size:
        raise RuntimeError(
            f"{graph_id}: annealer clique {outcome.best_clique_size} exceeds "
            f"exact maximum {exact}"
        )
    return FeatureRecord(
        graph_id=graph_id,
        features=features,
        solvable=outcome.best_clique_size == exact,
        annealer_clique_size=outcome.best_clique_size,
        exact_clique_size=exact,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_dataset(path, records: list[FeatureRecord], meta: dict | None = None) -> None:
    """CSV with a header row; floats carry 17 significant digits so the
    round trip is bit-exact. Optional sidecar metadata at <path>.meta.json."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["graph_id", *FEATURE_NAMES, *LABEL_COLUMNS])
        for rec in records:
            writer.writerow(
                [rec.graph_id]
                + [_fmt(rec.features[k]) for k in FEATURE_NAMES]
                + [int(rec.solvable), rec.annealer_clique_size, rec.exact_clique_size]
            )
    if meta is not None:
        with open(str(path) + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2)
            fh.write("\n")


def read_dataset(path) -> list[FeatureRecord]:
    expected = ["graph_id", *FEATURE_NAMES, *LABEL_COLUMNS]
    records: list[FeatureRecord] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise DatasetSchemaError(f"{path}: header does not match the 46-feature schema")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise DatasetSchemaError(f"{path}: wrong column count on line {lineno}")
            try:
                features = {
                    k: float(v) for k, v in zip(FEATURE_NAMES, row[1 : 1 + NUM_FEATURES])
                }
                solvable, ann, exact = row[1 + NUM_FEATURES :]
                records.append(
                    FeatureRecord(
                        graph_id=row[0],
                        features=features,
                        solvable=bool(int(solvable)),
                        annealer_clique_size=int(ann),
                        exact_clique_size=int(exact),
                    )
                )
            except ValueError as exc:
                raise DatasetSchemaError(f"{path}: malformed row on line {lineno}") from exc
    return records


def split_train_test(
    records: list[FeatureRecord], train_fraction: float, seed
) -> tuple[list[FeatureRecord], list[FeatureRecord]]:
    """Seeded uniform shuffle, then split; disjoint and exhaustive."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    if len(records) < 2:
        raise ValueError("need at least 2 records to split")
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(len(records))
    cut = int(len(records) * train_fraction)
    train = [records[i] for i in order[:cut]]
    test = [records[i] for i in order[cut:]]
    return train, test
