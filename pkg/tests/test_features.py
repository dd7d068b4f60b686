import numpy as np
import pytest

from cliquecast.anneal import AnnealOutcome
from cliquecast.chimera import (
    build_chimera,
    embed_ising,
    staircase_clique_embedding,
    utc_chain_strength,
)
from cliquecast.features import (
    FEATURE_NAMES,
    DatasetSchemaError,
    FeatureRecord,
    assemble_record,
    extract_features,
    read_dataset,
    split_train_test,
    write_dataset,
)
from cliquecast.graphs import complete_graph
from cliquecast.qubo import build_max_clique_qubo, to_ising
from tests.test_graphs import random_graph


@pytest.fixture(scope="module")
def embedding():
    return staircase_clique_embedding(build_chimera(4), 16)


def make_instance(g, embedding, annealing_time=100.0, prefactor=0.5):
    bundle = build_max_clique_qubo(g)
    ising = to_ising(bundle.model)
    ep = embed_ising(ising, embedding, utc_chain_strength(ising, prefactor))
    return bundle, ep, extract_features(g, bundle, ep, annealing_time)


def make_record(graph_id="g0", solvable=True, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    features = {k: float(rng.normal()) for k in FEATURE_NAMES}
    exact = 5
    ann = exact if solvable else exact - 1
    return FeatureRecord(graph_id, features, solvable, ann, exact)


class TestExtractFeatures:
    def test_exactly_46_canonical_keys(self, embedding):
        g = random_graph(10, 0.5, 3)
        _, _, features = make_instance(g, embedding)
        assert tuple(features.keys()) == FEATURE_NAMES
        assert len(features) == 46

    def test_complete_input_graph_has_empty_complement(self, embedding):
        _, _, features = make_instance(complete_graph(12), embedding)
        assert features["unembedded_num_edges"] == 0.0
        assert features["unembedded_density"] == 0.0
        assert features["input_density"] == 1.0

    def test_uniform_chain_statistics(self, embedding):
        g = random_graph(9, 0.5, 4)
        _, _, features = make_instance(g, embedding)
        assert features["min_chain_length"] == 5.0  # m + 1 on m=4
        assert features["max_chain_length"] == 5.0
        assert features["avg_chain_length"] == 5.0

    def test_annealing_parameters_recorded(self, embedding):
        g = random_graph(8, 0.5, 5)
        _, ep, features = make_instance(g, embedding, annealing_time=250.0)
        assert features["annealing_time"] == 250.0
        assert features["chain_strength"] == ep.chain_strength

    def test_edge_counts_partition_vertex_pairs(self, embedding):
        g = random_graph(11, 0.4, 6)
        _, _, features = make_instance(g, embedding)
        total = g.n * (g.n - 1) / 2
        assert features["input_num_edges"] + features["unembedded_num_edges"] == total


class TestAssembleRecord:
    def _features(self, embedding):
        g = random_graph(8, 0.6, 7)
        return make_instance(g, embedding)[2]

    def test_solvable_when_sizes_match(self, embedding):
        rec = assemble_record("g1", AnnealOutcome(4, None, 3), 4, self._features(embedding))
        assert rec.solvable
        assert rec.annealer_clique_size == 4

    def test_not_solvable_when_smaller(self, embedding):
        rec = assemble_record("g1", AnnealOutcome(3, None, 3), 4, self._features(embedding))
        assert not rec.solvable

    def test_zero_clique_target(self, embedding):
        rec = assemble_record("g1", AnnealOutcome(0, None, 0), 2, self._features(embedding))
        assert rec.annealer_clique_size == 0
        assert not rec.solvable

    def test_integrity_failure(self, embedding):
        with pytest.raises(RuntimeError):
            assemble_record("g1", AnnealOutcome(5, None, 1), 4, self._features(embedding))

    def test_rejects_wrong_keys(self):
        with pytest.raises(DatasetSchemaError):
            FeatureRecord("g1", {"a": 1.0}, True, 2, 2)


class TestDatasetRoundTrip:
    def test_bitwise_round_trip(self, tmp_path):
        records = [make_record(f"g{i}", solvable=i % 2 == 0, seed=i) for i in range(3)]
        path = tmp_path / "dataset.csv"
        write_dataset(path, records, meta={"master_seed": 11})
        loaded = read_dataset(path)
        assert loaded == records
        assert (tmp_path / "dataset.csv.meta.json").exists()

    def test_empty_is_header_only(self, tmp_path):
        path = tmp_path / "dataset.csv"
        write_dataset(path, [])
        assert path.read_text().count("\n") == 1
        assert read_dataset(path) == []

    def test_wrong_column_count_rejected(self, tmp_path):
        path = tmp_path / "dataset.csv"
        write_dataset(path, [make_record()])
        lines = path.read_text().splitlines()
        header = lines[0].split(",")
        dropped = [c for c in header if c != "input_density"]
        path.write_text(",".join(dropped) + "\n")
        with pytest.raises(DatasetSchemaError):
            read_dataset(path)

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "dataset.csv"
        write_dataset(path, [make_record()])
        with open(path, "a") as fh:
            fh.write("g9," + ",".join(["oops"] * 46) + ",1,2,2\n")
        with pytest.raises(DatasetSchemaError, match="line 3"):
            read_dataset(path)


class TestSplit:
    def test_ninety_ten(self):
        records = [make_record(f"g{i}", seed=i) for i in range(100)]
        train, test = split_train_test(records, 0.9, seed=1)
        assert (len(train), len(test)) == (90, 10)

    def test_deterministic(self):
        records = [make_record(f"g{i}", seed=i) for i in range(50)]
        a = split_train_test(records, 0.9, seed=5)
        b = split_train_test(records, 0.9, seed=5)
        assert a == b

    def test_partition_is_exhaustive_and_disjoint(self):
        records = [make_record(f"g{i}", seed=i) for i in range(37)]
        train, test = split_train_test(records, 0.8, seed=2)
        ids = sorted(r.graph_id for r in train + test)
        assert ids == sorted(r.graph_id for r in records)
        assert not {r.graph_id for r in train} & {r.graph_id for r in test}

    def test_validation(self):
        records = [make_record("g0"), make_record("g1")]
        with pytest.raises(ValueError):
            split_train_test(records, 1.0, seed=0)
        with pytest.raises(ValueError):
            split_train_test(records[:1], 0.9, seed=0)
