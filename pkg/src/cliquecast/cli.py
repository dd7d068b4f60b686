"""End-to-end experiment driver.

Subcommands: gen, embed, solve, featurize, train, report, pipeline. Every
artifact embeds the configuration and master seed needed to regenerate it;
a fixed master seed yields byte-identical artifacts regardless of the number
of worker processes.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

import numpy as np

from cliquecast import __version__
from cliquecast.anneal import (
    AnnealRequest,
    SimulatedAnnealingBackend,
    evaluate_reads,
    stable_id_int,
)
from cliquecast.chimera import (
    EmbeddingError,
    build_chimera,
    embed_ising,
    embedded_graph,
    load_embedding,
    save_embedding,
    staircase_clique_embedding,
    utc_chain_strength,
)
from cliquecast.features import (
    DatasetSchemaError,
    FEATURE_NAMES,
    assemble_record,
    extract_features,
    read_dataset,
    split_train_test,
    write_dataset,
)
from cliquecast.graphs import (
    IsolatedVertexError,
    graph_from_record,
    graph_record,
    read_graphs,
    sample_erdos_renyi,
    write_graphs,
)
from cliquecast.learn import (
    BoostConfig,
    TreeConfig,
    classification_metrics,
    export_tree,
    fit_decision_tree,
    fit_gradient_boost,
    model_from_json,
    model_to_json,
    permutation_importance,
    predict_class_batch,
    predict_regression_batch,
    rmse,
    rounded_clique_prediction,
)
from cliquecast.oracle import CliqueTimeout, max_clique_size
from cliquecast.qubo import build_max_clique_qubo, to_ising

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_TIMEOUT = 4
EXIT_INVARIANT = 5

# per-instance seed streams
_GEN_STREAM = 0
_PARAM_STREAM = 1
_SOLVE_STREAM = 2
_SPLIT_STREAM = 3

# hardware results quoted for comparison; not reproducible with the
# simulated backend
REFERENCE_RESULTS = {
    "fixed": {
        "solvable_recall": 0.837,
        "not_solvable_recall": 0.841,
        "regression_rmse": 0.696,
    },
    "random": {
        "solvable_recall": 0.862,
        "not_solvable_recall": 0.847,
        "regression_rmse": 0.903,
    },
}

PRESETS = {
    "fixed": {
        "count": 1000, "n_min": 20, "n_max": 64, "d_min": 0.01, "d_max": 0.99,
        "m": 16, "reads": 1000, "time_mode": "fixed", "time": 100.0,
        "prefactor_mode": "fixed", "prefactor": 0.5,
    },
    "random": {
        "count": 1000, "n_min": 20, "n_max": 64, "d_min": 0.01, "d_max": 0.99,
        "m": 16, "reads": 1000, "time_mode": "random", "time_range": (1.0, 2000.0),
        "prefactor_mode": "random", "prefactor_range": (0.5, 3.0),
    },
    "desk": {
        "count": 2000, "n_min": 10, "n_max": 32, "d_min": 0.01, "d_max": 0.99,
        "m": 8, "reads": 100, "time_mode": "fixed", "time": 100.0,
        "prefactor_mode": "fixed", "prefactor": 0.5,
    },
}


class UsageError(Exception):
    pass


def _json_dump(path, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _seed_int(*parts) -> int:
    return int(np.random.SeedSequence(tuple(int(p) for p in parts)).generate_state(
        1, dtype=np.uint64)[0])


# --- gen ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    # (n, p) pairs whose rejection budget runs out (p too small to avoid
    # zero-degree vertices) are discarded and redrawn deterministically
    records = []
    for i in range(args.count):
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence((args.seed, i, _GEN_STREAM))))
        for attempt in range(100):
            n = int(rng.integers(args.n_min, args.n_max + 1))
            p = float(rng.uniform(args.density_min, args.density_max))
            gen_seed = _seed_int(args.seed, i, _GEN_STREAM, 1, attempt)
            try:
                g = sample_erdos_renyi(n, p, gen_seed, retry_budget=200)
            except IsolatedVertexError:
                continue
            break
        else:
            raise IsolatedVertexError(
                f"instance {i}: no viable (n, p) draw in 100 attempts")
        records.append(graph_record(f"g{i:06d}", g, gen_seed, p))
    meta = {
        "command": "gen", "master_seed": args.seed, "count": args.count,
        "n_range": [args.n_min, args.n_max],
        "density_range": [args.density_min, args.density_max],
        "version": __version__,
    }
    write_graphs(args.out, records, meta)
    return EXIT_OK


# --- embed -------------------------------------------------------------------


def cmd_embed(args) -> int:
    if args.embedding_file:
        emb = load_embedding(args.embedding_file)
    else:
        spec = build_chimera(args.m)
        emb = staircase_clique_embedding(spec, args.k if args.k else 4 * args.m)
    meta = {"command": "embed", "m": emb.chimera.m, "chains": emb.num_logical,
            "version": __version__}
    save_embedding(args.out, emb, meta)
    return EXIT_OK


# --- solve -------------------------------------------------------------------


def _draw_params(master_seed: int, graph_id: str, cfg: dict) -> tuple[float, float]:
    """Per-instance annealing time and UTC prefactor (fixed or seeded draws)."""
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((master_seed, stable_id_int(graph_id), _PARAM_STREAM))))
    if cfg["time_mode"] == "random":
        lo, hi = cfg["time_range"]
        annealing_time = float(rng.uniform(lo, hi))
    else:
        annealing_time = float(cfg["time"])
    if cfg["prefactor_mode"] == "random":
        lo, hi = cfg["prefactor_range"]
        prefactor = float(rng.uniform(lo, hi))
    else:
        prefactor = float(cfg["prefactor"])
    return annealing_time, prefactor


def _solve_one(task) -> dict:
    rec, emb, cfg, master_seed = task
    g = graph_from_record(rec)
    bundle = build_max_clique_qubo(g, cfg["a"], cfg["b"])
    ising = to_ising(bundle.model)
    annealing_time, prefactor = _draw_params(master_seed, rec["id"], cfg)
    chain_strength = utc_chain_strength(ising, prefactor)
    ep = embed_ising(ising, emb, chain_strength)
    seed = _seed_int(master_seed, stable_id_int(rec["id"]), _SOLVE_STREAM)
    backend = SimulatedAnnealingBackend(sweeps_per_unit=cfg["sweeps_per_unit"])
    rs = backend.sample(AnnealRequest(ep, cfg["reads"], annealing_time, seed))
    outcome = evaluate_reads(rs, g, mode=cfg["mode"])
    exact = max_clique_size(g, deadline_s=cfg["deadline"])
    if outcome.best_clique_size > exact:
        raise RuntimeError(
            f"{rec['id']}: annealer clique exceeds exact maximum (invariant)")
    return {
        "graph_id": rec["id"],
        "annealing_time": annealing_time,
        "utc_prefactor": prefactor,
        "chain_strength": chain_strength,
        "num_reads": cfg["reads"],
        "best_clique_size": outcome.best_clique_size,
        "reads_with_valid_clique": outcome.reads_with_valid_clique,
        "min_energy": rs.min_energy,
        "broken_chain_rate": rs.broken_chain_rate(ep.logical_count),
        "backend": backend.name,
        "seed": seed,
        "exact_clique_size": exact,
    }


def _run_solve(graphs_path, embedding_path, out_path, master_seed, cfg, jobs=1) -> None:
    records, _ = read_graphs(graphs_path)
    emb = load_embedding(embedding_path)
    capacity = emb.num_logical
    for rec in records:
        if rec["n"] > capacity:
            raise UsageError(
                f"graph {rec['id']} has {rec['n']} vertices but the embedding "
                f"holds only {capacity} chains")
    tasks = [(rec, emb, cfg, master_seed) for rec in records]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve_one, tasks, chunksize=8))
    else:
        results = [_solve_one(t) for t in tasks]
    results.sort(key=lambda r: r["graph_id"])
    meta = {"command": "solve", "master_seed": master_seed, "version": __version__,
            "config": {k: v for k, v in cfg.items()}}
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for r in results:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


def _solve_cfg_from_args(args) -> dict:
    if args.time_range and args.time:
        raise UsageError("--time and --time-range are mutually exclusive")
    if args.prefactor_range and args.prefactor:
        raise UsageError("--prefactor and --prefactor-range are mutually exclusive")
    cfg = {
        "a": 1.0, "b": 2.0,
        "reads": args.reads,
        "mode": args.mode,
        "deadline": args.deadline,
        "sweeps_per_unit": args.sweeps_per_unit,
    }
    if args.time_range:
        cfg["time_mode"] = "random"
        cfg["time_range"] = tuple(args.time_range)
    else:
        cfg["time_mode"] = "fixed"
        cfg["time"] = args.time if args.time else 100.0
    if args.prefactor_range:
        cfg["prefactor_mode"] = "random"
        cfg["prefactor_range"] = tuple(args.prefactor_range)
    else:
        cfg["prefactor_mode"] = "fixed"
        cfg["prefactor"] = args.prefactor if args.prefactor else 0.5
    return cfg


def cmd_solve(args) -> int:
    cfg = _solve_cfg_from_args(args)
    _run_solve(args.graphs, args.embedding, args.out, args.seed, cfg, args.jobs)
    return EXIT_OK


# --- featurize ---------------------------------------------------------------


def read_results(path) -> tuple[list[dict], dict]:
    results = []
    meta: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetSchemaError(
                    f"{path}: malformed result on line {lineno}") from exc
            if "_meta" in rec:
                meta = rec["_meta"]
            else:
                results.append(rec)
    return results, meta


def _featurize_one(task):
    rec, res, emb = task
    from cliquecast.anneal import AnnealOutcome

    g = graph_from_record(rec)
    bundle = build_max_clique_qubo(g)
    ising = to_ising(bundle.model)
    ep = embed_ising(ising, emb, res["chain_strength"])
    features = extract_features(g, bundle, ep, res["annealing_time"])
    outcome = AnnealOutcome(res["best_clique_size"], None,
                            res["reads_with_valid_clique"])
    return assemble_record(rec["id"], outcome, res["exact_clique_size"], features)


def _run_featurize(graphs_path, results_path, embedding_path, out_path,
                   jobs=1) -> None:
    graph_recs, gmeta = read_graphs(graphs_path)
    results, rmeta = read_results(results_path)
    emb = load_embedding(embedding_path)
    by_id = {r["graph_id"]: r for r in results}
    missing = [rec["id"] for rec in graph_recs if rec["id"] not in by_id]
    if missing:
        raise DatasetSchemaError(f"results missing for graphs: {missing[:5]}")
    tasks = [(rec, by_id[rec["id"]], emb) for rec in graph_recs]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_featurize_one, tasks, chunksize=8))
    else:
        records = [_featurize_one(t) for t in tasks]
    records.sort(key=lambda r: r.graph_id)
    meta = {
        "command": "featurize",
        "master_seed": rmeta.get("master_seed"),
        "backend_config": rmeta.get("config"),
        "gen": gmeta,
        "embedding_file": Path(embedding_path).name,
        "counts": {
            "instances": len(records),
            "solvable": sum(1 for r in records if r.solvable),
        },
        "version": __version__,
    }
    write_dataset(out_path, records, meta)


def cmd_featurize(args) -> int:
    _run_featurize(args.graphs, args.results, args.embedding, args.out, args.jobs)
    return EXIT_OK


# --- train -------------------------------------------------------------------


def _design_matrix(records, feature_subset):
    idx = [FEATURE_NAMES.index(f) for f in feature_subset]
    x = np.array([r.vector() for r in records], dtype=np.float64)[:, idx]
    return x


def _feature_subset(exclude: list[str]) -> tuple[str, ...]:
    unknown = [f for f in exclude if f not in FEATURE_NAMES]
    if unknown:
        raise UsageError(f"unknown features in --exclude-features: {unknown}")
    return tuple(f for f in FEATURE_NAMES if f not in exclude)


def _run_train(dataset_path, task, seed, exclude, model_out, report_out,
               train_fraction=0.9, importance_repeats=5) -> dict:
    records = read_dataset(dataset_path)
    subset = _feature_subset(exclude)
    train, test = split_train_test(records, train_fraction,
                                   np.random.SeedSequence((seed, _SPLIT_STREAM)))
    x_train = _design_matrix(train, subset)
    x_test = _design_matrix(test, subset)
    report: dict = {
        "task": task,
        "dataset": Path(dataset_path).name,  # name only, so reruns in
        # different directories produce byte-identical reports
        "master_seed": seed,
        "train_fraction": train_fraction,
        "excluded_features": list(exclude),
        "counts": {"train": len(train), "test": len(test)},
        "reference_hardware_results": REFERENCE_RESULTS,
        "version": __version__,
    }
    if task == "classify":
        y_train = np.array([int(r.solvable) for r in train])
        y_test = np.array([int(r.solvable) for r in test])
        model = fit_decision_tree(x_train, y_train, TreeConfig(seed=seed), subset)
        metrics = classification_metrics(y_test, predict_class_batch(model, x_test))
        report["confusion_matrix"] = [list(row) for row in metrics.matrix]
        report["recall_not_solvable"] = metrics.recall_not_solvable
        report["recall_solvable"] = metrics.recall_solvable
        report["balanced_accuracy"] = metrics.balanced_accuracy
        report["solvable_fraction"] = float(np.mean([int(r.solvable) for r in records]))
        importances = permutation_importance(
            model, x_test, y_test, "balanced_accuracy",
            repeats=importance_repeats, seed=seed)
    else:
        y_train = np.array([r.annealer_clique_size for r in train], dtype=np.float64)
        y_test = np.array([r.annealer_clique_size for r in test], dtype=np.float64)
        model = fit_gradient_boost(x_train, y_train, BoostConfig(seed=seed), subset)
        pred = predict_regression_batch(model, x_test)
        report["rmse"] = rmse(y_test, pred)
        importances = permutation_importance(
            model, x_test, y_test, "rmse", repeats=importance_repeats, seed=seed)
    report["permutation_importances"] = {
        k: importances[k]
        for k in sorted(importances, key=lambda f: (-importances[f], f))
    }
    with open(model_out, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))
    _json_dump(report_out, report)
    return report


def cmd_train(args) -> int:
    exclude = [f for f in (args.exclude_features or "").split(",") if f]
    _run_train(args.dataset, args.task, args.seed, exclude, args.model_out,
               args.report_out)
    return EXIT_OK


# --- report ------------------------------------------------------------------


def _render_report(model, records, report: dict, out_dir: Path) -> None:
    from cliquecast.learn import DecisionTreeModel, GradientBoostModel

    lines: list[str] = []
    lines.append("cliquecast evaluation report")
    lines.append("=" * 60)
    lines.append(f"task: {report.get('task')}")
    lines.append(f"dataset: {report.get('dataset')}")
    lines.append(f"master seed: {report.get('master_seed')}")
    lines.append("")
    if isinstance(model, DecisionTreeModel):
        (out_dir / "tree.txt").write_text(export_tree(model, "text"), encoding="utf-8")
        (out_dir / "tree.dot").write_text(export_tree(model, "dot"), encoding="utf-8")
        cm = report["confusion_matrix"]
        lines.append("confusion matrix (rows actual, cols predicted; "
                     "order not-solvable, solvable):")
        lines.append(f"  not solvable   {cm[0][0]:>8} {cm[0][1]:>8}")
        lines.append(f"  solvable       {cm[1][0]:>8} {cm[1][1]:>8}")
        lines.append(f"recall (solvable):     {report['recall_solvable']:.4f}")
        lines.append(f"recall (not solvable): {report['recall_not_solvable']:.4f}")
        lines.append(f"balanced accuracy:     {report['balanced_accuracy']:.4f}")
    if isinstance(model, GradientBoostModel):
        subset = model.feature_names
        idx = [FEATURE_NAMES.index(f) for f in subset]
        x = np.array([r.vector() for r in records])[:, idx]
        truth = np.array([r.annealer_clique_size for r in records], dtype=np.float64)
        pred = predict_regression_batch(model, x)
        lines.append(f"regression RMSE (this dataset): {rmse(truth, pred):.4f}")
        with open(out_dir / "predictions.csv", "w", encoding="utf-8") as fh:
            fh.write("graph_id,true_clique_size,predicted_raw,predicted_rounded\n")
            for rec, t, p in zip(records, truth, pred):
                rounded = rounded_clique_prediction(
                    p, int(rec.features["input_num_nodes"]))
                fh.write(f"{rec.graph_id},{int(t)},{p:.17g},{rounded}\n")
        lines.append("predicted-vs-true table: predictions.csv")
    lines.append("")
    lines.append("permutation importance ranking (top 15):")
    for name, value in list(report["permutation_importances"].items())[:15]:
        lines.append(f"  {name:<40} {value:+.6f}")
    lines.append("")
    lines.append("reference hardware results (D-Wave 2000Q, quoted for comparison;")
    lines.append("not reproducible with the simulated backend):")
    for regime, vals in REFERENCE_RESULTS.items():
        lines.append(
            f"  {regime:<7} solvable recall {vals['solvable_recall']:.3f}, "
            f"not-solvable recall {vals['not_solvable_recall']:.3f}, "
            f"regression RMSE {vals['regression_rmse']:.3f}")
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_report(args) -> int:
    model = model_from_json(Path(args.model).read_text(encoding="utf-8"))
    records = read_dataset(args.dataset)
    report = json.loads(Path(args.train_report).read_text(encoding="utf-8"))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _render_report(model, records, report, out_dir)
    return EXIT_OK


# --- pipeline ----------------------------------------------------------------


def cmd_pipeline(args) -> int:
    preset = PRESETS[args.preset]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    count = args.count if args.count else preset["count"]
    reads = args.reads if args.reads else preset["reads"]
    seed = args.seed

    # gen
    gen_args = argparse.Namespace(
        count=count, n_min=preset["n_min"], n_max=preset["n_max"],
        density_min=preset["d_min"], density_max=preset["d_max"],
        seed=seed, out=out / "graphs.jsonl")
    cmd_gen(gen_args)

    # embed
    spec = build_chimera(preset["m"])
    emb = staircase_clique_embedding(spec, 4 * preset["m"])
    save_embedding(out / "embedding.json", emb,
                   {"command": "embed", "m": preset["m"], "master_seed": seed,
                    "version": __version__})

    # solve
    cfg = {
        "a": 1.0, "b": 2.0, "reads": reads, "mode": "best",
        "deadline": args.deadline, "sweeps_per_unit": args.sweeps_per_unit,
        "time_mode": preset["time_mode"],
        "prefactor_mode": preset["prefactor_mode"],
    }
    if preset["time_mode"] == "fixed":
        cfg["time"] = preset["time"]
    else:
        cfg["time_range"] = preset["time_range"]
    if preset["prefactor_mode"] == "fixed":
        cfg["prefactor"] = preset["prefactor"]
    else:
        cfg["prefactor_range"] = preset["prefactor_range"]
    _run_solve(out / "graphs.jsonl", out / "embedding.json",
               out / "results.jsonl", seed, cfg, args.jobs)

    # featurize
    _run_featurize(out / "graphs.jsonl", out / "results.jsonl",
                   out / "embedding.json", out / "dataset.csv", args.jobs)

    # train + report, both tasks
    reports = {}
    for task, tag in (("classify", "classifier"), ("regress", "regressor")):
        model_path = out / f"model_{tag}.json"
        report_path = out / f"train_report_{tag}.json"
        reports[task] = _run_train(out / "dataset.csv", task, seed, [],
                                   model_path, report_path)
        model = model_from_json(model_path.read_text(encoding="utf-8"))
        task_dir = out / f"report_{tag}"
        task_dir.mkdir(exist_ok=True)
        _render_report(model, read_dataset(out / "dataset.csv"),
                       reports[task], task_dir)
    summary = {
        "preset": args.preset, "master_seed": seed, "count": count,
        "balanced_accuracy": reports["classify"]["balanced_accuracy"],
        "solvable_fraction": reports["classify"]["solvable_fraction"],
        "regression_rmse": reports["regress"]["rmse"],
        "reference_hardware_results": REFERENCE_RESULTS,
        "version": __version__,
    }
    _json_dump(out / "summary.json", summary)
    print(json.dumps(summary, sort_keys=True, indent=1))
    return EXIT_OK


# --- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliquecast",
        description="Annealer-accuracy prediction workbench for Maximum Clique")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample random graph instances")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--n-min", dest="n_min", type=int, default=20)
    p.add_argument("--n-max", dest="n_max", type=int, default=64)
    p.add_argument("--density-min", dest="density_min", type=float, default=0.01)
    p.add_argument("--density-max", dest="density_max", type=float, default=0.99)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("embed", help="build the Chimera clique embedding")
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--k", type=int, default=0, help="chains to keep (default 4m)")
    p.add_argument("--embedding-file", default=None,
                   help="load an external embedding instead of constructing one")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("solve", help="anneal each instance and label it")
    p.add_argument("--graphs", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--reads", type=int, default=1000)
    p.add_argument("--time", type=float, default=None)
    p.add_argument("--time-range", dest="time_range", type=float, nargs=2, default=None)
    p.add_argument("--prefactor", type=float, default=None)
    p.add_argument("--prefactor-range", dest="prefactor_range", type=float,
                   nargs=2, default=None)
    p.add_argument("--mode", choices=["best", "lowest-energy"], default="best")
    p.add_argument("--sweeps-per-unit", dest="sweeps_per_unit", type=float, default=1.0)
    p.add_argument("--deadline", type=float, default=60.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("featurize", help="join graphs+results into the dataset")
    p.add_argument("--graphs", required=True)
    p.add_argument("--results", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="fit the classifier or regressor")
    p.add_argument("--dataset", required=True)
    p.add_argument("--task", choices=["classify", "regress"], required=True)
    p.add_argument("--exclude-features", dest="exclude_features", default="")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--model-out", dest="model_out", required=True)
    p.add_argument("--report-out", dest="report_out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("report", help="render tree, tables, and rankings")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--train-report", dest="train_report", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("pipeline", help="gen->embed->solve->featurize->train->report")
    p.add_argument("--preset", choices=sorted(PRESETS), required=True)
    p.add_argument("--count", type=int, default=0, help="override preset count")
    p.add_argument("--reads", type=int, default=0, help="override preset reads")
    p.add_argument("--sweeps-per-unit", dest="sweeps_per_unit", type=float, default=1.0)
    p.add_argument("--deadline", type=float, default=60.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CliqueTimeout as exc:
        print(f"solver timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except (DatasetSchemaError, EmbeddingError, IsolatedVertexError,
            FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
