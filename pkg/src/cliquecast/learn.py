"""From-scratch tree learners and evaluation metrics.

Decision-tree classifier with weighted Gini impurity and balanced class
weights; gradient-boosted regression trees with squared loss; permutation
importance; confusion-matrix metrics. Fitting is fully deterministic: split
candidates are midpoints of consecutive distinct sorted values, ties break on
the lowest feature index then the lowest threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

GINI_EPS = 1e-12


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 5
    min_impurity_decrease: float = 0.005
    class_weight: str | None = "balanced"
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_impurity_decrease < 0:
            raise ValueError("min_impurity_decrease must be >= 0")


@dataclass(frozen=True)
class BoostConfig:
    n_stages: int = 200
    learning_rate: float = 0.1
    max_depth: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.n_stages < 1:
            raise ValueError("n_stages must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in (0, 1]")


@dataclass
class TreeNode:
    """Internal node (feature/threshold/children) or leaf. The left branch
    takes feature <= threshold and renders as the 'true' branch."""

    weight: float
    impurity: float
    class_mass: tuple[float, float] | None = None
    value: float | None = None
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


def balanced_class_weights(labels) -> dict[int, float]:
    """weight_c = N / (2 * N_c) for binary labels; errors on single-class data."""
    y = np.asarray(labels, dtype=np.int64)
    counts = {c: int(np.sum(y == c)) for c in (0, 1)}
    if counts[0] == 0 or counts[1] == 0:
        raise ValueError("balanced weights need at least one example of each class")
    n = len(y)
    return {c: n / (2.0 * counts[c]) for c in (0, 1)}


def _gini(mass: np.ndarray) -> float:
    total = mass.sum()
    if total <= GINI_EPS:
        return 0.0
    p = mass / total
    return float(1.0 - np.sum(p * p))


def _best_split_gini(x_sorted_all, x, y, w, w_total):
    """Best (feature, threshold, decrease) under weighted Gini.

    x_sorted_all: per-feature argsort of the full training matrix restricted
    to the node (list of index arrays). Returns None if no boundary exists.
    """
    mass = np.array([w[y == 0].sum(), w[y == 1].sum()])
    node_w = mass.sum()
    node_imp = _gini(mass)
    best = None  # (decrease, feature, threshold)
    for f, order in enumerate(x_sorted_all):
        xs = x[order, f]
        boundaries = np.nonzero(xs[:-1] != xs[1:])[0]
        if boundaries.size == 0:
            continue
        w0 = np.cumsum(w[order] * (y[order] == 0))
        w1 = np.cumsum(w[order] * (y[order] == 1))
        l0, l1 = w0[boundaries], w1[boundaries]
        r0, r1 = w0[-1] - l0, w1[-1] - l1
        wl, wr = l0 + l1, r0 + r1
        imp_l = 1.0 - ((l0 / wl) ** 2 + (l1 / wl) ** 2)
        imp_r = 1.0 - ((r0 / wr) ** 2 + (r1 / wr) ** 2)
        decrease = (node_w / w_total) * (
            node_imp - (wl / node_w) * imp_l - (wr / node_w) * imp_r
        )
        k = int(np.argmax(decrease))
        if best is None or decrease[k] > best[0]:
            thr = (xs[boundaries[k]] + xs[boundaries[k] + 1]) / 2.0
            best = (float(decrease[k]), f, float(thr))
    return best


def _best_split_sse(x, y, w_total_n):
    """Best split minimizing squared error (variance impurity), same candidate
    and tie rules as the Gini search."""
    n = len(y)
    node_imp = float(np.var(y))
    best = None
    for f in range(x.shape[1]):
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ys = y[order]
        boundaries = np.nonzero(xs[:-1] != xs[1:])[0]
        if boundaries.size == 0:
            continue
        cs = np.cumsum(ys)
        cs2 = np.cumsum(ys * ys)
        nl = boundaries + 1.0
        nr = n - nl
        sse_l = cs2[boundaries] - cs[boundaries] ** 2 / nl
        sse_r = (cs2[-1] - cs2[boundaries]) - (cs[-1] - cs[boundaries]) ** 2 / nr
        decrease = (n / w_total_n) * (node_imp - (sse_l + sse_r) / n)
        k = int(np.argmax(decrease))
        if best is None or decrease[k] > best[0]:
            thr = (xs[boundaries[k]] + xs[boundaries[k] + 1]) / 2.0
            best = (float(decrease[k]), f, float(thr))
    return best


def _grow_classifier(x, y, w, w_total, depth, cfg: TreeConfig) -> TreeNode:
    mass = (float(w[y == 0].sum()), float(w[y == 1].sum()))
    node = TreeNode(weight=float(w.sum()), impurity=_gini(np.array(mass)), class_mass=mass)
    if depth >= cfg.max_depth or node.impurity <= GINI_EPS or len(y) < 2:
        return node
    orders = [np.argsort(x[:, f], kind="stable") for f in range(x.shape[1])]
    found = _best_split_gini(orders, x, y, w, w_total)
    if found is None:
        return node
    decrease, f, thr = found
    if decrease < cfg.min_impurity_decrease or decrease <= 0.0:
        return node
    mask = x[:, f] <= thr
    node.feature = f
    node.threshold = thr
    node.left = _grow_classifier(x[mask], y[mask], w[mask], w_total, depth + 1, cfg)
    node.right = _grow_classifier(x[~mask], y[~mask], w[~mask], w_total, depth + 1, cfg)
    return node


def _grow_regressor(x, y, n_total, depth, cfg: BoostConfig) -> TreeNode:
    node = TreeNode(weight=float(len(y)), impurity=float(np.var(y)), value=float(np.mean(y)))
    if depth >= cfg.max_depth or node.impurity <= GINI_EPS or len(y) < 2:
        return node
    found = _best_split_sse(x, y, n_total)
    if found is None:
        return node
    decrease, f, thr = found
    if decrease <= 0.0:
        return node
    mask = x[:, f] <= thr
    node.feature = f
    node.threshold = thr
    node.left = _grow_regressor(x[mask], y[mask], n_total, depth + 1, cfg)
    node.right = _grow_regressor(x[~mask], y[~mask], n_total, depth + 1, cfg)
    return node


@dataclass
class DecisionTreeModel:
    root: TreeNode
    config: TreeConfig
    feature_names: tuple[str, ...]
    class_weights: dict[int, float]


@dataclass
class GradientBoostModel:
    baseline: float
    config: BoostConfig
    feature_names: tuple[str, ...]
    trees: list[TreeNode] = field(default_factory=list)


def fit_decision_tree(x, y, cfg: TreeConfig, feature_names) -> DecisionTreeModel:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(y) < 2:
        raise ValueError("need at least 2 training records")
    if cfg.class_weight == "balanced":
        cw = balanced_class_weights(y)
    elif cfg.class_weight is None:
        cw = {0: 1.0, 1: 1.0}
        if len(np.unique(y)) < 2:
            raise ValueError("both classes must be present")
    else:
        raise ValueError(f"unknown class weighting {cfg.class_weight!r}")
    w = np.array([cw[int(c)] for c in y])
    root = _grow_classifier(x, y, w, float(w.sum()), 0, cfg)
    return DecisionTreeModel(root, cfg, tuple(feature_names), cw)


def _route(node: TreeNode, vec: np.ndarray) -> TreeNode:
    while not node.is_leaf:
        node = node.left if vec[node.feature] <= node.threshold else node.right
    return node


def _as_vector(features, feature_names) -> np.ndarray:
    if isinstance(features, dict):
        missing = [k for k in feature_names if k not in features]
        if missing:
            raise KeyError(f"missing feature keys: {missing}")
        return np.array([float(features[k]) for k in feature_names])
    vec = np.asarray(features, dtype=np.float64)
    if vec.shape != (len(feature_names),):
        raise ValueError("feature vector length does not match model")
    return vec


def predict_class(model: DecisionTreeModel, features) -> tuple[int, float]:
    """Route to a leaf; class = argmax weighted mass, confidence = mass share.
    Exact threshold equality goes left."""
    leaf = _route(model.root, _as_vector(features, model.feature_names))
    m0, m1 = leaf.class_mass
    cls = 1 if m1 > m0 else 0
    total = m0 + m1
    confidence = (m1 if cls == 1 else m0) / total if total > 0 else 0.5
    return cls, confidence


def predict_class_batch(model: DecisionTreeModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty(x.shape[0], dtype=np.int64)
    for i in range(x.shape[0]):
        m0, m1 = _route(model.root, x[i]).class_mass
        out[i] = 1 if m1 > m0 else 0
    return out


def fit_gradient_boost(x, y, cfg: BoostConfig, feature_names) -> GradientBoostModel:
    """Stagewise squared-loss boosting: F_0 = mean target, each stage fits a
    shallow regression tree to the residuals."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(y) < 2:
        raise ValueError("need at least 2 training records")
    model = GradientBoostModel(float(np.mean(y)), cfg, tuple(feature_names))
    current = np.full(len(y), model.baseline)
    for _ in range(cfg.n_stages):
        tree = _grow_regressor(x, y - current, float(len(y)), 0, cfg)
        model.trees.append(tree)
        current += cfg.learning_rate * _predict_tree_batch(tree, x)
    return model


def _predict_tree_batch(node: TreeNode, x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape[0])
    idx = np.arange(x.shape[0])
    stack = [(node, idx)]
    while stack:
        nd, ii = stack.pop()
        if nd.is_leaf:
            out[ii] = nd.value
        else:
            mask = x[ii, nd.feature] <= nd.threshold
            stack.append((nd.left, ii[mask]))
            stack.append((nd.right, ii[~mask]))
    return out


def predict_regression(model: GradientBoostModel, features) -> float:
    vec = _as_vector(features, model.feature_names)[None, :]
    return float(predict_regression_batch(model, vec)[0])


def predict_regression_batch(model: GradientBoostModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.full(x.shape[0], model.baseline)
    for tree in model.trees:
        out += model.config.learning_rate * _predict_tree_batch(tree, x)
    return out


def rounded_clique_prediction(raw: float, num_nodes: int) -> int:
    """Convenience integer prediction clamped to the feasible clique range."""
    return int(min(max(round(raw), 0), num_nodes))


@dataclass(frozen=True)
class ConfusionReport:
    matrix: tuple[tuple[int, int], tuple[int, int]]  # rows actual, cols predicted
    recall_not_solvable: float
    recall_solvable: float
    balanced_accuracy: float


def classification_metrics(truth, predictions) -> ConfusionReport:
    """2x2 confusion matrix (row/col order: not-solvable, solvable), per-class
    recall, and balanced accuracy (mean of recalls)."""
    t = np.asarray(truth, dtype=np.int64)
    p = np.asarray(predictions, dtype=np.int64)
    if t.shape != p.shape or t.size < 1:
        raise ValueError("truth and predictions must have equal nonzero length")
    matrix = tuple(
        tuple(int(np.sum((t == a) & (p == b))) for b in (0, 1)) for a in (0, 1)
    )
    recalls = []
    for c in (0, 1):
        total = matrix[c][0] + matrix[c][1]
        recalls.append(matrix[c][c] / total if total else 0.0)
    return ConfusionReport(matrix, recalls[0], recalls[1], float(np.mean(recalls)))


def rmse(truth, predictions) -> float:
    t = np.asarray(truth, dtype=np.float64)
    p = np.asarray(predictions, dtype=np.float64)
    if t.shape != p.shape or t.size < 1:
        raise ValueError("truth and predictions must have equal nonzero length")
    return float(np.sqrt(np.mean((t - p) ** 2)))


def permutation_importance(
    model, x, y, metric: str, repeats: int = 5, seed: int = 0
) -> dict[str, float]:
    """Mean metric degradation per feature when its test column is shuffled.

    metric 'balanced_accuracy' reports the accuracy drop; 'rmse' reports the
    error increase. Larger always means more important.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if metric == "balanced_accuracy":
        def score(xx):
            return classification_metrics(y, predict_class_batch(model, xx)).balanced_accuracy
        sign = -1.0  # drop in accuracy
    elif metric == "rmse":
        def score(xx):
            return rmse(y, predict_regression_batch(model, xx))
        sign = 1.0  # increase in error
    else:
        raise ValueError(f"unknown metric {metric!r}")
    baseline = score(x)
    rng = np.random.Generator(np.random.PCG64(seed))
    names = model.feature_names
    importances: dict[str, float] = {}
    for f, name in enumerate(names):
        deltas = []
        for _ in range(repeats):
            permuted = x.copy()
            permuted[:, f] = permuted[rng.permutation(x.shape[0]), f]
            deltas.append(sign * (score(permuted) - baseline))
        importances[name] = float(np.mean(deltas))
    return importances


# --- tree rendering and model serialization ---------------------------------


def export_tree(model: DecisionTreeModel, fmt: str = "text") -> str:
    """Deterministic rendering of a fitted tree. Left branch is the 'true'
    branch (feature <= threshold); dot output colors leaves by class."""
    names = model.feature_names
    if fmt == "text":
        lines: list[str] = []

        def walk(node: TreeNode, indent: str):
            if node.is_leaf:
                m0, m1 = node.class_mass
                cls = "solvable" if m1 > m0 else "not-solvable"
                lines.append(
                    f"{indent}leaf: {cls} (mass {m0:.4f}/{m1:.4f}, weight {node.weight:.4f})"
                )
                return
            lines.append(
                f"{indent}{names[node.feature]} <= {node.threshold:.6g} "
                f"(impurity {node.impurity:.4f}, weight {node.weight:.4f})"
            )
            walk(node.left, indent + "  [T] ")
            walk(node.right, indent + "  [F] ")

        walk(model.root, "")
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        lines = ["digraph decision_tree {", '  node [shape=box, style=filled];']
        counter = [0]

        def emit(node: TreeNode) -> int:
            nid = counter[0]
            counter[0] += 1
            if node.is_leaf:
                m0, m1 = node.class_mass
                cls, color = ("solvable", "palegreen") if m1 > m0 else ("unsolvable", "lightcoral")
                lines.append(f'  n{nid} [label="{cls}", fillcolor={color}];')
            else:
                lines.append(
                    f'  n{nid} [label="{names[node.feature]} <= {node.threshold:.6g}\\n'
                    f'impurity {node.impurity:.4f}\\nweight {node.weight:.4f}", '
                    f"fillcolor=lightblue];"
                )
                lid = emit(node.left)
                rid = emit(node.right)
                lines.append(f'  n{nid} -> n{lid} [label="true"];')
                lines.append(f'  n{nid} -> n{rid} [label="false"];')
            return nid

        emit(model.root)
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _node_to_json(node: TreeNode) -> dict:
    doc: dict = {"weight": _f17(node.weight), "impurity": _f17(node.impurity)}
    if node.class_mass is not None:
        doc["class_mass"] = [_f17(node.class_mass[0]), _f17(node.class_mass[1])]
    if node.value is not None:
        doc["value"] = _f17(node.value)
    if not node.is_leaf:
        doc["feature"] = node.feature
        doc["threshold"] = _f17(node.threshold)
        doc["left"] = _node_to_json(node.left)
        doc["right"] = _node_to_json(node.right)
    return doc


def _node_from_json(doc: dict) -> TreeNode:
    node = TreeNode(
        weight=float(doc["weight"]),
        impurity=float(doc["impurity"]),
        class_mass=tuple(float(v) for v in doc["class_mass"]) if "class_mass" in doc else None,
        value=float(doc["value"]) if "value" in doc else None,
    )
    if "feature" in doc:
        node.feature = int(doc["feature"])
        node.threshold = float(doc["threshold"])
        node.left = _node_from_json(doc["left"])
        node.right = _node_from_json(doc["right"])
    return node


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def model_to_json(model) -> str:
    if isinstance(model, DecisionTreeModel):
        doc = {
            "format": "cliquecast-decision-tree/1",
            "config": {
                "max_depth": model.config.max_depth,
                "min_impurity_decrease": _f17(model.config.min_impurity_decrease),
                "class_weight": model.config.class_weight,
                "seed": model.config.seed,
            },
            "feature_names": list(model.feature_names),
            "class_weights": {str(k): _f17(v) for k, v in model.class_weights.items()},
            "tree": _node_to_json(model.root),
        }
    elif isinstance(model, GradientBoostModel):
        doc = {
            "format": "cliquecast-gradient-boost/1",
            "config": {
                "n_stages": model.config.n_stages,
                "learning_rate": _f17(model.config.learning_rate),
                "max_depth": model.config.max_depth,
                "seed": model.config.seed,
            },
            "feature_names": list(model.feature_names),
            "baseline": _f17(model.baseline),
            "trees": [_node_to_json(t) for t in model.trees],
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def model_from_json(text: str):
    doc = json.loads(text)
    fmt = doc.get("format")
    if fmt == "cliquecast-decision-tree/1":
        cfg = TreeConfig(
            max_depth=int(doc["config"]["max_depth"]),
            min_impurity_decrease=float(doc["config"]["min_impurity_decrease"]),
            class_weight=doc["config"]["class_weight"],
            seed=int(doc["config"]["seed"]),
        )
        return DecisionTreeModel(
            root=_node_from_json(doc["tree"]),
            config=cfg,
            feature_names=tuple(doc["feature_names"]),
            class_weights={int(k): float(v) for k, v in doc["class_weights"].items()},
        )
    if fmt == "cliquecast-gradient-boost/1":
        cfg = BoostConfig(
            n_stages=int(doc["config"]["n_stages"]),
            learning_rate=float(doc["config"]["learning_rate"]),
            max_depth=int(doc["config"]["max_depth"]),
            seed=int(doc["config"]["seed"]),
        )
        model = GradientBoostModel(
            baseline=float(doc["baseline"]),
            config=cfg,
            feature_names=tuple(doc["feature_names"]),
        )
        model.trees = [_node_from_json(t) for t in doc["trees"]]
        return model
    raise ValueError(f"unknown model format {fmt!r}")
