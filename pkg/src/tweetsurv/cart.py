"""Binary CART classifier over non-negative count features.

Gini splitting on midpoints of observed values, rpart-style stopping rules
and weakest-link cost-complexity pruning.  Routing sends a row LEFT iff
``x[feature] < threshold``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from ._rng import make_rng

__all__ = [
    "FitParams",
    "Dataset",
    "SplitRule",
    "Node",
    "Tree",
    "ModelFormatError",
    "gini",
    "best_split",
    "grow",
    "prune",
    "fit",
    "predict",
    "predict_proba",
    "train_valid_split",
    "save_model",
    "load_model",
    "dumps_model",
    "loads_model",
]

MODEL_FORMAT = "tweetsurv.cart"
MODEL_VERSION = 1


@dataclass(frozen=True)
class FitParams:
    min_split: int = 20
    min_bucket: int = 7
    cp: float = 0.01
    max_depth: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.min_bucket < 1:
            raise ValueError("min_bucket must be >= 1")
        if self.min_split < 1:
            raise ValueError("min_split must be >= 1")
        if not 0.0 <= self.cp <= 1.0:
            raise ValueError("cp must lie in [0, 1]")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.min_split < 2 * self.min_bucket:
            warnings.warn(
                f"min_split={self.min_split} < 2*min_bucket={2 * self.min_bucket}; "
                "some nodes will be unsplittable",
                stacklevel=3,
            )


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        X = np.asarray(self.features)
        y = np.asarray(self.labels, dtype=bool)
        names = tuple(self.feature_names)
        if X.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        n, p = X.shape
        if n < 1 or p < 1:
            raise ValueError("dataset needs at least one row and one feature")
        if y.shape != (n,):
            raise ValueError("labels length does not match feature rows")
        if len(names) != p or len(set(names)) != p:
            raise ValueError("feature_names must be p distinct strings")
        if (X < 0).any():
            raise ValueError("features must be non-negative")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.features[rows], self.labels[rows], self.feature_names)

    def class_counts(self) -> tuple[int, int]:
        n_true = int(self.labels.sum())
        return (self.n - n_true, n_true)


def gini(class_counts) -> float:
    """Gini impurity ``1 - p_false**2 - p_true**2`` of a (n_false, n_true) pair."""
    n_false, n_true = class_counts
    if n_false < 0 or n_true < 0:
        raise ValueError("class counts must be non-negative")
    total = n_false + n_true
    if total == 0:
        raise ValueError("gini of an empty node is undefined")
    return 1.0 - (n_false / total) ** 2 - (n_true / total) ** 2


@dataclass(frozen=True)
class SplitRule:
    feature_index: int
    threshold: float
    improvement: float = field(default=0.0, compare=False)

    def goes_left(self, x) -> bool:
        return x[self.feature_index] < self.threshold


@dataclass(frozen=True)
class Node:
    class_counts: tuple[int, int]
    split: SplitRule | None = None
    left: "Node | None" = None
    right: "Node | None" = None

    def __post_init__(self):
        object.__setattr__(self, "class_counts", (int(self.class_counts[0]), int(self.class_counts[1])))
        if min(self.class_counts) < 0 or sum(self.class_counts) == 0:
            raise ValueError(f"invalid class counts {self.class_counts}")
        if (self.split is None) != (self.left is None) or (self.left is None) != (self.right is None):
            raise ValueError("a node is either a leaf or has a split and two children")
        if self.split is not None:
            lc, rc = self.left.class_counts, self.right.class_counts
            if (lc[0] + rc[0], lc[1] + rc[1]) != self.class_counts:
                raise ValueError("internal node counts must equal the sum of its children")

    @property
    def is_leaf(self) -> bool:
        return self.split is None

    @property
    def n(self) -> int:
        return self.class_counts[0] + self.class_counts[1]

    @property
    def predicted_class(self) -> bool:
        # ties go to FALSE
        return self.class_counts[1] > self.class_counts[0]

    @property
    def p_true(self) -> float:
        return self.class_counts[1] / self.n

    @property
    def errors(self) -> int:
        """Training rows misclassified if this node were a leaf."""
        return self.class_counts[0] if self.predicted_class else self.class_counts[1]

    def iter_nodes(self, path=()) -> Iterator[tuple[tuple[int, ...], "Node"]]:
        """Preorder walk yielding (path, node); path is a tuple of 0 (left) / 1 (right)."""
        stack = [(path, self)]
        while stack:
            p, node = stack.pop()
            yield p, node
            if not node.is_leaf:
                stack.append((p + (1,), node.right))
                stack.append((p + (0,), node.left))

    def leaves(self) -> list["Node"]:
        return [nd for _, nd in self.iter_nodes() if nd.is_leaf]


@dataclass(frozen=True)
class Tree:
    root: Node
    feature_names: tuple[str, ...]
    params: FitParams = FitParams()

    def __post_init__(self):
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        p = len(self.feature_names)
        for _, node in self.root.iter_nodes():
            if node.split is not None and not 0 <= node.split.feature_index < p:
                raise ValueError(f"split feature index {node.split.feature_index} out of range")

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_nodes(self) -> int:
        return sum(1 for _ in self.root.iter_nodes())

    @property
    def n_leaves(self) -> int:
        return len(self.root.leaves())

    @property
    def depth(self) -> int:
        return max(len(p) for p, _ in self.root.iter_nodes())

    def leaf(self, x) -> Node:
        x = np.asarray(x)
        if x.shape != (self.n_features,):
            raise ValueError(f"expected a vector of length {self.n_features}, got shape {x.shape}")
        node = self.root
        while node.split is not None:
            node = node.left if x[node.split.feature_index] < node.split.threshold else node.right
        return node

    def predict(self, x) -> bool:
        return self.leaf(x).predicted_class

    def predict_proba(self, x) -> float:
        return self.leaf(x).p_true

    def describe(self) -> str:
        """Indented text rendering of the rules."""
        lines = []

        def walk(node, depth, prefix):
            n_false, n_true = node.class_counts
            label = "TRUE" if node.predicted_class else "FALSE"
            lines.append(f"{'  ' * depth}{prefix}{label} (false={n_false}, true={n_true}, p_true={node.p_true:.3f})")
            if node.split is not None:
                name = self.feature_names[node.split.feature_index]
                walk(node.left, depth + 1, f"{name} < {node.split.threshold:g}: ")
                walk(node.right, depth + 1, f"{name} >= {node.split.threshold:g}: ")

        walk(self.root, 0, "root: ")
        return "\n".join(lines)


def predict(tree: Tree, x) -> bool:
    return tree.predict(x)


def predict_proba(tree: Tree, x) -> float:
    return tree.predict_proba(x)


# -- split search -------------------------------------------------------------


def _split_score(counts_left, counts_right) -> Fraction:
    # Maximizing (a_L^2 + b_L^2)/n_L + (a_R^2 + b_R^2)/n_R is equivalent to
    # maximizing the Gini decrease; exact rationals make ties reproducible.
    aL, bL = counts_left
    aR, bR = counts_right
    return Fraction(aL * aL + bL * bL, aL + bL) + Fraction(aR * aR + bR * bR, aR + bR)


def _best_split(X: np.ndarray, y: np.ndarray, min_bucket: int):
    """Return (SplitRule, exact gain) or None."""
    n = len(y)
    n_true = int(y.sum())
    n_false = n - n_true
    if n_true == 0 or n_false == 0:
        return None
    parent = Fraction(n_false * n_false + n_true * n_true, n)
    best = None
    best_score = parent  # must beat the parent strictly (gain > 0)
    yi = y.astype(np.int64)
    for f in range(X.shape[1]):
        values, inverse = np.unique(X[:, f], return_inverse=True)
        if len(values) < 2:
            continue
        tot = np.bincount(inverse, minlength=len(values))
        pos = np.bincount(inverse, weights=yi, minlength=len(values)).astype(np.int64)
        cum_n = np.cumsum(tot)
        cum_t = np.cumsum(pos)
        for k in range(len(values) - 1):
            nL = int(cum_n[k])
            nR = n - nL
            if nL < min_bucket or nR < min_bucket:
                continue
            tL = int(cum_t[k])
            score = _split_score((nL - tL, tL), (n_false - (nL - tL), n_true - tL))
            # strict '>' keeps the lowest feature, then lowest threshold, on ties
            if score > best_score:
                best_score = score
                best = (f, (float(values[k]) + float(values[k + 1])) / 2.0)
    if best is None:
        return None
    gain = (best_score - parent) / n
    return SplitRule(best[0], best[1], float(gain)), gain


def best_split(data: Dataset, params: FitParams = FitParams()) -> SplitRule | None:
    """The Gini-optimal legal split of ``data``, or None.

    Candidates are midpoints between consecutive distinct values of each
    feature; both children need ``params.min_bucket`` rows.  Returns None
    when the node is pure, has fewer than ``params.min_split`` rows, or no
    candidate has positive gain.
    """
    if data.n < params.min_split:
        return None
    found = _best_split(data.features, data.labels, params.min_bucket)
    return None if found is None else found[0]


# -- growing ------------------------------------------------------------------


def grow(data: Dataset, params: FitParams = FitParams()) -> Tree:
    """Recursive partitioning with min_split / min_bucket / max_depth / cp stops.

    A split at a node holding ``m`` of the root's ``n`` rows is accepted when
    ``(m / n) * gain / gini(root) >= cp``.
    """
    X, y = data.features, data.labels
    n_root = data.n
    root_counts = data.class_counts()
    root_impurity = Fraction(n_root * n_root - root_counts[0] ** 2 - root_counts[1] ** 2, n_root * n_root)
    cp = Fraction(params.cp)

    def build(rows: np.ndarray, depth: int) -> Node:
        yr = y[rows]
        n_true = int(yr.sum())
        counts = (len(rows) - n_true, n_true)
        if n_true == 0 or n_true == len(rows) or len(rows) < params.min_split or depth >= params.max_depth:
            return Node(counts)
        found = _best_split(X[rows], yr, params.min_bucket)
        if found is None:
            return Node(counts)
        rule, gain = found
        if Fraction(len(rows), n_root) * gain < cp * root_impurity:
            return Node(counts)
        go_left = X[rows, rule.feature_index] < rule.threshold
        return Node(counts, rule, build(rows[go_left], depth + 1), build(rows[~go_left], depth + 1))

    root = build(np.arange(n_root), 0)
    return Tree(root, data.feature_names, params)


# -- pruning ------------------------------------------------------------------


def _subtree_stats(node: Node) -> tuple[int, int]:
    """(training errors of the subtree's leaves, number of leaves)."""
    if node.is_leaf:
        return node.errors, 1
    le, ll = _subtree_stats(node.left)
    re_, rl = _subtree_stats(node.right)
    return le + re_, ll + rl


def _replace(node: Node, path, new: Node) -> Node:
    if not path:
        return new
    if path[0] == 0:
        return Node(node.class_counts, node.split, _replace(node.left, path[1:], new), node.right)
    return Node(node.class_counts, node.split, node.left, _replace(node.right, path[1:], new))


def weakest_link(root: Node):
    """(path, g) of the internal node with the smallest per-leaf error cost.

    ``g = (R(t) - R(T_t)) / (leaves(T_t) - 1)``; ties go to the earliest
    node in preorder.  None for a single leaf.
    """
    best = None
    for path, node in root.iter_nodes():
        if node.is_leaf:
            continue
        sub_err, sub_leaves = _subtree_stats(node)
        g = Fraction(node.errors - sub_err, sub_leaves - 1)
        if best is None or g < best[1] or (g == best[1] and path < best[0]):
            best = (path, g)
    return best


def prune(tree: Tree, cp: float) -> Tree:
    """Weakest-link cost-complexity pruning.

    Collapses the weakest link while its cost per removed split is below
    ``cp * R(root)``, with R the training misclassification count.  ``cp=0``
    leaves the tree unchanged and ``cp >= 1`` collapses it to the root leaf.
    """
    if not 0.0 <= cp:
        raise ValueError("cp must be non-negative")
    root = tree.root
    if cp >= 1.0:
        return Tree(Node(root.class_counts), tree.feature_names, tree.params)
    alpha = Fraction(cp) * root.errors
    while not root.is_leaf:
        path, g = weakest_link(root)
        if g >= alpha:
            break
        target = root
        for step in path:
            target = target.left if step == 0 else target.right
        root = _replace(root, path, Node(target.class_counts))
    return Tree(root, tree.feature_names, tree.params)


def fit(data: Dataset, params: FitParams = FitParams()) -> Tree:
    """grow then prune at ``params.cp``."""
    return prune(grow(data, params), params.cp)


def is_subtree(small: Node, big: Node) -> bool:
    """True if ``small`` is ``big`` with zero or more subtrees collapsed to leaves."""
    if small.class_counts != big.class_counts:
        return False
    if small.is_leaf:
        return True
    if big.is_leaf or small.split != big.split:
        return False
    return is_subtree(small.left, big.left) and is_subtree(small.right, big.right)


# -- partitioning -------------------------------------------------------------


def train_valid_split(data: Dataset, train_fraction: float, seed) -> tuple[Dataset, Dataset]:
    """Seeded uniform partition into round(n * fraction) training rows and the rest."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    n_train = int(math.floor(data.n * train_fraction + 0.5))
    if n_train == 0 or n_train == data.n:
        raise ValueError(f"degenerate split of {data.n} rows: {n_train} train / {data.n - n_train} valid")
    perm = make_rng(seed).permutation(data.n)
    return data.subset(np.sort(perm[:n_train])), data.subset(np.sort(perm[n_train:]))


# -- model files --------------------------------------------------------------


class ModelFormatError(ValueError):
    pass


def _node_to_obj(node: Node, names) -> dict:
    obj = {"counts": list(node.class_counts)}
    if node.split is not None:
        obj["split"] = {"feature": names[node.split.feature_index], "threshold": node.split.threshold}
        obj["left"] = _node_to_obj(node.left, names)
        obj["right"] = _node_to_obj(node.right, names)
    return obj


def _node_from_obj(obj, index) -> Node:
    if not isinstance(obj, dict) or "counts" not in obj:
        raise ModelFormatError("node without counts")
    counts = obj["counts"]
    if not (isinstance(counts, list) and len(counts) == 2 and all(isinstance(c, int) and not isinstance(c, bool) for c in counts)):
        raise ModelFormatError(f"bad class counts {counts!r}")
    if "split" not in obj:
        return Node(tuple(counts))
    split = obj["split"]
    try:
        fi = index[split["feature"]]
        thr = float(split["threshold"])
    except (KeyError, TypeError, ValueError):
        raise ModelFormatError(f"bad split {split!r}") from None
    if not math.isfinite(thr):
        raise ModelFormatError("non-finite threshold")
    if "left" not in obj or "right" not in obj:
        raise ModelFormatError("split node without two children")
    return Node(tuple(counts), SplitRule(fi, thr), _node_from_obj(obj["left"], index), _node_from_obj(obj["right"], index))


def dumps_model(tree: Tree, extra: dict | None = None) -> str:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "params": asdict(tree.params),
        "feature_names": list(tree.feature_names),
        "tree": _node_to_obj(tree.root, tree.feature_names),
    }
    if extra:
        doc["extra"] = extra
    return json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


def loads_model(text: str) -> tuple[Tree, dict]:
    """Parse and validate a model document; returns (tree, extra)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model is not valid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError("not a tweetsurv CART model")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')!r}")
    names = doc.get("feature_names")
    if not isinstance(names, list) or not names or not all(isinstance(s, str) for s in names):
        raise ModelFormatError("feature_names must be a non-empty list of strings")
    if len(set(names)) != len(names):
        raise ModelFormatError("duplicate feature names")
    try:
        params = FitParams(**doc.get("params", {}))
        root = _node_from_obj(doc.get("tree"), {s: i for i, s in enumerate(names)})
        tree = Tree(root, tuple(names), params)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(str(exc)) from None
    return tree, doc.get("extra", {})


def save_model(tree: Tree, path, extra: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(tree, extra))


def load_model(path) -> tuple[Tree, dict]:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
