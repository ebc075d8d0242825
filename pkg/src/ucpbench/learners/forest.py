"""Random-forest classifier built from CART trees.

Each tree is grown on a bootstrap sample with Gini splits over a random
feature subset, then pruned bottom-up (reduced-error pruning) against the
rows left out of its bootstrap sample.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..errors import InvalidArgument
from ..seeding import rng_for


@dataclass(frozen=True)
class ForestParams:
    num_trees: int = 10
    min_leaf: int = 3
    prune: bool = True
    # splitting is allowed down to this node size; min_leaf is the binding limit
    min_split: int = 1
    max_features: Optional[int] = None


class _Node:
    __slots__ = ("counts", "feature", "threshold", "left", "right")

    def __init__(self, counts):
        self.counts = counts
        self.feature = -1
        self.threshold = 0.0
        self.left = None
        self.right = None

    @property
    def is_leaf(self):
        return self.left is None

    @property
    def label(self):
        return int(np.argmax(self.counts))  # ties -> smaller label index

    def make_leaf(self):
        self.feature = -1
        self.left = self.right = None


def _gini_from_counts(counts):
    n = counts.sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / n[..., None]
    return 1.0 - np.nansum(p * p, axis=-1)


class DecisionTree:
    def __init__(self, n_classes, min_leaf=3, min_split=1, max_features=None):
        self.n_classes = n_classes
        self.min_leaf = min_leaf
        self.min_split = min_split
        self.max_features = max_features
        self.root = None

    def fit(self, x, y, rng):
        self.root = self._grow(x, y, rng)
        return self

    def _best_split(self, x, y, features):
        n = len(y)
        parent = _gini_from_counts(np.bincount(y, minlength=self.n_classes)[None, :].astype(float))[0]
        best = None  # (impurity, feature, threshold)
        for f in features:
            order = np.argsort(x[:, f], kind="stable")
            xs = x[order, f]
            onehot = np.zeros((n, self.n_classes))
            onehot[np.arange(n), y[order]] = 1.0
            left = np.cumsum(onehot, axis=0)[:-1]
            right = left[-1] + onehot[-1] - left
            n_left = np.arange(1, n)
            valid = (xs[1:] > xs[:-1]) & (n_left >= self.min_leaf) & (n - n_left >= self.min_leaf)
            if not valid.any():
                continue
            imp = (n_left * _gini_from_counts(left) + (n - n_left) * _gini_from_counts(right)) / n
            imp = np.where(valid, imp, np.inf)
            i = int(np.argmin(imp))
            if imp[i] < parent - 1e-12 and (best is None or imp[i] < best[0]):
                best = (float(imp[i]), int(f), float((xs[i] + xs[i + 1]) / 2.0))
        return best

    def _grow(self, x, y, rng):
        node = _Node(np.bincount(y, minlength=self.n_classes))
        n = len(y)
        if n < max(self.min_split, 2 * self.min_leaf) or np.count_nonzero(node.counts) <= 1:
            return node
        d = x.shape[1]
        m = self.max_features or d
        perm = rng.permutation(d)
        split = self._best_split(x, y, perm[:m])
        if split is None and m < d:
            # keep looking past the subset until some valid split turns up
            for f in perm[m:]:
                split = self._best_split(x, y, [f])
                if split is not None:
                    break
        if split is None:
            return node
        _, f, t = split
        mask = x[:, f] <= t
        node.feature, node.threshold = f, t
        node.left = self._grow(x[mask], y[mask], rng)
        node.right = self._grow(x[~mask], y[~mask], rng)
        return node

    def prune(self, x, y):
        """Reduced-error pruning; nodes reached by no held-out row are kept."""
        self._prune(self.root, x, y)
        return self

    def _prune(self, node, x, y):
        if node.is_leaf:
            return int(np.sum(y != node.label))
        mask = x[:, node.feature] <= node.threshold
        subtree_err = self._prune(node.left, x[mask], y[mask]) + self._prune(node.right, x[~mask], y[~mask])
        leaf_err = int(np.sum(y != node.label))
        if len(y) > 0 and leaf_err <= subtree_err:
            node.make_leaf()
            return leaf_err
        return subtree_err

    def predict_one(self, v):
        node = self.root
        while not node.is_leaf:
            node = node.left if v[node.feature] <= node.threshold else node.right
        return node.label

    def predict(self, x):
        return np.array([self.predict_one(v) for v in np.asarray(x, dtype=float)], dtype=int)

    def leaves(self):
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend((node.left, node.right))
        return out


@dataclass
class ForestModel:
    trees: List[DecisionTree]
    params: ForestParams
    class_labels: tuple
    constant: bool = False

    def tree_votes(self, feature) -> np.ndarray:
        v = np.asarray(feature, dtype=float)
        if self.constant:
            return np.zeros(max(1, len(self.trees)), dtype=int)
        return np.array([t.predict_one(v) for t in self.trees], dtype=int)

    def predict_index(self, feature) -> int:
        votes = np.bincount(self.tree_votes(feature), minlength=len(self.class_labels))
        return int(np.argmax(votes))

    def predict(self, feature):
        return self.class_labels[self.predict_index(feature)]


def rf_fit(features, labels, seed: int = 0, params: ForestParams = ForestParams()) -> ForestModel:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2:
        raise InvalidArgument("features must be a 2-D array of rows")
    labels = list(labels)
    if len(labels) != len(x) or len(x) == 0:
        raise InvalidArgument("features and labels must be non-empty and aligned")
    class_labels = tuple(sorted(set(labels)))
    if len(class_labels) < 2:
        return ForestModel(trees=[], params=params, class_labels=class_labels, constant=True)
    index = {c: i for i, c in enumerate(class_labels)}
    y = np.array([index[c] for c in labels], dtype=int)
    n, d = x.shape
    max_features = params.max_features or max(1, math.ceil(math.sqrt(d)))
    trees = []
    for t in range(params.num_trees):
        rng = rng_for(seed, "rf-tree", t)
        boot = rng.integers(0, n, size=n)
        oob = np.setdiff1d(np.arange(n), boot)
        tree = DecisionTree(len(class_labels), params.min_leaf, params.min_split, max_features)
        tree.fit(x[boot], y[boot], rng)
        if params.prune and len(oob):
            tree.prune(x[oob], y[oob])
        trees.append(tree)
    return ForestModel(trees=trees, params=params, class_labels=class_labels)


def rf_predict(model: ForestModel, feature):
    return model.predict(feature)
