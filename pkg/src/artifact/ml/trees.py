"""Greedy CART trees stored as flat node arrays.

A tree is a dict of equal-length lists ``feature``, ``threshold``, ``left``,
``right`` and ``value``; leaves have ``feature == -1``. Rows go left when
``x[feature] <= threshold``. The flat layout serialises to JSON as-is and
predicts with a vectorised descent.
"""

from __future__ import annotations

import numpy as np

CRITERIA = ("mse", "gini")


def _impurity(s, s2, n, criterion):
    """Total (not mean) impurity of a node from its target sums."""
    if criterion == "gini":
        # binary labels: n * 2p(1-p) = 2(s - s^2/n)
        return 2.0 * (s - s * s / n)
    return s2 - s * s / n


def _best_split(X, y, features, criterion, min_samples_leaf):
    """Lowest-impurity split over ``features``; ties keep the earliest candidate."""
    n = len(y)
    best = None
    total = _impurity(y.sum(), (y * y).sum(), n, criterion)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        cs = np.cumsum(ys)
        cs2 = np.cumsum(ys * ys)
        # left child = first i rows, i in [min_leaf, n - min_leaf]
        i = np.arange(min_samples_leaf, n - min_samples_leaf + 1)
        if i.size == 0:
            continue
        i = i[xs[i - 1] < xs[i]]
        if i.size == 0:
            continue
        sl, sl2 = cs[i - 1], cs2[i - 1]
        sr, sr2 = cs[-1] - sl, cs2[-1] - sl2
        imp = _impurity(sl, sl2, i, criterion) + _impurity(sr, sr2, n - i, criterion)
        j = int(np.argmin(imp))
        if best is None or imp[j] < best[0]:
            lo, hi = xs[i[j] - 1], xs[i[j]]
            thr = 0.5 * (lo + hi)
            if not (lo <= thr < hi):
                thr = lo
            best = (float(imp[j]), int(f), float(thr))
    if best is None:
        return None
    # require a real impurity decrease, not float noise
    if not best[0] < total - 1e-12 * max(1.0, abs(total)):
        return None
    return best


def build_tree(
    X,
    y,
    criterion: str = "mse",
    max_depth: int = 8,
    min_samples_leaf: int = 1,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
) -> dict:
    """Grow a tree depth-first. ``max_features`` draws a feature subset per node."""
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    p = X.shape[1]
    tree = {"feature": [], "threshold": [], "left": [], "right": [], "value": []}

    def new_node(value):
        for key, v in (("feature", -1), ("threshold", 0.0), ("left", -1), ("right", -1), ("value", value)):
            tree[key].append(v)
        return len(tree["value"]) - 1

    root = new_node(float(y.mean()))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        if depth >= max_depth or len(idx) < 2 * min_samples_leaf:
            continue
        yi = y[idx]
        if np.all(yi == yi[0]):
            continue
        if max_features is not None and max_features < p:
            features = np.sort(rng.choice(p, size=max_features, replace=False))
        else:
            features = range(p)
        split = _best_split(X[idx], yi, features, criterion, min_samples_leaf)
        if split is None:
            continue
        _, f, thr = split
        go_left = X[idx, f] <= thr
        li, ri = idx[go_left], idx[~go_left]
        left = new_node(float(y[li].mean()))
        right = new_node(float(y[ri].mean()))
        tree["feature"][node] = f
        tree["threshold"][node] = thr
        tree["left"][node] = left
        tree["right"][node] = right
        # right pushed first so the left subtree is expanded first
        stack.append((right, ri, depth + 1))
        stack.append((left, li, depth + 1))
    return tree


def apply_tree(tree: dict, X) -> np.ndarray:
    """Leaf index reached by every row of X."""
    X = np.asarray(X, dtype=float)
    feature = np.asarray(tree["feature"])
    threshold = np.asarray(tree["threshold"], dtype=float)
    left = np.asarray(tree["left"])
    right = np.asarray(tree["right"])
    node = np.zeros(len(X), dtype=np.int64)
    rows = np.arange(len(X))
    while True:
        f = feature[node]
        active = f >= 0
        if not active.any():
            return node
        a = rows[active]
        na = node[active]
        goes_left = X[a, f[active]] <= threshold[na]
        node[a] = np.where(goes_left, left[na], right[na])


def predict_tree(tree: dict, X) -> np.ndarray:
    return np.asarray(tree["value"], dtype=float)[apply_tree(tree, X)]


def tree_depth(tree: dict) -> int:
    depth = {0: 0}
    for i, (l, r) in enumerate(zip(tree["left"], tree["right"])):
        if l >= 0:
            depth[l] = depth[r] = depth[i] + 1
    return max(depth.values())
