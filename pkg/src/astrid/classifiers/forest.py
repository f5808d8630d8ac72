"""Random forest of unpruned Gini trees, compiled with numba.

Numeric attributes split on ``x <= threshold``; categorical attributes
split one category against the rest (``x == code`` goes left). Each node
examines random attributes until ``mtry`` non-constant ones have been
scored, so a tree only stops early when every attribute is constant in
the node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

LEAF = -1


@numba.njit(cache=True)
def _majority(counts):
    best = 0
    for c in range(1, counts.shape[0]):
        if counts[c] > counts[best]:
            best = c
    return best


@numba.njit(cache=True)
def _best_numeric(X, y, w, order, start, end, f, n_classes, min_leaf, lc, rc):
    if X[order[f, start], f] == X[order[f, end - 1], f]:
        return False, np.inf, 0.0
    lc[:] = 0
    rc[:] = 0
    for i in range(start, end):
        r = order[f, i]
        rc[y[r]] += w[r]
    nl = 0
    nr = 0
    sl2 = 0.0
    sr2 = 0.0
    for c in range(n_classes):
        nr += rc[c]
        sr2 += rc[c] * rc[c]
    best = np.inf
    thr = 0.0
    for i in range(start + 1, end):
        r = order[f, i - 1]
        c = y[r]
        wr = w[r]
        sl2 += 2.0 * wr * lc[c] + wr * wr
        lc[c] += wr
        sr2 -= 2.0 * wr * rc[c] - wr * wr
        rc[c] -= wr
        nl += wr
        nr -= wr
        lo = X[r, f]
        hi = X[order[f, i], f]
        if lo == hi or nl < min_leaf or nr < min_leaf:
            continue
        score = (nl - sl2 / nl) + (nr - sr2 / nr)
        if score < best:
            best = score
            mid = 0.5 * (lo + hi)
            thr = lo if mid >= hi else mid
    return best < np.inf, best, thr


@numba.njit(cache=True)
def _best_categorical(X, y, w, order, start, end, f, n_classes, n_cats, min_leaf, table, tot):
    table[:n_cats, :] = 0
    tot[:] = 0
    size = 0
    for i in range(start, end):
        r = order[0, i]
        table[int(X[r, f]), y[r]] += w[r]
        tot[y[r]] += w[r]
        size += w[r]
    present = 0
    for k in range(n_cats):
        for c in range(n_classes):
            if table[k, c] > 0:
                present += 1
                break
    if present < 2:
        return False, np.inf, 0.0
    best = np.inf
    thr = 0.0
    for k in range(n_cats):
        nl = 0
        sl2 = 0.0
        sr2 = 0.0
        for c in range(n_classes):
            nl += table[k, c]
            sl2 += table[k, c] * table[k, c]
            o = tot[c] - table[k, c]
            sr2 += o * o
        nr = size - nl
        if nl == 0 or nr == 0 or nl < min_leaf or nr < min_leaf:
            continue
        score = (nl - sl2 / nl) + (nr - sr2 / nr)
        if score < best:
            best = score
            thr = float(k)
    return best < np.inf, best, thr


@numba.njit(cache=True)
def _fit_forest(X, y, is_cat, n_cats, n_classes, n_trees, mtry, max_depth, min_leaf, bootstrap, seed):
    np.random.seed(seed)
    n, m = X.shape
    cap = 2 * n + 1
    feature = np.full(n_trees * cap, LEAF, dtype=np.int64)
    threshold = np.zeros(n_trees * cap)
    left = np.zeros(n_trees * cap, dtype=np.int64)
    right = np.zeros(n_trees * cap, dtype=np.int64)
    value = np.zeros(n_trees * cap, dtype=np.int64)
    offsets = np.zeros(n_trees + 1, dtype=np.int64)

    max_cats = 1
    for f in range(m):
        if n_cats[f] > max_cats:
            max_cats = n_cats[f]
    table = np.zeros((max_cats, n_classes), dtype=np.int64)
    tot = np.zeros(n_classes, dtype=np.int64)
    lc = np.zeros(n_classes, dtype=np.int64)
    rc = np.zeros(n_classes, dtype=np.int64)
    counts = np.zeros(n_classes, dtype=np.int64)
    presorted = np.empty((m, n), dtype=np.int64)
    for f in range(m):
        presorted[f, :] = np.argsort(X[:, f], kind="mergesort")
    w = np.zeros(n, dtype=np.int64)
    order = np.empty((m, n), dtype=np.int64)
    goes_left = np.zeros(n, dtype=np.bool_)
    buf = np.empty(n, dtype=np.int64)
    stack = np.empty((cap, 4), dtype=np.int64)

    used = 0
    for t in range(n_trees):
        base = used
        offsets[t] = base
        # a bootstrap sample is held as per-row multiplicities
        if bootstrap:
            w[:] = 0
            for i in range(n):
                w[np.random.randint(0, n)] += 1
        else:
            w[:] = 1
        n_in = 0
        for f in range(m):
            n_in = 0
            for i in range(n):
                r = presorted[f, i]
                if w[r] > 0:
                    order[f, n_in] = r
                    n_in += 1
        n_nodes = 1
        stack[0, 0] = 0
        stack[0, 1] = 0
        stack[0, 2] = n_in
        stack[0, 3] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top, 0]
            start = stack[top, 1]
            end = stack[top, 2]
            depth = stack[top, 3]
            counts[:] = 0
            size = 0
            for i in range(start, end):
                r = order[0, i]
                counts[y[r]] += w[r]
                size += w[r]
            value[base + node] = _majority(counts)
            pure = counts[value[base + node]] == size
            if pure or size < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
                continue
            feats = np.random.permutation(m)
            scored = 0
            best = np.inf
            best_f = -1
            best_thr = 0.0
            for fi in range(m):
                f = feats[fi]
                if is_cat[f]:
                    ok, score, thr = _best_categorical(
                        X, y, w, order, start, end, f, n_classes, n_cats[f], min_leaf, table, tot
                    )
                else:
                    ok, score, thr = _best_numeric(
                        X, y, w, order, start, end, f, n_classes, min_leaf, lc, rc
                    )
                if not ok:
                    continue
                scored += 1
                if score < best:
                    best = score
                    best_f = f
                    best_thr = thr
                if scored >= mtry:
                    break
            if best_f < 0:
                continue
            n_left = 0
            for i in range(start, end):
                r = order[0, i]
                xv = X[r, best_f]
                gl = (xv == best_thr) if is_cat[best_f] else (xv <= best_thr)
                goes_left[r] = gl
                if gl:
                    n_left += 1
            mid = start + n_left
            # stable partition keeps every feature's order sorted in both children
            for f in range(m):
                li = start
                ri = 0
                for i in range(start, end):
                    r = order[f, i]
                    if goes_left[r]:
                        order[f, li] = r
                        li += 1
                    else:
                        buf[ri] = r
                        ri += 1
                for i in range(ri):
                    order[f, mid + i] = buf[i]
            feature[base + node] = best_f
            threshold[base + node] = best_thr
            lnode = n_nodes
            rnode = n_nodes + 1
            n_nodes += 2
            left[base + node] = lnode
            right[base + node] = rnode
            stack[top, 0] = rnode
            stack[top, 1] = mid
            stack[top, 2] = end
            stack[top, 3] = depth + 1
            stack[top + 1, 0] = lnode
            stack[top + 1, 1] = start
            stack[top + 1, 2] = mid
            stack[top + 1, 3] = depth + 1
            top += 2
        used += n_nodes
    offsets[n_trees] = used
    return (
        feature[:used].copy(), threshold[:used].copy(), left[:used].copy(),
        right[:used].copy(), value[:used].copy(), offsets,
    )


@numba.njit(cache=True)
def _predict_forest(X, is_cat, n_classes, feature, threshold, left, right, value, offsets):
    n = X.shape[0]
    n_trees = offsets.shape[0] - 1
    out = np.empty(n, dtype=np.int64)
    votes = np.zeros(n_classes, dtype=np.int64)
    for i in range(n):
        votes[:] = 0
        for t in range(n_trees):
            base = offsets[t]
            node = 0
            while feature[base + node] != LEAF:
                f = feature[base + node]
                xv = X[i, f]
                if is_cat[f]:
                    go_left = xv == threshold[base + node]
                else:
                    go_left = xv <= threshold[base + node]
                node = left[base + node] if go_left else right[base + node]
            votes[value[base + node]] += 1
        out[i] = _majority(votes)
    return out


@dataclass(frozen=True, eq=False)
class ForestModel:
    n_classes: int
    is_cat: np.ndarray
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    offsets: np.ndarray

    @property
    def n_trees(self) -> int:
        return self.offsets.shape[0] - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.array(X, dtype=np.float64, order="C")
        return _predict_forest(
            X, self.is_cat, self.n_classes, self.feature, self.threshold,
            self.left, self.right, self.value, self.offsets,
        )


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    is_cat: np.ndarray | None = None,
    n_cats: np.ndarray | None = None,
    n_trees: int = 100,
    mtry: int | None = None,
    max_depth: int | None = None,
    min_leaf: int = 1,
    bootstrap: bool = True,
    seed: int = 0,
) -> ForestModel:
    # fresh writable copies keep numba on a single compiled signature
    X = np.array(X, dtype=np.float64, order="C")
    y = np.array(y, dtype=np.int64)
    m = X.shape[1]
    if is_cat is None:
        is_cat = np.zeros(m, dtype=np.bool_)
    if n_cats is None:
        n_cats = np.zeros(m, dtype=np.int64)
    is_cat = np.ascontiguousarray(is_cat, dtype=np.bool_)
    n_cats = np.ascontiguousarray(n_cats, dtype=np.int64)
    if mtry is None:
        mtry = math.ceil(math.sqrt(m))
    depth = -1 if max_depth is None else int(max_depth)
    parts = _fit_forest(
        X, y, is_cat, n_cats, int(n_classes), int(n_trees), int(mtry), depth,
        int(min_leaf), bool(bootstrap), int(seed),
    )
    return ForestModel(int(n_classes), is_cat, *parts)
