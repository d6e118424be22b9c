"""Gradient boosting over regression trees, exact and histogram-binned.

``fit_gbm`` grows each round's tree with the exact presorted split scan;
``fit_hist_gbm`` quantile-bins features once and scans per-node
histograms built by a single flat ``bincount``, with the usual
parent-minus-sibling subtraction trick. Under squared error the Newton
("second order") step differs from plain residual fitting only by the
L2 leaf penalty: leaves become ``sum(residual) / (count + l2)`` and the
same shrinkage enters the split gain.

Training loss is recorded per round; with learning rate in (0, 2) it is
mathematically non-increasing, and tests assert it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DiazoirError
from .trees import (
    ExactTreeBuilder,
    RegressionTree,
    TreeEnsemble,
    TreeParams,
    presort,
    validate_training_data,
)

_GAIN_EPS = 1e-9


@dataclass
class GbmParams:
    n_rounds: int = 500
    learning_rate: float = 0.05
    max_depth: int = 6
    order: str = "first"  # "first" | "second"
    l2_leaf: float = 1.0
    min_samples_leaf: int = 1
    n_bins: int = 255  # histogram variant only

    def effective_l2(self) -> float:
        if self.order not in ("first", "second"):
            raise DiazoirError(f"unknown boosting order {self.order!r}")
        return self.l2_leaf if self.order == "second" else 0.0


def fit_gbm(X, y, params: GbmParams | None = None) -> TreeEnsemble:
    """Boosted trees with exact split search on presorted columns."""
    X, y = validate_training_data(X, y)
    params = params or GbmParams()
    l2 = params.effective_l2()
    base = float(np.mean(y))
    pred = np.full(len(y), base)
    sorted_cols = presort(X)
    tree_params = TreeParams(max_depth=params.max_depth,
                             min_samples_leaf=params.min_samples_leaf)
    trees: list[RegressionTree] = []
    losses: list[float] = []
    for _ in range(params.n_rounds):
        residual = y - pred
        builder = ExactTreeBuilder(X, residual, None, tree_params,
                                   sorted_cols=sorted_cols, l2=l2)
        tree = builder.build()
        trees.append(tree)
        pred = pred + params.learning_rate * tree.predict(X)
        losses.append(float(np.mean((y - pred) ** 2)))
    return TreeEnsemble(trees=trees, kind="boosting",
                        learning_rate=params.learning_rate,
                        base_score=base, train_loss=losses)


# --- histogram variant ---

class FeatureBins:
    """Per-feature quantile bin edges and integer codes.

    Edges are midpoints between adjacent distinct values (all of them
    when a feature has at most ``n_bins`` distinct values, else at
    population quantiles), so lossless binning reproduces the exact
    engine's thresholds.
    """

    def __init__(self, X: np.ndarray, n_bins: int):
        if n_bins < 2 or n_bins > 256:
            raise DiazoirError("n_bins must be in [2, 256]")
        self.n_bins = n_bins
        n, p = X.shape
        self.edges: list[np.ndarray] = []
        codes = np.empty((n, p), dtype=np.uint8)
        targets = np.arange(1, n_bins) * (n / n_bins)
        for j in range(p):
            col = X[:, j]
            distinct, counts = np.unique(col, return_counts=True)
            if len(distinct) <= 1:
                edges = np.empty(0)
            elif len(distinct) <= n_bins:
                edges = 0.5 * (distinct[:-1] + distinct[1:])
            else:
                cum = np.cumsum(counts)
                idx = np.searchsorted(cum, targets, side="left")
                idx = np.unique(np.clip(idx, 0, len(distinct) - 2))
                edges = 0.5 * (distinct[idx] + distinct[idx + 1])
                edges = np.unique(edges)
            self.edges.append(edges)
            codes[:, j] = np.searchsorted(edges, col, side="left")
        self.codes = codes

    def code_matrix(self) -> np.ndarray:
        return self.codes


class _HistTreeBuilder:
    """One tree from pre-binned features via flat-bincount histograms."""

    def __init__(self, flat_codes: np.ndarray, codes: np.ndarray,
                 edges: list[np.ndarray], g: np.ndarray,
                 max_depth: int, min_samples_leaf: int, l2: float,
                 n_bins: int, n_features_total: int):
        self.flat_codes = flat_codes  # n x p int32: code + feature * n_bins
        self.codes = codes
        self.edges = edges
        self.g = g
        self.max_depth = max_depth
        self.msl = min_samples_leaf
        self.l2 = l2
        self.n_bins = n_bins
        self.p = codes.shape[1]
        self.n_features_total = n_features_total

    def _histograms(self, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        flat = self.flat_codes[rows].ravel()
        size = self.p * self.n_bins
        hist_g = np.bincount(flat, weights=np.repeat(self.g[rows], self.p),
                             minlength=size).reshape(self.p, self.n_bins)
        hist_n = np.bincount(flat, minlength=size).reshape(
            self.p, self.n_bins).astype(np.float64)
        return hist_g, hist_n

    def build(self) -> RegressionTree:
        from .trees import _NodeBuffer

        buffer = _NodeBuffer()
        rows = np.arange(len(self.g), dtype=np.int64)
        hist_g, hist_n = self._histograms(rows)
        root = buffer.add(self._leaf_value(rows), float(len(rows)))
        stack = [(root, rows, hist_g, hist_n, 0)]
        while stack:
            node, rows, hist_g, hist_n, depth = stack.pop()
            split = self._find_split(hist_g, hist_n, depth, len(rows))
            if split is None:
                continue
            feat, bin_pos = split
            left_rows = rows[self.codes[rows, feat] <= bin_pos]
            right_rows = rows[self.codes[rows, feat] > bin_pos]
            if len(left_rows) <= len(right_rows):
                small_rows, big_rows = left_rows, right_rows
            else:
                small_rows, big_rows = right_rows, left_rows
            small_g, small_n = self._histograms(small_rows)
            big_g = hist_g - small_g
            big_n = hist_n - small_n
            if small_rows is left_rows:
                lg, ln, rg, rn = small_g, small_n, big_g, big_n
            else:
                lg, ln, rg, rn = big_g, big_n, small_g, small_n
            left = buffer.add(self._leaf_value(left_rows), float(len(left_rows)))
            right = buffer.add(self._leaf_value(right_rows), float(len(right_rows)))
            buffer.set_split(node, feat, float(self.edges[feat][bin_pos]),
                             left, right)
            stack.append((right, right_rows, rg, rn, depth + 1))
            stack.append((left, left_rows, lg, ln, depth + 1))
        return buffer.freeze(self.n_features_total)

    def _leaf_value(self, rows: np.ndarray) -> float:
        return float(self.g[rows].sum() / (len(rows) + self.l2))

    def _find_split(self, hist_g, hist_n, depth: int, m: int):
        if depth >= self.max_depth or m < 2 * self.msl or m < 2:
            return None
        cg = np.cumsum(hist_g, axis=1)[:, :-1]
        cn = np.cumsum(hist_n, axis=1)[:, :-1]
        # bin totals are identical for every feature row
        g_total = float(hist_g[0].sum())
        n_total = float(hist_n[0].sum())
        gr = g_total - cg
        nr = n_total - cn
        valid = (cn >= self.msl) & (nr >= self.msl)
        if not valid.any():
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            proxy = cg * cg / (cn + self.l2) + gr * gr / (nr + self.l2)
        proxy[~valid] = -np.inf
        flat_best = int(np.argmax(proxy))
        feat, bin_pos = divmod(flat_best, proxy.shape[1])
        parent = g_total * g_total / (n_total + self.l2)
        gain = proxy[feat, bin_pos] - parent
        if not np.isfinite(gain) or gain <= _GAIN_EPS * (abs(parent) + 1.0):
            return None
        if bin_pos >= len(self.edges[feat]):
            return None
        return feat, bin_pos


def fit_hist_gbm(X, y, params: GbmParams | None = None) -> TreeEnsemble:
    """Boosted trees with histogram split search on quantile-binned features."""
    X, y = validate_training_data(X, y)
    params = params or GbmParams()
    l2 = params.effective_l2()
    bins = FeatureBins(X, params.n_bins)
    n, p = X.shape
    offsets = (np.arange(p, dtype=np.int32) * params.n_bins)[None, :]
    flat_codes = bins.codes.astype(np.int32) + offsets

    base = float(np.mean(y))
    pred = np.full(n, base)
    trees: list[RegressionTree] = []
    losses: list[float] = []
    for _ in range(params.n_rounds):
        residual = y - pred
        builder = _HistTreeBuilder(flat_codes, bins.codes, bins.edges, residual,
                                   params.max_depth, params.min_samples_leaf,
                                   l2, params.n_bins, p)
        tree = builder.build()
        trees.append(tree)
        pred = pred + params.learning_rate * tree.predict(X)
        losses.append(float(np.mean((y - pred) ** 2)))
    return TreeEnsemble(trees=trees, kind="boosting",
                        learning_rate=params.learning_rate,
                        base_score=base, train_loss=losses)
