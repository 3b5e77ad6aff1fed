"""Embedding evaluation: clustering, classification, regional variability.

Hand-rolled k-means, adjusted Rand, rank-statistic AUC with a gradient
descent logistic scorer, mean squared deviation (MSD) within node regions,
Welch two-sample tests on MSD replications, and stratified k-fold subject
classification from MSD feature vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy.special import expit, stdtr, stdtrit
from scipy.stats import rankdata

from .generators import Partition


@dataclass
class LabelSet:
    """Node -> category mapping; embedded nodes absent here are excluded."""

    labels: dict

    def categories(self) -> list:
        return sorted(set(self.labels.values()), key=str)

    def label_of(self, node: Hashable):
        return self.labels[node]

    def aligned(self, node_ids: Sequence) -> tuple[list, np.ndarray]:
        """Per-node labels in registry order plus a labeled mask."""
        mask = np.array([u in self.labels for u in node_ids], dtype=bool)
        labs = [self.labels.get(u) for u in node_ids]
        return labs, mask

    def to_partition(self, node_ids: Sequence) -> Partition:
        labs, mask = self.aligned(node_ids)
        if not mask.all():
            missing = [u for u, ok in zip(node_ids, mask) if not ok][:10]
            raise ValueError(f"nodes without labels: {missing}")
        return Partition.from_mapping({u: lab for u, lab in zip(node_ids, labs)})


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(restart,))))


def _kmeans_once(points: np.ndarray, k: int, rng: np.random.Generator, max_iter: int):
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[int(rng.integers(n))]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            cdf = np.cumsum(d2 / total)
            pick = int(np.searchsorted(cdf, rng.random(), side="right").clip(0, n - 1))
        else:
            pick = int(rng.integers(n))
        centers[j] = points[pick]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))

    assign = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        dists = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = np.argmin(dists, axis=1)  # ties -> lowest cluster index
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = points[assign == j]
            if members.shape[0]:  # empty clusters keep their centroid
                centers[j] = members.mean(axis=0)
    wcss = float(((points - centers[assign]) ** 2).sum())
    return assign, wcss


def kmeans(
    features: np.ndarray,
    k_clusters: int,
    seed: int,
    restarts: int = 10,
    max_iter: int = 300,
    node_ids: Sequence | None = None,
) -> Partition:
    """Lloyd's algorithm from k-means++ seeding, best of `restarts` by WCSS.

    Euclidean distance on raw rows; assignment ties break to the lowest
    cluster index; deterministic given the seed.
    """
    points = np.asarray(features, dtype=np.float64)
    n = points.shape[0]
    if k_clusters > n:
        raise ValueError(f"k_clusters {k_clusters} exceeds number of rows {n}")
    if k_clusters < 1:
        raise ValueError("k_clusters must be >= 1")
    best = None
    for restart in range(restarts):
        assign, wcss = _kmeans_once(points, k_clusters, _restart_rng(seed, restart), max_iter)
        if best is None or wcss < best[1]:
            best = (assign, wcss)
    nodes = list(node_ids) if node_ids is not None else list(range(n))
    return Partition(nodes=nodes, labels=best[0])


def _comb2(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float((x * (x - 1) / 2).sum())


def adjusted_rand(a: Partition, b: Partition) -> float:
    """Permutation-adjusted Rand index via the contingency-table formula."""
    if set(a.nodes) != set(b.nodes):
        raise ValueError("partitions cover different node sets")
    bl = np.array([b.label_of(u) for u in a.nodes], dtype=np.int64)
    al = a.labels
    n = al.size
    cont = np.zeros((int(al.max()) + 1, int(bl.max()) + 1))
    np.add.at(cont, (al, bl), 1.0)
    sum_ij = _comb2(cont.ravel())
    sum_a = _comb2(cont.sum(axis=1))
    sum_b = _comb2(cont.sum(axis=0))
    total = n * (n - 1) / 2
    expected = sum_a * sum_b / total if total else 0.0
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        return 1.0  # both partitions trivial and identical in structure
    return float((sum_ij - expected) / (max_index - expected))


def roc_auc(scores: np.ndarray, positives: np.ndarray) -> float:
    """Mann-Whitney rank AUC with tie-averaged ranks."""
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    n_pos = int(positives.sum())
    n_neg = positives.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    ranks = rankdata(scores)
    return float((ranks[positives].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def fit_logistic(
    x: np.ndarray, y: np.ndarray, lr: float = 0.1, iters: int = 1000
) -> tuple[np.ndarray, float]:
    """Unregularized logistic regression by full-batch gradient descent."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(iters):
        err = expit(x @ w + b) - y
        w -= lr * (x.T @ err) / n
        b -= lr * float(err.sum()) / n
    return w, b


def _standardize(train: np.ndarray, other: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mu = train.mean(axis=0)
    sd = train.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return (train - mu) / sd, (other - mu) / sd


def one_vs_all_auc(
    features: np.ndarray,
    labels: Sequence,
    target_category,
    train_fraction: float = 0.8,
    seed: int = 0,
    max_split_attempts: int = 100,
) -> float:
    """Held-out AUC of a one-vs-all logistic scorer for one category.

    Rows split train/test by the seed (resplit until both classes appear on
    both sides); features standardized on the training split; scores ranked
    on the held-out rows.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.array([lab == target_category for lab in labels], dtype=bool)
    if y.sum() < 2:
        raise ValueError(f"target category {target_category!r} has fewer than 2 members")
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    n = x.shape[0]
    n_train = int(round(train_fraction * n))
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed)))
    for _ in range(max_split_attempts):
        perm = rng.permutation(n)
        tr, te = perm[:n_train], perm[n_train:]
        if 0 < y[tr].sum() < tr.size and 0 < y[te].sum() < te.size:
            break
    else:
        raise ValueError("could not find a split with both classes on both sides")
    x_tr, x_te = _standardize(x[tr], x[te])
    w, b = fit_logistic(x_tr, y[tr])
    return roc_auc(x_te @ w + b, y[te])


def msd(features: np.ndarray, region_indices: Sequence[int]) -> float:
    """Mean squared deviation of region rows around their mean."""
    idx = np.asarray(region_indices, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("region is empty")
    rows = np.asarray(features, dtype=np.float64)[idx]
    center = rows.mean(axis=0)
    return float(((rows - center) ** 2).sum(axis=1).mean())


@dataclass
class MsdTestResult:
    """Welch two-sample comparison of MSD replications."""

    difference: float
    ci_low: float
    ci_high: float
    p_value: float
    t_stat: float
    dof: float
    degenerate: bool = False


def msd_group_test(
    msd_samples_g1: Sequence[float], msd_samples_g2: Sequence[float], alpha: float = 0.05
) -> MsdTestResult:
    """Two-sided Welch t-test on group MSD samples with a (1-alpha) CI.

    Zero pooled variance is flagged degenerate: identical groups give
    p = 1 by convention, disjoint constant groups give p = 0.
    """
    a = np.asarray(msd_samples_g1, dtype=np.float64)
    b = np.asarray(msd_samples_g2, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("each group needs at least 2 samples")
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    diff = float(a.mean() - b.mean())
    va, vb = a.var(ddof=1), b.var(ddof=1)
    se2 = va / a.size + vb / b.size
    if se2 == 0.0:
        p = 1.0 if diff == 0.0 else 0.0
        return MsdTestResult(diff, diff, diff, p, 0.0 if diff == 0 else np.inf, float(a.size + b.size - 2), degenerate=True)
    se = float(np.sqrt(se2))
    dof = se2**2 / ((va / a.size) ** 2 / (a.size - 1) + (vb / b.size) ** 2 / (b.size - 1))
    t = diff / se
    p = float(2.0 * stdtr(dof, -abs(t)))
    tcrit = float(stdtrit(dof, 1.0 - alpha / 2.0))
    return MsdTestResult(diff, diff - tcrit * se, diff + tcrit * se, p, t, float(dof))


@dataclass
class MsdReport:
    """Per-region MSD summary for two groups plus Welch comparisons."""

    group_names: tuple
    regions: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # (mean_g1, mean_g2, MsdTestResult)

    def add(self, region, samples_g1, samples_g2, alpha: float = 0.05) -> None:
        res = msd_group_test(samples_g1, samples_g2, alpha)
        self.regions.append(region)
        self.rows.append((float(np.mean(samples_g1)), float(np.mean(samples_g2)), res))


def _stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> list:
    """Round-robin deal of shuffled per-class indices into folds."""
    assignments = [[] for _ in range(folds)]
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if idx.size < folds:
            raise ValueError(f"class {cls!r} has {idx.size} members, fewer than {folds} folds")
        idx = idx[rng.permutation(idx.size)]
        for i, j in enumerate(idx):
            assignments[i % folds].append(int(j))
    return [np.array(sorted(fold), dtype=np.int64) for fold in assignments]


def _knn_predict(x_tr, y_tr, x_te, k: int) -> np.ndarray:
    d2 = ((x_te[:, None, :] - x_tr[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    preds = np.empty(x_te.shape[0], dtype=y_tr.dtype)
    for i in range(x_te.shape[0]):
        votes = np.bincount(y_tr[nearest[i]])
        preds[i] = int(np.argmax(votes))  # vote ties -> lowest class index
    return preds


@dataclass
class SubjectClassifyResult:
    method: str
    mean_accuracy: float
    std_error: float
    fold_accuracies: list
    best_k: int | None = None


def subject_classify(
    msd_vectors: np.ndarray,
    labels: Sequence,
    method: str = "knn",
    folds: int = 10,
    seed: int = 0,
    knn_grid: Sequence[int] = tuple(range(1, 31)),
) -> SubjectClassifyResult:
    """Stratified k-fold CV accuracy of subject labels from MSD features.

    knn reports the grid value with the highest mean accuracy (ties to the
    smallest k); logistic is binary-only, standardized per training fold.
    """
    x = np.asarray(msd_vectors, dtype=np.float64)
    classes = {lab: i for i, lab in enumerate(dict.fromkeys(labels))}
    y = np.array([classes[lab] for lab in labels], dtype=np.int64)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed)))
    fold_sets = _stratified_folds(y, folds, rng)

    def fold_accuracy(predict) -> list:
        accs = []
        for f in range(folds):
            te = fold_sets[f]
            tr = np.concatenate([fold_sets[g] for g in range(folds) if g != f])
            accs.append(float((predict(x[tr], y[tr], x[te]) == y[te]).mean()))
        return accs

    if method == "knn":
        best = None
        for k in knn_grid:
            accs = fold_accuracy(lambda xtr, ytr, xte, k=k: _knn_predict(xtr, ytr, xte, min(k, xtr.shape[0])))
            mean = float(np.mean(accs))
            if best is None or mean > best[0]:
                best = (mean, k, accs)
        mean, k, accs = best
        se = float(np.std(accs, ddof=1) / np.sqrt(folds))
        return SubjectClassifyResult("knn", mean, se, accs, best_k=int(k))
    if method == "logistic":
        if len(classes) != 2:
            raise ValueError("logistic subject classification requires exactly 2 classes")

        def predict(xtr, ytr, xte):
            xtr_s, xte_s = _standardize(xtr, xte)
            w, b = fit_logistic(xtr_s, ytr)
            return (xte_s @ w + b > 0).astype(np.int64)

        accs = fold_accuracy(predict)
        mean = float(np.mean(accs))
        se = float(np.std(accs, ddof=1) / np.sqrt(folds))
        return SubjectClassifyResult("logistic", mean, se, accs)
    raise ValueError(f"unknown method {method!r}; choose knn or logistic")
