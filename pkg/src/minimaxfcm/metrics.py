"""External clustering criteria: matched accuracy, NMI and F-measure."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class ContingencyTable:
    """``counts[c, p]`` objects shared by cluster ``c`` and class ``p``."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.size == 0:
            raise ValueError("contingency counts must be a non-empty 2-D array")
        if np.any(counts < 0):
            raise ValueError("contingency counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def cluster_sizes(self):
        return self.counts.sum(axis=1)

    @property
    def class_sizes(self):
        return self.counts.sum(axis=0)

    @property
    def n(self):
        return int(self.counts.sum())


@dataclass(frozen=True)
class EvaluationReport:
    accuracy: float
    nmi: float
    f_measure: float
    matching: dict

    def as_dict(self):
        return {
            "accuracy": self.accuracy,
            "nmi": self.nmi,
            "f_measure": self.f_measure,
            "matching": {str(k): v for k, v in sorted(self.matching.items())},
        }


def contingency(labels, truth, n_clusters=None, n_classes=None):
    labels = np.asarray(labels, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if labels.shape != truth.shape or labels.ndim != 1:
        raise ValueError(f"length mismatch: {labels.shape} labels vs {truth.shape} classes")
    if labels.size == 0:
        raise ValueError("cannot tabulate empty labelings")
    if labels.min() < 0 or truth.min() < 0:
        raise ValueError("labels must be nonnegative")
    k = int(labels.max()) + 1 if n_clusters is None else n_clusters
    m = int(truth.max()) + 1 if n_classes is None else n_classes
    counts = np.zeros((k, m), dtype=np.int64)
    np.add.at(counts, (labels, truth), 1)
    return ContingencyTable(counts)


def _xlogx_ratio(counts, n):
    # sum of n_x log(n_x / n) over nonzero n_x
    nz = counts[counts > 0].astype(float)
    return float(np.sum(nz * np.log(nz / n)))


def nmi(table):
    """Normalized mutual information, natural log.

    Zero when either labeling has zero entropy, except for a single cluster
    against a single class, which scores 1.
    """
    counts = table.counts.astype(float)
    n = float(table.n)
    nc = table.cluster_sizes.astype(float)
    npc = table.class_sizes.astype(float)
    hc = _xlogx_ratio(nc, n)
    hp = _xlogx_ratio(npc, n)
    if hc == 0.0 or hp == 0.0:
        return 1.0 if hc == 0.0 and hp == 0.0 else 0.0
    c_idx, p_idx = np.nonzero(counts)
    ncp = counts[c_idx, p_idx]
    mi = np.sum(ncp * np.log(n * ncp / (nc[c_idx] * npc[p_idx])))
    # rounding can push a perfect match a few ulps past 1
    return float(min(max(mi / np.sqrt(hc * hp), 0.0), 1.0))


def f_measure(table):
    """Class-size weighted mean, over classes, of the best F score of any cluster."""
    counts = table.counts.astype(float)
    nc = table.cluster_sizes.astype(float)[:, None]
    npc = table.class_sizes.astype(float)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(nc > 0, counts / nc, 0.0)
        recall = np.where(npc > 0, counts / npc, 0.0)
        denom = precision + recall
        f = np.where(denom > 0, 2.0 * precision * recall / denom, 0.0)
    best = f.max(axis=0)
    return float(np.sum(table.class_sizes * best) / table.n)


def accuracy(table):
    """Fraction of objects covered by the best one-to-one cluster/class matching.

    Returns ``(accuracy, matching)`` where ``matching`` maps cluster -> class.
    Extra clusters or classes stay unmatched and contribute nothing.
    """
    rows, cols = linear_sum_assignment(table.counts, maximize=True)
    matched = int(table.counts[rows, cols].sum())
    return matched / table.n, {int(r): int(c) for r, c in zip(rows, cols)}


def evaluate(labels, truth):
    table = contingency(labels, truth)
    acc, matching = accuracy(table)
    return EvaluationReport(accuracy=acc, nmi=nmi(table), f_measure=f_measure(table), matching=matching)
