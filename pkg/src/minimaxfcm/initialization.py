"""Deterministic seeding: farthest-first centroid selection and uniform view weights."""

from dataclasses import dataclass

import numpy as np

from .distance import DistanceMeasure, pairwise


@dataclass(frozen=True)
class InitialState:
    centroids: list
    alpha: np.ndarray
    indices: list = None


def _total_distances(X, measure, block=1024):
    """Sum over all rows j of dist(x_i, x_j), for every i, in row blocks."""
    n = X.shape[0]
    totals = np.empty(n)
    for start in range(0, n, block):
        stop = min(start + block, n)
        totals[start:stop] = _block_distances(X[start:stop], X, measure).sum(axis=1)
    return totals


def _block_distances(A, X, measure):
    if measure is DistanceMeasure.SQUARED_EUCLIDEAN:
        # Gram expansion; only feeds a sum, exactness at zero is irrelevant here.
        sq_a = np.einsum("ij,ij->i", A, A)
        sq_x = np.einsum("ij,ij->i", X, X)
        d = sq_a[:, None] + sq_x[None, :] - 2.0 * (A @ X.T)
        return np.maximum(d, 0.0)
    return pairwise(A, X, measure)


def farthest_first_indices(X, n_clusters, measure=DistanceMeasure.SQUARED_EUCLIDEAN):
    """Row indices of the seeds chosen by max-min selection.

    The first seed minimizes the total distance to all rows; each later seed is
    the unchosen row whose distance to its nearest chosen seed is largest.
    Ties go to the lowest row index.
    """
    measure = DistanceMeasure.parse(measure)
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n_clusters < 1:
        raise ValueError("K must be at least 1")
    if n_clusters > n:
        raise ValueError(f"K exceeds N ({n_clusters} > {n})")

    chosen = [int(np.argmin(_total_distances(X, measure)))]
    nearest = pairwise(X, X[chosen[0]][None, :], measure)[:, 0]
    taken = np.zeros(n, dtype=bool)
    taken[chosen[0]] = True
    while len(chosen) < n_clusters:
        candidate = np.where(taken, -np.inf, nearest)
        t = int(np.argmax(candidate))
        chosen.append(t)
        taken[t] = True
        np.minimum(nearest, pairwise(X, X[t][None, :], measure)[:, 0], out=nearest)
    return chosen


def select_initial_centroids(view, n_clusters, measure=DistanceMeasure.SQUARED_EUCLIDEAN):
    """K x D array of seed rows copied from ``view`` (a ViewMatrix or array)."""
    X = np.asarray(getattr(view, "data", view), dtype=float)
    idx = farthest_first_indices(X, n_clusters, measure)
    return X[idx].copy()


def init_view_weights(n_views):
    if n_views < 1:
        raise ValueError("at least one view is required")
    return np.full(n_views, 1.0 / n_views)


def initial_state(dataset, n_clusters, measure=None):
    """Seeds for every view of a (normalized) dataset plus uniform weights."""
    measure = dataset.distance if measure is None else DistanceMeasure.parse(measure)
    indices = [farthest_first_indices(v.data, n_clusters, measure) for v in dataset.views]
    centroids = [v.data[idx].copy() for v, idx in zip(dataset.views, indices)]
    return InitialState(centroids=centroids, alpha=init_view_weights(dataset.n_views), indices=indices)
