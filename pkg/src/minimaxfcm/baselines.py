"""Single-view fuzzy c-means and the concatenated-view baseline.

This FCM is written independently of :mod:`minimaxfcm.solver` (scipy distances,
the ratio form of the membership rule) so that it can double as a reference
for the single-view case of the multi-view solver.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import concatenate_views
from .distance import DistanceMeasure
from .initialization import select_initial_centroids


@dataclass(frozen=True)
class FcmResult:
    labels: np.ndarray
    memberships: np.ndarray
    centroids: np.ndarray
    objective_trace: list
    iterations: int
    converged: bool


def _dissimilarity(X, V, measure):
    if measure is DistanceMeasure.SQUARED_EUCLIDEAN:
        return cdist(X, V, "sqeuclidean")
    with np.errstate(divide="ignore", invalid="ignore"):
        d = cdist(X, V, "cosine")
    zero_x = ~np.any(X != 0, axis=1)
    zero_v = ~np.any(V != 0, axis=1)
    d[zero_x, :] = 1.0
    d[:, zero_v] = 1.0
    return np.clip(d, 0.0, None)


def _fcm_memberships(d, m):
    # d is N x K; returns K x N
    n, k = d.shape
    u = np.zeros((k, n))
    hits = d == 0.0
    singular = hits.any(axis=1)
    if singular.any():
        u[:, singular] = (hits[singular] / hits[singular].sum(axis=1, keepdims=True)).T
    rows = ~singular
    if rows.any():
        dr = d[rows]
        ratios = dr[:, :, None] / dr[:, None, :]
        with np.errstate(over="ignore"):
            u[:, rows] = (1.0 / np.sum(ratios ** (1.0 / (m - 1.0)), axis=2)).T
    return u


def fcm_fit(view, config, initial_centroids=None):
    """Classical fuzzy c-means on one view.

    Uses ``config.n_clusters``, ``m``, ``epsilon``, ``max_iter`` and ``measure``
    from a :class:`~minimaxfcm.solver.SolverConfig`. Memberships are updated
    first, then centroids; iteration stops when the Frobenius norm of the
    membership change falls below ``epsilon``.
    """
    X = np.asarray(getattr(view, "data", view), dtype=float)
    k, m, measure = config.n_clusters, config.m, config.measure
    if k > X.shape[0]:
        raise ValueError(f"K exceeds N ({k} > {X.shape[0]})")
    if initial_centroids is None:
        initial_centroids = select_initial_centroids(X, k, measure)
    V = np.array(initial_centroids, dtype=float, copy=True)

    u_old = None
    trace = []
    converged = False
    for _ in range(config.max_iter):
        u = _fcm_memberships(_dissimilarity(X, V, measure), m)
        um = u ** m
        mass = um.sum(axis=1)
        for c in range(k):
            if mass[c] > 0:
                V[c] = um[c] @ X / mass[c]
        trace.append(float(np.sum(um * _dissimilarity(X, V, measure).T)))
        if u_old is not None and np.linalg.norm(u - u_old) < config.epsilon:
            converged = True
            break
        u_old = u

    return FcmResult(
        labels=np.argmax(u, axis=0),
        memberships=u,
        centroids=V,
        objective_trace=trace,
        iterations=len(trace),
        converged=converged,
    )


def fcm_concatenated(dataset, config, initial_centroids=None):
    """FCM on all (normalized) views stacked side by side."""
    return fcm_fit(concatenate_views(dataset), config, initial_centroids)
