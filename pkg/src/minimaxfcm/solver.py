"""MinimaxFCM: consensus fuzzy c-means over several views with learned view weights.

The optimizer alternates three closed-form blocks:

* memberships ``U`` (K x N, columns on the simplex) minimizing the weighted
  cost with centroids and weights fixed,
* per-view centroids, the usual fuzzy weighted means,
* view weights ``alpha`` (on the simplex) *maximizing* ``sum_p alpha_p**gamma * Q_p``.

``Q_p`` is the fuzzy c-means cost of view ``p`` under the shared memberships.
A view with a large cost receives a large weight, so the next membership step
works hardest to bring that cost down.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .distance import DistanceMeasure, pairwise
from .initialization import InitialState, farthest_first_indices, init_view_weights, initial_state

log = logging.getLogger(__name__)

COST_FLOOR = 1e-12


class NumericalError(FloatingPointError):
    """A non-finite value appeared during the alternation."""

    def __init__(self, iteration, quantity):
        super().__init__(f"non-finite {quantity} at iteration {iteration}")
        self.iteration = iteration
        self.quantity = quantity


@dataclass(frozen=True)
class SolverConfig:
    n_clusters: int
    gamma: float = 0.5
    m: float = 1.5
    epsilon: float = 1e-5
    max_iter: int = 100
    measure: DistanceMeasure = DistanceMeasure.SQUARED_EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "measure", DistanceMeasure.parse(self.measure))
        if int(self.n_clusters) != self.n_clusters or self.n_clusters < 1:
            raise ValueError(f"K must be a positive integer, got {self.n_clusters}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        if not self.m > 1.0:
            raise ValueError(f"fuzzifier m must exceed 1, got {self.m}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")


@dataclass(frozen=True)
class IterationState:
    iteration: int
    memberships: np.ndarray
    centroids: list
    alpha: np.ndarray
    view_costs: np.ndarray
    objective: float
    delta: float


@dataclass(frozen=True)
class ClusteringResult:
    labels: np.ndarray
    memberships: np.ndarray
    centroids: list
    alpha: np.ndarray
    gamma: float
    view_costs: np.ndarray
    objective_trace: list
    iterations: int
    converged: bool
    degenerate_clusters: list = field(default_factory=list)

    @property
    def effective_weights(self):
        return effective_weights(self.alpha, self.gamma)


def _views(data):
    views = getattr(data, "views", None)
    if views is not None:
        return [v.data for v in views]
    return [np.asarray(x, dtype=float) for x in data]


def effective_weights(alpha, gamma):
    """``alpha ** gamma``; with gamma == 0 every view weighs 1."""
    return np.power(np.asarray(alpha, dtype=float), gamma)


def distances(views, centroids, measure):
    """Per-view N x K distance matrices."""
    return [pairwise(X, V, measure) for X, V in zip(views, centroids)]


def view_cost(memberships, centroids, data, m, measure=DistanceMeasure.SQUARED_EUCLIDEAN, dist=None):
    """Fuzzy c-means cost of one view: sum over c, i of u_ci**m * d(x_i, v_c)."""
    if dist is None:
        dist = pairwise(data, centroids, measure)
    w = np.power(memberships, m)
    return float(np.sum(w * dist.T))


def view_costs(memberships, centroids, views, m, measure, dists=None):
    views = _views(views)
    if dists is None:
        dists = distances(views, centroids, measure)
    return np.array([view_cost(memberships, None, None, m, dist=d) for d in dists])


def objective(memberships, centroids, alpha, views, config):
    """Weighted cost ``sum_p alpha_p**gamma * Q_p``."""
    q = view_costs(memberships, centroids, views, config.m, config.measure)
    return float(np.dot(effective_weights(alpha, config.gamma), q))


def memberships_from_distances(agg, m):
    """Membership update for an N x K matrix of aggregated distances.

    Computes ``u_ci = 1 / sum_j (a_ic / a_ij)**(1/(m-1))`` in the equivalent
    normalized form ``a_ic**(-1/(m-1)) / sum_j a_ij**(-1/(m-1))``, evaluated
    in log space. Objects at zero distance from one or more centroids split
    their membership evenly among those centroids.
    """
    agg = np.asarray(agg, dtype=float)
    n, k = agg.shape
    zero = agg <= 0.0
    singular = zero.any(axis=1)
    u = np.empty((k, n))

    regular = ~singular
    if regular.any():
        a = agg[regular]
        with np.errstate(divide="ignore"):
            logits = -np.log(a) / (m - 1.0)
        logits -= logits.max(axis=1, keepdims=True)
        w = np.exp(logits)
        u[:, regular] = (w / w.sum(axis=1, keepdims=True)).T
    if singular.any():
        z = zero[singular].astype(float)
        u[:, singular] = (z / z.sum(axis=1, keepdims=True)).T
    return u


def aggregated_distances(dists, alpha, gamma):
    """``a_ic = sum_p alpha_p**gamma * d_p(x_i, v_c)`` as an N x K array."""
    weights = effective_weights(alpha, gamma)
    agg = np.zeros_like(dists[0])
    for w, d in zip(weights, dists):
        agg += w * d
    return agg


def update_membership(centroids, alpha, views, config, dists=None):
    views = _views(views)
    if dists is None:
        dists = distances(views, centroids, config.measure)
    return memberships_from_distances(aggregated_distances(dists, alpha, config.gamma), config.m)


def update_centroids(memberships, views, m, previous=None):
    """Fuzzy weighted means per view and cluster.

    A cluster whose memberships are all zero keeps its ``previous`` centroid
    (or NaN when none is supplied).
    """
    views = _views(views)
    w = np.power(memberships, m)
    mass = w.sum(axis=1)
    empty = mass == 0.0
    safe = np.where(empty, 1.0, mass)
    out = []
    for p, X in enumerate(views):
        V = (w @ X) / safe[:, None]
        if empty.any():
            V[empty] = np.nan if previous is None else previous[p][empty]
        out.append(V)
    return out


def update_view_weights(costs, gamma):
    """Weights maximizing ``sum_p alpha_p**gamma * Q_p`` over the simplex.

    ``alpha_p = 1 / sum_j (Q_p / Q_j)**(1/(gamma-1))``, which equals
    ``Q_p**(1/(1-gamma)) / sum_j Q_j**(1/(1-gamma))``; the latter is what is
    evaluated, in log space. Costs are floored at 1e-12.
    """
    q = np.maximum(np.asarray(costs, dtype=float), COST_FLOOR)
    logits = np.log(q) / (1.0 - gamma)
    logits -= logits.max()
    w = np.exp(logits)
    return w / w.sum()


def harden(memberships):
    """Per-object argmax over clusters; the lowest index wins ties."""
    return np.argmax(memberships, axis=0)


def fit(dataset, config, initial=None, callback: Optional[Callable[[IterationState], None]] = None):
    """Run the alternation from ``initial`` (farthest-first seeds by default).

    ``dataset`` is a normalized MultiViewDataset or a sequence of N x D arrays.
    Each sweep updates memberships, then centroids, then weights, and stops once
    the Frobenius norm of the membership change drops below ``config.epsilon``.
    """
    views = _views(dataset)
    n = views[0].shape[0]
    if any(X.shape[0] != n for X in views):
        raise ValueError("all views must have the same number of rows")
    if config.n_clusters > n:
        raise ValueError(f"K exceeds N ({config.n_clusters} > {n})")

    if initial is None:
        if hasattr(dataset, "views"):
            initial = initial_state(dataset, config.n_clusters, config.measure)
        else:
            cents = [X[farthest_first_indices(X, config.n_clusters, config.measure)].copy() for X in views]
            initial = InitialState(centroids=cents, alpha=init_view_weights(len(views)))

    centroids = [np.array(V, dtype=float, copy=True) for V in initial.centroids]
    alpha = np.array(initial.alpha, dtype=float, copy=True)
    if len(centroids) != len(views) or len(alpha) != len(views):
        raise ValueError("initial state does not match the number of views")
    for V, X in zip(centroids, views):
        if V.shape != (config.n_clusters, X.shape[1]):
            raise ValueError(f"initial centroids have shape {V.shape}, expected {(config.n_clusters, X.shape[1])}")

    u_prev = None
    trace = []
    degenerate = set()
    converged = False
    costs = None
    u = None
    dists = distances(views, centroids, config.measure)
    for it in range(1, config.max_iter + 1):
        u = update_membership(centroids, alpha, views, config, dists=dists)
        if not np.all(np.isfinite(u)):
            raise NumericalError(it, "memberships")

        mass = np.power(u, config.m).sum(axis=1)
        for c in np.flatnonzero(mass == 0.0):
            if c not in degenerate:
                log.warning("cluster %d lost all membership at iteration %d; centroid frozen", c, it)
            degenerate.add(int(c))
        centroids = update_centroids(u, views, config.m, previous=centroids)
        if not all(np.all(np.isfinite(V)) for V in centroids):
            raise NumericalError(it, "centroids")

        dists = distances(views, centroids, config.measure)
        costs = np.array([view_cost(u, None, None, config.m, dist=d) for d in dists])
        if not np.all(np.isfinite(costs)):
            raise NumericalError(it, "view costs")
        alpha = update_view_weights(costs, config.gamma)
        if not np.all(np.isfinite(alpha)):
            raise NumericalError(it, "view weights")

        obj = float(np.dot(effective_weights(alpha, config.gamma), costs))
        trace.append(obj)
        delta = np.inf if u_prev is None else float(np.linalg.norm(u - u_prev))
        if callback is not None:
            callback(IterationState(it, u, centroids, alpha, costs, obj, delta))
        if delta < config.epsilon:
            converged = True
            break
        u_prev = u

    if not converged:
        log.info("no convergence within %d iterations", config.max_iter)
    return ClusteringResult(
        labels=harden(u),
        memberships=u,
        centroids=centroids,
        alpha=alpha,
        gamma=config.gamma,
        view_costs=costs,
        objective_trace=trace,
        iterations=len(trace),
        converged=converged,
        degenerate_clusters=sorted(degenerate),
    )
