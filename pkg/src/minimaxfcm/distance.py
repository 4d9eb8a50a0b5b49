"""Object-to-centroid dissimilarities.

Both measures return the quantity that enters the per-view cost directly:
the squared Euclidean distance, or the cosine distance ``1 - cos(x, v)``
used in its place for document data.
"""

from enum import Enum

import numpy as np


class DistanceMeasure(str, Enum):
    SQUARED_EUCLIDEAN = "squared_euclidean"
    COSINE = "cosine"

    @classmethod
    def parse(cls, value):
        """Accept enum members, their values, or the manifest alias ``euclidean``."""
        if isinstance(value, cls):
            return value
        if value == "euclidean":
            return cls.SQUARED_EUCLIDEAN
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown distance measure {value!r}") from None

    @property
    def manifest_name(self):
        return "euclidean" if self is DistanceMeasure.SQUARED_EUCLIDEAN else "cosine"


def squared_distance(x, v, measure=DistanceMeasure.SQUARED_EUCLIDEAN):
    """Dissimilarity between two feature vectors.

    A zero vector under the cosine measure is at distance 1 from everything.
    """
    measure = DistanceMeasure.parse(measure)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise ValueError(f"dimension mismatch: {x.shape} vs {v.shape}")
    if measure is DistanceMeasure.SQUARED_EUCLIDEAN:
        diff = x - v
        return float(np.dot(diff, diff))
    nx = np.sqrt(np.dot(x, x))
    nv = np.sqrt(np.dot(v, v))
    if nx == 0.0 or nv == 0.0:
        return 1.0
    return float(max(1.0 - np.dot(x, v) / (nx * nv), 0.0))


def pairwise(X, V, measure=DistanceMeasure.SQUARED_EUCLIDEAN):
    """Distances from every row of ``X`` (N x D) to every row of ``V`` (K x D).

    Returns an N x K array. The Euclidean branch sums explicit squared
    differences so that a row equal to a centroid gives exactly 0.
    """
    measure = DistanceMeasure.parse(measure)
    X = np.asarray(X, dtype=float)
    V = np.asarray(V, dtype=float)
    if X.ndim != 2 or V.ndim != 2 or X.shape[1] != V.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape} vs {V.shape}")
    out = np.empty((X.shape[0], V.shape[0]))
    if measure is DistanceMeasure.SQUARED_EUCLIDEAN:
        for c in range(V.shape[0]):
            diff = X - V[c]
            out[:, c] = np.einsum("ij,ij->i", diff, diff)
        return out

    x_norm = np.sqrt(np.einsum("ij,ij->i", X, X))
    v_norm = np.sqrt(np.einsum("ij,ij->i", V, V))
    for c in range(V.shape[0]):
        dots = X @ V[c]
        denom = x_norm * v_norm[c]
        with np.errstate(divide="ignore", invalid="ignore"):
            col = 1.0 - dots / denom
        col[denom == 0.0] = 1.0
        np.maximum(col, 0.0, out=col)
        out[:, c] = col
    return out
