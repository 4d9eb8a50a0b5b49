"""Seeded synthetic multi-view Gaussian clusters.

Random numbers come from numpy's ``PCG64`` bit generator seeded with
``SynthSpec.seed``; the same spec always yields a byte-identical dataset.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import MultiViewDataset, Normalization, ViewMatrix
from .distance import DistanceMeasure

GENERATOR = "numpy.random.PCG64"

INFORMATIVE = "informative"
NOISE = "noise"


@dataclass(frozen=True)
class SynthSpec:
    """Parameters for :func:`generate`.

    ``views`` lists one kind per view: ``"informative"``, ``"noise"`` or
    ``"copy:J"`` (a duplicate of view ``J``). ``dims`` is one dimension for
    all views or one per view; copies inherit the dimension of their source.
    ``separation`` is the distance between any two cluster centers in units
    of the within-cluster standard deviation ``sigma``.
    """

    n_per_cluster: int = 100
    n_clusters: int = 2
    dims: object = 5
    separation: float = 10.0
    views: tuple = (INFORMATIVE, INFORMATIVE)
    seed: int = 0
    sigma: float = 1.0
    normalization: Normalization = Normalization.NONE
    shuffle: bool = True
    name: str = "synthetic"

    def view_dims(self):
        if np.ndim(self.dims) == 0:
            return [int(self.dims)] * len(self.views)
        dims = [int(d) for d in self.dims]
        if len(dims) != len(self.views):
            raise ValueError("dims must give one dimension per view")
        return dims

    def validate(self):
        if self.n_per_cluster < 1 or self.n_clusters < 1:
            raise ValueError("n_per_cluster and n_clusters must be positive")
        if self.separation < 0:
            raise ValueError("separation must be nonnegative")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not self.views:
            raise ValueError("at least one view is required")
        kinds = [_parse_kind(v, i, len(self.views)) for i, v in enumerate(self.views)]
        if not any(k == INFORMATIVE for k, _ in kinds):
            raise ValueError("at least one informative view is required")
        if any(d < 1 for d in self.view_dims()):
            raise ValueError("view dimensions must be positive")
        return kinds


def _parse_kind(kind, index, n_views):
    if kind in (INFORMATIVE, NOISE):
        return kind, None
    if isinstance(kind, str) and kind.startswith("copy:"):
        try:
            src = int(kind.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad view kind {kind!r}") from None
        if not 0 <= src < n_views or src == index:
            raise ValueError(f"view {index} copies invalid view {src}")
        return "copy", src
    raise ValueError(f"bad view kind {kind!r}")


def cluster_centers(n_clusters, dim, separation, sigma=1.0):
    """Centers with every pairwise distance equal to ``separation * sigma``.

    Uses scaled basis vectors when ``dim >= n_clusters``; otherwise centers are
    spaced along the first axis (consecutive centers at the requested distance).
    """
    centers = np.zeros((n_clusters, dim))
    if dim >= n_clusters:
        centers[np.arange(n_clusters), np.arange(n_clusters)] = separation * sigma / np.sqrt(2.0)
    else:
        centers[:, 0] = np.arange(n_clusters) * separation * sigma
    return centers


def generate(spec):
    kinds = spec.validate()
    dims = spec.view_dims()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    k, per = spec.n_clusters, spec.n_per_cluster
    n = k * per
    labels = np.repeat(np.arange(k), per)
    if spec.shuffle:
        labels = labels[rng.permutation(n)]

    data = [None] * len(kinds)
    for p, (kind, _) in enumerate(kinds):
        if kind == INFORMATIVE:
            centers = cluster_centers(k, dims[p], spec.separation, spec.sigma)
            data[p] = centers[labels] + spec.sigma * rng.standard_normal((n, dims[p]))
        elif kind == NOISE:
            data[p] = spec.sigma * rng.standard_normal((n, dims[p]))
    for p, (kind, src) in enumerate(kinds):
        if kind == "copy":
            while kinds[src][0] == "copy":
                src = kinds[src][1]
            data[p] = data[src].copy()

    views = tuple(
        ViewMatrix(data=x, view_name=f"{kind}{p}", normalization=spec.normalization)
        for p, (x, (kind, _)) in enumerate(zip(data, kinds))
    )
    return MultiViewDataset(
        views=views, labels=labels, name=spec.name, distance=DistanceMeasure.SQUARED_EUCLIDEAN
    )
