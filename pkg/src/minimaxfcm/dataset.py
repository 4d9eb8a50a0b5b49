"""Multi-view datasets: manifest loading, per-view normalization, concatenation.

A manifest is a JSON document::

    {
      "name": "mf",
      "views": [{"name": "fourier", "path": "fou.csv",
                 "normalization": "unit_variance_inv_sqrt_dim", "header": false}],
      "labels": {"path": "labels.csv", "header": false},
      "distance": "euclidean"
    }

Relative paths are resolved against the manifest's directory.
"""

import csv
import hashlib
import json
import os
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .distance import DistanceMeasure


class DatasetError(ValueError):
    """Raised for unreadable or inconsistent dataset inputs."""


class Normalization(str, Enum):
    NONE = "none"
    UNIT_VARIANCE_INV_SQRT_DIM = "unit_variance_inv_sqrt_dim"
    L1_ROWS = "l1_rows"


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ViewMatrix:
    data: np.ndarray
    view_name: str = "view"
    normalization: Normalization = Normalization.NONE
    applied: bool = False

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise DatasetError(f"view {self.view_name!r}: expected a non-empty 2-D matrix")
        if not np.all(np.isfinite(data)):
            raise DatasetError(f"view {self.view_name!r}: non-finite entry")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    @property
    def dim(self):
        return self.data.shape[1]

    @property
    def n_objects(self):
        return self.data.shape[0]


@dataclass(frozen=True)
class MultiViewDataset:
    views: tuple
    labels: Optional[np.ndarray] = None
    name: str = "dataset"
    distance: DistanceMeasure = DistanceMeasure.SQUARED_EUCLIDEAN

    def __post_init__(self):
        views = tuple(self.views)
        if not views:
            raise DatasetError("a dataset needs at least one view")
        n = views[0].n_objects
        for v in views[1:]:
            if v.n_objects != n:
                raise DatasetError(
                    f"row-count mismatch: view {views[0].view_name!r} has {n} rows, "
                    f"view {v.view_name!r} has {v.n_objects}"
                )
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "distance", DistanceMeasure.parse(self.distance))
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.ndim != 1 or labels.shape[0] != n:
                raise DatasetError(
                    f"row-count mismatch: {labels.shape[0] if labels.ndim else 1} labels for {n} objects"
                )
            if not np.issubdtype(labels.dtype, np.integer):
                if not np.all(np.equal(np.mod(labels, 1), 0)):
                    raise DatasetError("labels must be integers")
            labels = labels.astype(np.int64)
            present = np.unique(labels)
            if present[0] != 0 or present[-1] != len(present) - 1:
                raise DatasetError("labels not contiguous from 0")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n_objects(self):
        return self.views[0].n_objects

    @property
    def n_views(self):
        return len(self.views)

    @property
    def n_classes(self):
        return None if self.labels is None else int(self.labels.max()) + 1

    @property
    def data(self):
        """The per-view matrices, in manifest order."""
        return [v.data for v in self.views]

    def content_hash(self):
        """SHA-256 over view matrices, labels and distance, independent of file layout."""
        h = hashlib.sha256()
        h.update(self.distance.value.encode())
        for v in self.views:
            h.update(v.view_name.encode())
            h.update(v.normalization.value.encode())
            h.update(b"1" if v.applied else b"0")
            h.update(np.asarray(v.data.shape, dtype=np.int64).tobytes())
            h.update(np.ascontiguousarray(v.data, dtype="<f8").tobytes())
        if self.labels is not None:
            h.update(np.ascontiguousarray(self.labels, dtype="<i8").tobytes())
        return h.hexdigest()


# -- normalization -----------------------------------------------------------

def _check_fresh(view):
    if view.applied:
        raise DatasetError(f"view {view.view_name!r} is already normalized")


def normalize_unit_variance_inv_sqrt_dim(view):
    """Center each feature, scale it to unit (population) variance, then
    multiply the whole view by ``1/sqrt(D)``.

    Constant columns are set to zero and not divided.
    """
    _check_fresh(view)
    X = view.data
    n, d = X.shape
    if n < 2:
        raise DatasetError(f"view {view.view_name!r}: unit-variance scaling needs N >= 2")
    centered = X - X.mean(axis=0)
    constant = np.ptp(X, axis=0) == 0
    centered[:, constant] = 0.0
    std = centered.std(axis=0)
    std[constant] = 1.0
    out = centered / std / np.sqrt(d)
    return replace(view, data=out, normalization=Normalization.UNIT_VARIANCE_INV_SQRT_DIM, applied=True)


def l1_normalize_rows(view):
    """Divide each row by its l1 norm; all-zero rows stay zero."""
    _check_fresh(view)
    X = view.data
    if np.any(X < 0):
        raise DatasetError(f"view {view.view_name!r}: negative entry under l1 row normalization")
    sums = X.sum(axis=1)
    safe = np.where(sums > 0, sums, 1.0)
    out = X / safe[:, None]
    return replace(view, data=out, normalization=Normalization.L1_ROWS, applied=True)


def normalize_view(view):
    """Apply the normalization recorded on ``view``."""
    if view.normalization is Normalization.UNIT_VARIANCE_INV_SQRT_DIM:
        return normalize_unit_variance_inv_sqrt_dim(view)
    if view.normalization is Normalization.L1_ROWS:
        return l1_normalize_rows(view)
    _check_fresh(view)
    return replace(view, applied=True)


def normalize(dataset):
    """Return a copy of ``dataset`` with every view's tagged normalization applied.

    Views that were already applied are passed through unchanged.
    """
    views = tuple(v if v.applied else normalize_view(v) for v in dataset.views)
    return replace(dataset, views=views)


def concatenate_views(dataset):
    """Stack all views side by side (manifest order) into one N x sum(D) view."""
    views = dataset.views
    applied = {v.applied for v in views}
    tags = {v.normalization for v in views}
    if len(applied) > 1 or (applied == {False} and tags != {Normalization.NONE}):
        raise DatasetError("concatenate_views needs every view normalized (or all tagged 'none')")
    if len(views) == 1:
        return views[0]
    data = np.hstack([v.data for v in views])
    return ViewMatrix(
        data=data,
        view_name="+".join(v.view_name for v in views),
        normalization=Normalization.NONE,
        applied=True,
    )


# -- files ---------------------------------------------------------------------

def _read_matrix(path, header):
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"missing file: {path}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if header:
            next(reader, None)
        for lineno, row in enumerate(reader, start=2 if header else 1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise DatasetError(f"non-numeric cell in {path} line {lineno}") from None
    if not rows:
        raise DatasetError(f"empty matrix file: {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DatasetError(f"ragged rows in {path}")
    return np.array(rows, dtype=float)


def _read_labels(path, header):
    raw = _read_matrix(path, header)
    if raw.shape[1] != 1:
        raise DatasetError(f"labels file {path} must hold a single column")
    col = raw[:, 0]
    if not np.all(np.equal(np.mod(col, 1), 0)):
        raise DatasetError(f"non-integer label in {path}")
    return col.astype(np.int64)


def load_manifest(path):
    """Read a manifest and its CSV files. Normalizations are recorded, not applied."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"missing file: {path}")
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"manifest {path} is not valid JSON: {exc}") from None
    base = path.parent
    if not spec.get("views"):
        raise DatasetError(f"manifest {path} lists no views")

    views = []
    for i, entry in enumerate(spec["views"]):
        if "path" not in entry:
            raise DatasetError(f"view {i} in {path} has no path")
        try:
            tag = Normalization(entry.get("normalization", "none"))
        except ValueError:
            raise DatasetError(f"unknown normalization {entry.get('normalization')!r}") from None
        data = _read_matrix(base / entry["path"], bool(entry.get("header", False)))
        views.append(ViewMatrix(data=data, view_name=entry.get("name", f"view{i}"), normalization=tag))

    labels = None
    if spec.get("labels"):
        lab = spec["labels"]
        labels = _read_labels(base / lab["path"], bool(lab.get("header", False)))

    try:
        distance = DistanceMeasure.parse(spec.get("distance", "euclidean"))
    except ValueError as exc:
        raise DatasetError(str(exc)) from None
    return MultiViewDataset(
        views=tuple(views),
        labels=labels,
        name=spec.get("name", path.stem),
        distance=distance,
    )


def _atomic_write_text(path, text):
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_manifest(dataset, directory, fmt="%.17g"):
    """Persist ``dataset`` as manifest.json plus one CSV per view (and labels).

    Returns the manifest path. Output is byte-identical for identical datasets.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, view in enumerate(dataset.views):
        fname = f"view{i}.csv"
        lines = [",".join(fmt % x for x in row) for row in view.data]
        _atomic_write_text(directory / fname, "\n".join(lines) + "\n")
        entries.append({
            "name": view.view_name,
            "path": fname,
            # already-normalized data must not be normalized again on reload
            "normalization": "none" if view.applied else view.normalization.value,
            "header": False,
        })
    manifest = {"name": dataset.name, "views": entries, "distance": dataset.distance.manifest_name}
    if dataset.labels is not None:
        _atomic_write_text(directory / "labels.csv", "\n".join(str(int(x)) for x in dataset.labels) + "\n")
        manifest["labels"] = {"path": "labels.csv", "header": False}
    out = directory / "manifest.json"
    _atomic_write_text(out, json.dumps(manifest, indent=2) + "\n")
    return out
