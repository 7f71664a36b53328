"""Estimator-style facade so the scattering codebook plugs into pipelines
that expect the fit/predict protocol (duck-typed, no sklearn dependency)."""

from __future__ import annotations

import numpy as np

from .core import COSINE, EUCLIDEAN, YoungDiagram
from .scattering import build_scattering
from .search import cosine_nearest, nearest_center


def _check_matrix(X, dim: int) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValueError(f"expected an (n_queries, {dim}) array, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("queries must be finite")
    return arr


class ScatteringNeighbors:
    """Nearest-center index over a generated scattering.

    Parameters follow the estimator convention: construction stores them,
    ``fit`` builds the center sequence (training data is ignored, the
    codebook is fully determined by the diagram), ``kneighbors`` and
    ``predict`` answer exact nearest-center queries.
    """

    def __init__(self, lambda_rows=(2, 1, 1), levels=1, metric=EUCLIDEAN,
                 max_points=None):
        self.lambda_rows = lambda_rows
        self.levels = levels
        self.metric = metric
        self.max_points = max_points

    def get_params(self, deep=True):
        return {
            "lambda_rows": self.lambda_rows,
            "levels": self.levels,
            "metric": self.metric,
            "max_points": self.max_points,
        }

    def set_params(self, **params):
        for key, value in params.items():
            if key not in self.get_params():
                raise ValueError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit(self, X=None, y=None):
        if self.metric not in (EUCLIDEAN, COSINE):
            raise ValueError(f"unknown metric {self.metric!r}")
        diagram = YoungDiagram.from_rows(self.lambda_rows)
        self.scattering_ = build_scattering(diagram, self.levels,
                                            max_points=self.max_points)
        self.n_centers_ = len(self.scattering_)
        return self

    def _query(self, q, k):
        if self.metric == COSINE:
            return cosine_nearest(q, self.scattering_, k)
        return nearest_center(q, self.scattering_, k, self.metric)

    def kneighbors(self, X, n_neighbors=1):
        """Distances and center indices of the n_neighbors nearest centers
        per query row."""
        if not hasattr(self, "scattering_"):
            raise ValueError("call fit() before querying")
        arr = _check_matrix(X, self.scattering_.dim)
        k = min(n_neighbors, self.n_centers_)
        dist = np.empty((arr.shape[0], k))
        idx = np.empty((arr.shape[0], k), dtype=np.int64)
        for r, row in enumerate(arr):
            res = self._query(tuple(row), k)
            dist[r] = res.distances
            idx[r] = res.indices
        return dist, idx

    def predict(self, X):
        """Index of the nearest center for each query row."""
        _, idx = self.kneighbors(X, 1)
        return idx[:, 0]

    def transform(self, X):
        """Distance to the nearest center for each query row."""
        dist, _ = self.kneighbors(X, 1)
        return dist
