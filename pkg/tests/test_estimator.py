import numpy as np
import pytest

from qusc import brute_nearest
from qusc.estimator import ScatteringNeighbors


class TestScatteringNeighbors:
    def test_fit_builds_codebook(self):
        est = ScatteringNeighbors(lambda_rows=(2, 1, 1), levels=1).fit()
        assert est.n_centers_ == 42

    def test_kneighbors_matches_brute(self):
        est = ScatteringNeighbors(lambda_rows=(3, 2, 1), levels=1).fit()
        rng = np.random.default_rng(0)
        X = rng.uniform(-1, 4, size=(30, 4))
        dist, idx = est.kneighbors(X, n_neighbors=3)
        for row, d, i in zip(X, dist, idx):
            ref = brute_nearest(tuple(row), est.scattering_, 3)
            assert list(i) == ref.indices
            assert list(d) == pytest.approx(ref.distances)

    def test_predict_single_row(self):
        est = ScatteringNeighbors(lambda_rows=(2, 1, 1), levels=0).fit()
        assert est.predict([2.0, 1.0, 1.0, 0.0])[0] == 0

    def test_transform_shape(self):
        est = ScatteringNeighbors(lambda_rows=(2, 1, 1), levels=0).fit()
        out = est.transform([[1.0, 1.0, 1.0, 1.0], [2.0, 1.0, 1.0, 0.0]])
        assert out.shape == (2, 1)
        assert out[1, 0] == 0.0

    def test_cosine_metric(self):
        est = ScatteringNeighbors(lambda_rows=(2, 1, 1), levels=1,
                                  metric="cosine").fit()
        _, idx = est.kneighbors([[4.0, 2.0, 2.0, 0.0]], n_neighbors=1)
        assert est.scattering_.centers[idx[0, 0]].numerators == (2, 1, 1, 0)

    def test_get_set_params(self):
        est = ScatteringNeighbors()
        params = est.get_params()
        clone = ScatteringNeighbors(**params)
        assert clone.get_params() == params
        est.set_params(levels=2, metric="cosine")
        assert est.levels == 2 and est.metric == "cosine"
        with pytest.raises(ValueError):
            est.set_params(bogus=1)

    def test_query_before_fit(self):
        with pytest.raises(ValueError):
            ScatteringNeighbors().kneighbors([[1, 1, 1, 1]])

    def test_bad_input(self):
        est = ScatteringNeighbors(lambda_rows=(2, 1, 1), levels=0).fit()
        with pytest.raises(ValueError):
            est.kneighbors([[1.0, 2.0]])
        with pytest.raises(ValueError):
            est.kneighbors([[np.nan, 1.0, 1.0, 1.0]])
