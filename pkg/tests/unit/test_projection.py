"""Unit tests for the neighbour graph, curve fit and 2-D layout."""

import numpy as np
import pytest

from rxnemb.core.errors import ConfigError, DataError, KTooLarge
from rxnemb.core.types import ProjectionConfig
from rxnemb.project import (
    LAYOUT_COLUMNS,
    Layout,
    epochs_per_sample,
    fit_ab,
    fuzzy_graph,
    knn_graph,
    layout_sgd,
    neighbor_purity,
    project_embeddings,
    smooth_knn,
    standardize,
    target_curve,
    write_layout_csv,
)
from tests.utils import brute_force_knn, make_blobs, read_lines


def small_projection(**overrides):
    settings = {"n_neighbors": 5, "n_epochs": 60}
    settings.update(overrides)
    return ProjectionConfig(**settings)


class TestKnnGraph:
    """Test knn_graph."""

    def test_line_example(self):
        """Test nearest neighbours on a line, self excluded."""
        knn = knn_graph(np.array([[0.0], [1.0], [3.0]]), 1)

        assert knn.indices.tolist() == [[1], [0], [1]]
        np.testing.assert_allclose(knn.distances, [[1.0], [1.0], [2.0]])

    def test_matches_brute_force(self, rng):
        """Test against sorting every distance."""
        X = rng.standard_normal((40, 3))

        np.testing.assert_array_equal(knn_graph(X, 6, workers=2).indices, brute_force_knn(X, 6))

    def test_ties_by_index(self):
        """Test equidistant neighbours are listed by index."""
        knn = knn_graph(np.array([[0.0], [-1.0], [1.0], [5.0]]), 2)

        assert knn.indices[0].tolist() == [1, 2]

    def test_k_too_large(self):
        """Test k must leave a point out."""
        with pytest.raises(KTooLarge):
            knn_graph(np.zeros((3, 2)), 3)


class TestSmoothKnn:
    """Test smooth_knn."""

    def test_memberships_sum_to_log2_k(self, rng):
        """Test the calibrated memberships of each point."""
        distances = np.sort(rng.uniform(0.5, 3.0, size=(10, 6)), axis=1)

        rho, sigma = smooth_knn(distances)
        total = np.exp(-(distances - rho[:, None]) / sigma[:, None]).sum(axis=1)

        np.testing.assert_allclose(rho, distances[:, 0])
        np.testing.assert_allclose(total, np.log2(6), rtol=1e-6)

    def test_degenerate_point(self):
        """Test neighbours all at rho get the bracket maximum."""
        rho, sigma = smooth_knn(np.array([[1.0, 1.0, 1.0]]))

        assert rho[0] == 1.0
        assert sigma[0] == 1e6


class TestFuzzyGraph:
    """Test fuzzy_graph."""

    def test_symmetric_and_bounded(self, rng):
        """Test the union is symmetric with weights in (0, 1]."""
        X = rng.standard_normal((30, 4))
        knn = knn_graph(X, 5)
        graph = fuzzy_graph(knn, *smooth_knn(knn.distances))
        dense = graph.matrix.toarray()

        np.testing.assert_allclose(dense, dense.T)
        assert np.all(np.diag(dense) == 0)
        assert graph.matrix.data.min() > 0
        assert graph.matrix.data.max() <= 1.0

    def test_union_rule(self):
        """Test a one-directional edge keeps its weight."""
        knn = knn_graph(np.array([[0.0], [1.0], [3.0]]), 1)
        graph = fuzzy_graph(knn, *smooth_knn(knn.distances))
        dense = graph.matrix.toarray()

        # 0 and 1 point at each other, 2 points at 1 only
        assert dense[0, 1] == pytest.approx(1.0)
        assert dense[1, 2] == pytest.approx(1.0)
        assert dense[0, 2] == 0.0

    def test_edges_listed_once(self, rng):
        """Test edges come back with head below tail."""
        knn = knn_graph(rng.standard_normal((12, 2)), 3)
        heads, tails, weights = fuzzy_graph(knn, *smooth_knn(knn.distances)).edges()

        assert np.all(heads < tails)
        assert heads.size == weights.size


class TestFitAb:
    """Test fit_ab."""

    def test_default_parameters(self):
        """Test the usual a and b for min_dist 0.1."""
        a, b = fit_ab(0.1, 1.0)

        assert a == pytest.approx(1.577, abs=0.02)
        assert b == pytest.approx(0.895, abs=0.02)

    def test_target_includes_min_dist(self):
        """Test the target is flat up to and including min_dist."""
        x = np.linspace(0, 3, 300)
        min_dist = float(x[10])

        y = target_curve(x, min_dist)

        assert np.all(y[:11] == 1.0)
        assert np.all(y[11:] < 1.0)
        assert y[-1] == pytest.approx(np.exp(-(3.0 - min_dist)))

    @pytest.mark.parametrize("min_dist", [0.05, 0.1, 0.25, 0.5])
    def test_fit_quality(self, min_dist):
        """Test the fitted curve follows its target."""
        a, b = fit_ab(min_dist)
        x = np.linspace(0, 3, 300)
        target = target_curve(x, min_dist)
        rms = np.sqrt(np.mean((1.0 / (1.0 + a * x ** (2 * b)) - target) ** 2))

        assert rms < 0.03

    def test_tighter_min_dist_raises_a(self):
        """Test a shrinks as min_dist grows."""
        assert fit_ab(0.05)[0] > fit_ab(0.5)[0]


class TestLayout:
    """Test epochs_per_sample and layout_sgd."""

    def test_epochs_per_sample(self):
        """Test the heaviest edge runs every epoch and zero weights never."""
        schedule = epochs_per_sample(np.array([1.0, 0.5, 0.0]), 10)

        np.testing.assert_allclose(schedule, [1.0, 2.0, -1.0])

    def test_deterministic_and_finite(self, rng):
        """Test the layout depends only on its inputs and seed."""
        knn = knn_graph(rng.standard_normal((25, 3)), 4)
        graph = fuzzy_graph(knn, *smooth_knn(knn.distances))

        a = layout_sgd(graph, n_epochs=40, seed=3)
        b = layout_sgd(graph, n_epochs=40, seed=3)
        c = layout_sgd(graph, n_epochs=40, seed=4)

        assert a.coords.shape == (25, 2)
        assert np.all(np.isfinite(a.coords))
        np.testing.assert_array_equal(a.coords, b.coords)
        assert not np.array_equal(a.coords, c.coords)


class TestProjectEmbeddings:
    """Test project_embeddings."""

    def test_blobs_stay_apart(self):
        """Test separated clusters keep their neighbours in 2-D."""
        X, labels = make_blobs(np.eye(5)[:3] * 20, per_blob=20, scale=0.5, seed=2)

        layout = project_embeddings(X, small_projection(n_epochs=150), seed=1)

        assert neighbor_purity(layout.coords, labels, k=5) > 0.9

    def test_reproducible(self, rng):
        """Test equal seeds give identical coordinates."""
        X = rng.standard_normal((30, 6))

        a = project_embeddings(X, small_projection(), seed=5)
        b = project_embeddings(X, small_projection(), seed=5, workers=3)

        np.testing.assert_array_equal(a.coords, b.coords)
        assert a.coords.dtype == np.float32

    def test_too_few_points(self):
        """Test n_neighbors must be below the point count."""
        with pytest.raises(KTooLarge):
            project_embeddings(np.random.default_rng(0).standard_normal((10, 3)), ProjectionConfig())

    def test_too_many_points(self, rng):
        """Test the max_points limit."""
        with pytest.raises(ConfigError):
            project_embeddings(rng.standard_normal((30, 3)), small_projection(max_points=20))

    def test_standardize(self):
        """Test unit variance per column and zeros for constant columns."""
        X = np.array([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]])

        Z = standardize(X)

        np.testing.assert_allclose(Z[:, 0].mean(), 0.0, atol=1e-12)
        np.testing.assert_allclose(Z[:, 0].std(), 1.0)
        np.testing.assert_array_equal(Z[:, 1], np.zeros(3))


class TestOutputs:
    """Test neighbor_purity and write_layout_csv."""

    def test_purity_extremes(self):
        """Test perfect and mixed neighbourhoods."""
        coords = np.array([[0.0, 0.0], [0.1, 0.0], [10.0, 0.0], [10.1, 0.0]])

        assert neighbor_purity(coords, ["a", "a", "b", "b"], k=1) == 1.0
        assert neighbor_purity(coords, ["a", "b", "a", "b"], k=1) == 0.0

    def test_purity_label_count(self):
        """Test one label per point."""
        with pytest.raises(DataError):
            neighbor_purity(np.zeros((3, 2)), ["a"], k=1)

    def test_layout_csv(self, temp_dir):
        """Test the column layout and number format."""
        layout = Layout(np.array([[0.5, -1.25], [2.0, 3.0]]))

        path = write_layout_csv(temp_dir / "layout.csv", ["r1", "r2"], layout, ["uspto", "new"])

        assert read_lines(path) == [
            ",".join(LAYOUT_COLUMNS),
            "r1,0.500000,-1.250000,uspto",
            "r2,2.000000,3.000000,new",
        ]
