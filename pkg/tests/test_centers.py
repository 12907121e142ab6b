import numpy as np
import pytest
from conftest import brute_force_two_partition
from hypothesis import given, settings
from hypothesis import strategies as st

from rbfface import InvalidParameterError, KMeansConfig, kmeans, random_subset


def test_k_equals_n_returns_the_points():
    pts = np.array([[0.0, 1.0], [2.0, 3.0], [5.0, -1.0], [7.0, 7.0]])
    cs = kmeans(pts, KMeansConfig(4, seed=11))
    assert cs.distortion == 0.0
    assert sorted(map(tuple, cs.centers)) == sorted(map(tuple, pts))


def test_k_one_gives_mean():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(40, 3))
    cs = kmeans(pts, KMeansConfig(1))
    np.testing.assert_allclose(cs.centers[0], pts.mean(axis=0), rtol=1e-14, atol=1e-14)
    assert cs.distortion == pytest.approx(pts.var(axis=0).sum() * len(pts), rel=1e-12)


def test_six_point_two_group_instance():
    x = np.array([0.0, 0.1, 0.2, 10.0, 10.1, 10.2])
    d, means = brute_force_two_partition(x)
    np.testing.assert_allclose(means, [0.1, 10.1], atol=1e-12)
    for seed in range(6):
        cs = kmeans(x, KMeansConfig(2, seed=seed))
        np.testing.assert_allclose(sorted(cs.centers.ravel()), means, atol=1e-12)
        assert cs.distortion == pytest.approx(d, abs=1e-12)


def two_group_instances(n, seed):
    # Lloyd only guarantees a local optimum; separated groups make the global one reachable
    rng = np.random.default_rng(seed)
    for _ in range(n):
        n1 = int(rng.integers(1, 6))
        gap = rng.uniform(5.0, 20.0)
        x = np.concatenate([rng.uniform(0, 1, n1), gap + rng.uniform(0, 1, 6 - n1)])
        rng.shuffle(x)
        yield x


def test_matches_brute_force_on_random_six_point_instances():
    for i, x in enumerate(two_group_instances(30, seed=42)):
        d, means = brute_force_two_partition(x)
        cs = kmeans(x, KMeansConfig(2, seed=i))
        assert cs.distortion == pytest.approx(d, rel=1e-12, abs=1e-12)
        np.testing.assert_allclose(sorted(cs.centers.ravel()), means, atol=1e-12)


def _nonincreasing(hist):
    # slack of a few ulps for the bounding-box clamp on centroids
    return all(b <= a * (1 + 1e-12) + 1e-12 for a, b in zip(hist, hist[1:]))


def test_distortion_monotone_on_random_instances():
    rng = np.random.default_rng(7)
    for i in range(50):
        n = int(rng.integers(10, 80))
        r = int(rng.integers(1, 6))
        k = int(rng.integers(1, min(n, 12) + 1))
        pts = rng.normal(size=(n, r)) * rng.uniform(0.1, 5)
        cs = kmeans(pts, KMeansConfig(k, seed=i))
        assert len(cs.history) == cs.iterations + 1
        assert _nonincreasing(cs.history), cs.history
        assert cs.distortion <= cs.history[0] + 1e-12
        assert cs.centers.shape == (k, r)


def test_centers_inside_bounding_box():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2, 5, size=(200, 4))
    cs = kmeans(pts, KMeansConfig(9, seed=1))
    assert (cs.centers >= pts.min(axis=0)).all()
    assert (cs.centers <= pts.max(axis=0)).all()


SEPARATED_MEANS = np.array([[0, 0, 0], [50, 0, 0], [0, 50, 0], [0, 0, 50], [50, 50, 50]], dtype=float)


def _separated_points():
    rng = np.random.default_rng(5)
    return np.vstack([m + rng.uniform(-1, 1, size=(30, 3)) for m in SEPARATED_MEANS])


def _cluster_of(c):
    return [j for j, m in enumerate(SEPARATED_MEANS) if (np.abs(c - m) <= 1).all()]


def _one_center_per_cluster(centers):
    hits = [_cluster_of(c) for c in centers]
    return all(len(h) == 1 for h in hits) and sorted(h[0] for h in hits) == list(range(len(SEPARATED_MEANS)))


@pytest.mark.parametrize("seed", range(10))
def test_recovers_well_separated_clusters(seed):
    pts = _separated_points()
    cs = kmeans(pts, KMeansConfig(5, seed=seed, init="maximin"))
    assert _one_center_per_cluster(cs.centers)


def test_random_init_recovers_clusters_when_seeded_one_per_cluster():
    # plain random seeding can put two seeds in one cluster (a true local optimum);
    # whenever it does not, Lloyd must land one center per cluster
    from rbfface.centers import _init_distinct

    pts = _separated_points()
    checked = 0
    for seed in range(400):
        init = _init_distinct(pts, 5, np.random.default_rng(seed))
        if not _one_center_per_cluster(init):
            continue
        checked += 1
        assert _one_center_per_cluster(kmeans(pts, KMeansConfig(5, seed=seed)).centers)
    assert checked >= 3


def test_empty_cluster_repair_keeps_k():
    # duplicate-heavy data with one outlier provokes empty clusters
    pts = np.array([[0.0]] * 20 + [[1.0]] * 20 + [[2.0], [100.0]])
    for seed in range(10):
        cs = kmeans(pts, KMeansConfig(4, seed=seed))
        assert len(cs) == 4
        assert len(np.unique(cs.centers)) == 4
        assert _nonincreasing(cs.history)


def test_kmeans_deterministic():
    pts = np.random.default_rng(9).normal(size=(100, 5))
    a = kmeans(pts, KMeansConfig(7, seed=3))
    b = kmeans(pts, KMeansConfig(7, seed=3))
    assert np.array_equal(a.centers, b.centers)
    assert a.history == b.history


def test_tolerance_and_iteration_cap():
    pts = np.random.default_rng(2).normal(size=(300, 2))
    capped = kmeans(pts, KMeansConfig(10, max_iterations=1, seed=0))
    assert capped.iterations == 1
    loose = kmeans(pts, KMeansConfig(10, seed=0, tolerance=1e9))
    assert loose.iterations == 1


def test_kmeans_errors():
    with pytest.raises(InvalidParameterError):
        kmeans(np.zeros((0, 2)), KMeansConfig(1))
    with pytest.raises(InvalidParameterError):
        kmeans(np.array([[1.0], [1.0], [2.0]]), KMeansConfig(3))
    with pytest.raises(InvalidParameterError):
        KMeansConfig(0)
    with pytest.raises(InvalidParameterError):
        KMeansConfig(2, max_iterations=0)
    with pytest.raises(InvalidParameterError):
        KMeansConfig(2, init="kmeans++")


def test_random_subset_examples():
    pts = np.arange(12, dtype=float).reshape(6, 2)
    full = random_subset(pts, 6, seed=4)
    assert sorted(map(tuple, full.centers)) == sorted(map(tuple, pts))
    one = random_subset(np.array([[3.0, 4.0]]), 1, seed=0)
    assert one.centers.tolist() == [[3.0, 4.0]]
    a = random_subset(pts, 3, seed=8)
    b = random_subset(pts, 3, seed=8)
    assert np.array_equal(a.centers, b.centers) and a.distortion == b.distortion


def test_random_subset_distinct_indices():
    pts = np.arange(50, dtype=float)[:, None]
    cs = random_subset(pts, 20, seed=1)
    assert len(np.unique(cs.centers)) == 20


def test_random_subset_errors():
    with pytest.raises(InvalidParameterError):
        random_subset(np.zeros((3, 2)), 4, seed=0)
    with pytest.raises(InvalidParameterError):
        random_subset(np.zeros((3, 2)), 0, seed=0)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 40), r=st.integers(1, 4), k=st.integers(1, 8), seed=st.integers(0, 10_000))
def test_kmeans_shape_property(n, r, k, seed):
    pts = np.random.default_rng(seed).normal(size=(n, r))
    k = min(k, n)
    cs = kmeans(pts, KMeansConfig(k, seed=seed))
    assert cs.centers.shape == (k, r)
    assert _nonincreasing(cs.history)
