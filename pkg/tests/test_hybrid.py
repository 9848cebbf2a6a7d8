"""Hybrid metric d_Y against the exhaustive oracle and the sphere metrics"""
import math

import numpy as np
import pytest

from src.config import METRIC_CONFIG
from src.errors import CapacityError
from src.geometry import ThreadSystem
from src.geometry.sphere import paired_chordal, paired_geodesic, random_sphere_points
from src.metric import brute_force_distance, build_metric, dijkstra_heap, distance, export_pair_distances


def _pairs(m, size, seed):
    gen = np.random.default_rng(seed)
    return random_sphere_points(m, size, gen), random_sphere_points(m, size, gen)


def test_no_threads_is_the_sphere():
    metric = build_metric(ThreadSystem.from_segments([]))
    xs, ys = _pairs(2, 50, 1)
    np.testing.assert_allclose(metric.distances(xs, ys), paired_geodesic(xs, ys))
    assert distance(metric, xs[0], ys[0]) == pytest.approx(paired_geodesic(xs[:1], ys[:1])[0])


@pytest.mark.parametrize("k", [1, 2, 3, 5, 6])
def test_matches_exhaustive_oracle(k, make_system):
    system = make_system(k, seed=100 + k)
    metric = build_metric(system)
    xs, ys = _pairs(2, 1000, k)
    batched = metric.distances(xs, ys)
    for x, y, d in zip(xs, ys, batched):
        expected = brute_force_distance(system, x, y)
        assert d == pytest.approx(expected, abs=1e-12)
        assert distance(metric, x, y) == pytest.approx(expected, abs=1e-12)


def test_oracle_capacity(make_system):
    with pytest.raises(CapacityError):
        brute_force_distance(make_system(9, seed=0), np.eye(3)[0], np.eye(3)[1])


def test_bounded_by_sphere_metrics(metric_05):
    """d_E <= d_Y <= d_S"""
    xs, ys = _pairs(2, 500, 7)
    d_y = metric_05.distances(xs, ys)
    assert np.all(d_y <= paired_geodesic(xs, ys) + 1e-12)
    assert np.all(d_y >= paired_chordal(xs, ys) - 1e-12)


def test_pairwise_is_a_metric(metric_05):
    pts = random_sphere_points(2, 40, np.random.default_rng(3))
    d = metric_05.pairwise(pts)
    np.testing.assert_array_equal(d, d.T)
    assert np.all(np.diag(d) == 0.0)
    # d[a, c] <= d[a, b] + d[b, c] for every triple
    assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :] + 1e-10)


def test_pairwise_agrees_with_batched(metric_05):
    pts = random_sphere_points(2, 15, np.random.default_rng(4))
    d = metric_05.pairwise(pts)
    a, b = np.triu_indices(len(pts), k=1)
    np.testing.assert_allclose(d[a, b], metric_05.distances(pts[a], pts[b]), atol=1e-12)


def test_more_threads_never_lengthen(threads_05):
    xs, ys = _pairs(2, 100, 9)
    previous = None
    for k in range(0, min(threads_05.K, 12) + 1, 3):
        current = build_metric(threads_05.subsystem(k)).distances(xs, ys)
        if previous is not None:
            assert np.all(current <= previous + 1e-12)
        previous = current


def test_on_demand_mode_matches_dense(monkeypatch, make_system):
    system = make_system(4, seed=5)
    dense = build_metric(system)
    monkeypatch.setitem(METRIC_CONFIG, 'dense_limit', 2)
    lazy = build_metric(system)
    assert dense.dense and not lazy.dense
    xs, ys = _pairs(2, 30, 11)
    np.testing.assert_allclose(lazy.distances(xs, ys), dense.distances(xs, ys), atol=1e-12)
    np.testing.assert_allclose(lazy.pairwise(xs[:6]), dense.pairwise(xs[:6]), atol=1e-12)


@pytest.mark.parametrize("cells", [1, 37, 5000])
def test_small_blocks_give_the_same_distances(monkeypatch, metric_05, cells):
    xs, ys = _pairs(2, 40, 12)
    expected = metric_05.distances(xs, ys)
    monkeypatch.setitem(METRIC_CONFIG, 'chunk_cells', cells)
    np.testing.assert_array_equal(metric_05.distances(xs, ys), expected)


def test_heap_dijkstra_matches_closure(metric_05):
    v = metric_05.node_count
    for source in (0, v // 2, v - 1):
        np.testing.assert_allclose(
            dijkstra_heap(metric_05.edge_row, v, source), metric_05.node_distances[source], atol=1e-12
        )


def test_heap_dijkstra_stops_at_target():
    weights = np.array([
        [0.0, 1.0, 5.0],
        [1.0, 0.0, 1.0],
        [5.0, 1.0, 0.0],
    ])
    assert dijkstra_heap(lambda u: weights[u], 3, 0)[2] == 2.0
    assert dijkstra_heap(lambda u: weights[u], 3, 0, target=1)[1] == 1.0


def test_thread_shortcut():
    """Walking to a thread end beats the direct arc for near-antipodal points"""
    e = np.eye(3)
    system = ThreadSystem.from_segments([(e[0], -e[0])])
    metric = build_metric(system)
    assert distance(metric, e[0], -e[0]) == pytest.approx(2.0)
    assert distance(metric, e[0], e[0]) == 0.0
    assert brute_force_distance(system, e[0], -e[0]) == pytest.approx(2.0)


def test_export_pair_distances(metric_05):
    rows = export_pair_distances(metric_05)
    v = metric_05.node_count
    assert len(rows) == v * (v - 1) // 2
    assert all(r['d_hybrid'] <= r['d_sphere'] + 1e-12 for r in rows)
    thread = next(r for r in rows if (r['i'], r['j']) == (0, 1))
    assert thread['d_hybrid'] <= metric_05.threads.threads[0].length + 1e-12
    assert not math.isinf(max(r['d_hybrid'] for r in rows))
