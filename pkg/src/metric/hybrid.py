"""
Induced length metric of a sphere with threads, restricted to sphere points

Between two thread uses the best motion on the sphere is a great-circle
arc, so the metric is a shortest-path problem on the complete graph over
thread endpoints (geodesic edges, with each thread overlaid as an edge of
its chord length) plus the direct arc between the query points.
"""
import heapq
import logging
import math
from dataclasses import dataclass
from itertools import count
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra

from ..config import METRIC_CONFIG
from ..errors import CapacityError, ValidationError
from ..geometry.sphere import (
    PointLike,
    _as_point,
    _as_unit_array,
    geodesic_distance,
    geodesic_matrix,
    paired_geodesic,
)
from ..geometry.threads import ThreadSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HybridMetric:
    """Graph realization of d_Y over the 2K thread endpoints"""
    threads: ThreadSystem
    node_points: np.ndarray
    sphere_edge_weights: Optional[np.ndarray]
    thread_edges: Tuple[Tuple[int, int, float], ...]
    node_distances: Optional[np.ndarray]

    @property
    def node_count(self) -> int:
        return len(self.node_points)

    @property
    def dense(self) -> bool:
        return self.node_distances is not None

    def edge_row(self, u: int) -> np.ndarray:
        """Edge weights from endpoint u to every endpoint"""
        if self.sphere_edge_weights is not None:
            row = self.sphere_edge_weights[u].copy()
        else:
            row = geodesic_matrix(self.node_points[u:u + 1], self.node_points)[0]
        partner = u ^ 1
        row[partner] = min(row[partner], self.thread_edges[u // 2][2])
        return row

    def distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Batched d_Y(xs[k], ys[k])"""
        xs = _as_unit_array(xs)
        ys = _as_unit_array(ys)
        if xs.shape != ys.shape:
            raise ValidationError("query arrays must have the same shape")
        direct = paired_geodesic(xs, ys)
        if self.node_count == 0:
            return direct
        if not self.dense:
            return np.array([distance(self, x, y) for x, y in zip(xs, ys)])
        reach = self._reach(xs)
        via = (reach + geodesic_matrix(ys, self.node_points)).min(axis=1)
        return np.minimum(direct, via)

    def pairwise(self, points: np.ndarray) -> np.ndarray:
        """Full d_Y table over a point sample"""
        points = _as_unit_array(points)
        direct = geodesic_matrix(points, points)
        if self.node_count == 0:
            return direct
        if not self.dense:
            n = len(points)
            out = np.zeros((n, n))
            for a in range(n):
                for b in range(a + 1, n):
                    out[a, b] = out[b, a] = distance(self, points[a], points[b])
            return out
        reach = self._reach(points)
        to_nodes = geodesic_matrix(points, self.node_points)
        via = np.empty_like(direct)
        for a in range(len(points)):
            via[a] = (reach[a][None, :] + to_nodes).min(axis=1)
        out = np.minimum(direct, via)
        np.fill_diagonal(out, 0.0)
        return np.minimum(out, out.T)

    def _reach(self, xs: np.ndarray) -> np.ndarray:
        """Shortest distance from each query point to each endpoint through the graph"""
        start = geodesic_matrix(xs, self.node_points)
        out = np.full_like(start, np.inf)
        nodes = self.node_distances
        v = len(nodes)
        cells = METRIC_CONFIG['chunk_cells']
        rows = max(1, cells // max(1, v * v))
        middle = max(1, cells // max(1, rows * v))
        # min-plus product in (rows x middle x v) blocks
        for lo in range(0, len(xs), rows):
            for mid in range(0, v, middle):
                block = start[lo:lo + rows, mid:mid + middle]
                part = (block[:, :, None] + nodes[None, mid:mid + middle, :]).min(axis=1)
                np.minimum(out[lo:lo + rows], part, out=out[lo:lo + rows])
        return out


def build_metric(threads: ThreadSystem) -> HybridMetric:
    """Endpoint graph with all geodesic edges and the threads overlaid"""
    nodes = threads.endpoint_array()
    edges = tuple((2 * k, 2 * k + 1, t.length) for k, t in enumerate(threads.threads))
    v = len(nodes)
    if v == 0:
        return HybridMetric(threads, nodes, np.zeros((0, 0)), edges, np.zeros((0, 0)))
    if v > METRIC_CONFIG['dense_limit']:
        logger.info(f"{v} endpoints exceed the dense limit; distances are computed on demand")
        return HybridMetric(threads, nodes, None, edges, None)

    weights = geodesic_matrix(nodes, nodes)
    np.fill_diagonal(weights, 0.0)
    for a, b, length in edges:
        w = min(weights[a, b], length)
        weights[a, b] = weights[b, a] = w
    closure = dijkstra(csgraph_from_dense(weights, null_value=np.inf), directed=False)
    weights.setflags(write=False)
    closure.setflags(write=False)
    logger.debug(f"endpoint graph: {v} nodes, {len(edges)} thread edges")
    return HybridMetric(threads, nodes, weights, edges, closure)


def dijkstra_heap(
    row: Callable[[int], np.ndarray],
    n: int,
    source: int,
    target: Optional[int] = None,
) -> np.ndarray:
    """
    Single-source Dijkstra over a complete graph given by edge rows

    Args:
        row: returns the weights from a node to all n nodes (inf for no edge)
        n: number of nodes
        source: start node
        target: stop as soon as this node is settled

    Returns:
        Distances from source (inf where unreached)
    """
    dist = np.full(n, math.inf)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    c = count()
    fringe = [(0.0, next(c), source)]
    while fringe:
        d, _, u = heapq.heappop(fringe)
        if done[u]:
            continue
        done[u] = True
        if u == target:
            break
        cand = d + row(u)
        better = (~done) & (cand < dist)
        for v in np.flatnonzero(better):
            dist[v] = cand[v]
            heapq.heappush(fringe, (cand[v], next(c), int(v)))
    return dist


def distance(metric: HybridMetric, x: PointLike, y: PointLike) -> float:
    """
    d_Y(x, y) for sphere points x, y

    Adds a source node for x and a target node for y, each joined to every
    endpoint by its geodesic distance and to each other by d_S(x, y).
    """
    px, py = _as_point(x), _as_point(y)
    direct = geodesic_distance(px, py)
    v = metric.node_count
    if v == 0:
        return direct
    if px.m != metric.threads.m:
        raise ValidationError("query points live on a different sphere")
    from_x = geodesic_matrix(px.coords[None, :], metric.node_points)[0]
    from_y = geodesic_matrix(py.coords[None, :], metric.node_points)[0]
    source, target = v, v + 1

    def row(u: int) -> np.ndarray:
        out = np.full(v + 2, math.inf)
        if u == source:
            out[:v] = from_x
            out[target] = direct
        elif u == target:
            out[:v] = from_y
            out[source] = direct
        else:
            out[:v] = metric.edge_row(u)
            out[source] = from_x[u]
            out[target] = from_y[u]
        return out

    dist = dijkstra_heap(row, v + 2, source, target)
    return float(min(direct, dist[target]))


def brute_force_distance(threads: ThreadSystem, x: PointLike, y: PointLike) -> float:
    """
    Exhaustive oracle: best sequence of distinct threads, either orientation

    Gaps are crossed by great-circle arcs. Branches whose running length
    already reaches the best value are cut.
    """
    k = threads.K
    if k > METRIC_CONFIG['brute_force_cap']:
        raise CapacityError(
            f"brute force enumerates at most {METRIC_CONFIG['brute_force_cap']} threads, got {k}"
        )
    px, py = _as_point(x), _as_point(y)
    best = geodesic_distance(px, py)
    if k == 0:
        return best
    nodes = threads.endpoint_array()
    lengths = threads.length_array()
    gap = geodesic_matrix(nodes, nodes)
    from_x = geodesic_matrix(px.coords[None, :], nodes)[0]
    to_y = geodesic_matrix(py.coords[None, :], nodes)[0]

    def extend(position: Optional[int], used: int, acc: float) -> None:
        nonlocal best
        for t in range(k):
            if used & (1 << t):
                continue
            for a, b in ((2 * t, 2 * t + 1), (2 * t + 1, 2 * t)):
                hop = from_x[a] if position is None else gap[position, a]
                cost = acc + hop + lengths[t]
                if cost >= best:
                    continue
                best = min(best, cost + to_y[b])
                extend(b, used | (1 << t), cost)

    extend(None, 0, 0.0)
    return float(best)


def export_pair_distances(metric: HybridMetric) -> List[dict]:
    """Rows i, j, d_sphere, d_hybrid over endpoint pairs i < j"""
    rows = []
    v = metric.node_count
    for i in range(v):
        sphere_row = geodesic_matrix(metric.node_points[i:i + 1], metric.node_points)[0]
        if metric.dense:
            hybrid_row = metric.node_distances[i]
        else:
            hybrid_row = dijkstra_heap(metric.edge_row, v, i)
        for j in range(i + 1, v):
            rows.append({
                'i': i,
                'j': j,
                'd_sphere': float(sphere_row[j]),
                'd_hybrid': float(hybrid_row[j]),
            })
    return rows
