"""
Thread systems: endpoints q_j^i on the geodesic spheres about the net
centers, their pairing into threads, chord lengths and the tunnel radius
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import THREAD_CONFIG, TOLERANCES
from ..errors import ConstructionError, ParameterError, ValidationError
from .sphere import (
    Net,
    PointLike,
    SpherePoint,
    exp_map,
    geodesic_matrix,
    tangent_frame,
    tangent_toward,
    _as_point,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EndpointSet:
    """Endpoints q_j^i, keyed (i, j), each on the boundary of B_{p_i}(eps)"""
    net: Net
    endpoints: Dict[Tuple[int, int], np.ndarray] = field(default_factory=dict)

    @property
    def eps(self) -> float:
        return self.net.eps

    def point(self, i: int, j: int) -> SpherePoint:
        return SpherePoint(self.endpoints[(i, j)])

    def on_ball(self, i: int) -> np.ndarray:
        """Endpoints on the boundary of ball i, ordered by partner index"""
        keys = sorted(k for k in self.endpoints if k[0] == i)
        if not keys:
            return np.empty((0, self.net.m + 1))
        return np.vstack([self.endpoints[k] for k in keys])

    def min_spacing(self) -> float:
        """Smallest same-ball endpoint distance (inf when no ball holds two)"""
        worst = math.inf
        for i in range(self.net.count):
            pts = self.on_ball(i)
            if len(pts) < 2:
                continue
            d = geodesic_matrix(pts, pts)
            np.fill_diagonal(d, np.inf)
            worst = min(worst, float(d.min()))
        return worst


@dataclass(frozen=True, eq=False)
class Thread:
    """Segment of length L joining start = q_j^i to end = q_i^j"""
    i: int
    j: int
    start: np.ndarray
    end: np.ndarray
    length: float


@dataclass(frozen=True, eq=False)
class ThreadSystem:
    """Unordered pairs {i, j}, one thread each, plus the tunnel radius rho"""
    threads: Tuple[Thread, ...]
    eps: float
    rho: float
    m: int
    endpoint_set: Optional[EndpointSet] = None

    @property
    def K(self) -> int:
        return len(self.threads)

    @property
    def count(self) -> Optional[int]:
        return self.endpoint_set.net.count if self.endpoint_set is not None else None

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return [(t.i, t.j) for t in self.threads]

    @property
    def lengths(self) -> Dict[Tuple[int, int], float]:
        return {(t.i, t.j): t.length for t in self.threads}

    def thread_for(self, i: int, j: int) -> Thread:
        """The thread of pair {i, j}; (i, j) and (j, i) give the same record"""
        key = (min(i, j), max(i, j))
        for t in self.threads:
            if (t.i, t.j) == key:
                return t
        raise KeyError(key)

    def endpoint_array(self) -> np.ndarray:
        """(2K, m+1) array ordered start_0, end_0, start_1, end_1, ..."""
        if not self.threads:
            return np.empty((0, self.m + 1))
        return np.vstack([row for t in self.threads for row in (t.start, t.end)])

    def length_array(self) -> np.ndarray:
        return np.array([t.length for t in self.threads], dtype=float)

    def subsystem(self, k: int) -> "ThreadSystem":
        """The first k threads"""
        return ThreadSystem(self.threads[:k], self.eps, self.rho, self.m, self.endpoint_set)

    def min_endpoint_separation(self) -> float:
        """Smallest geodesic distance between two distinct endpoints"""
        pts = self.endpoint_array()
        if len(pts) < 2:
            return math.inf
        d = geodesic_matrix(pts, pts)
        np.fill_diagonal(d, np.inf)
        return float(d.min())

    def rho_balls_disjoint(self) -> bool:
        return self.min_endpoint_separation() > 2.0 * self.rho

    @classmethod
    def from_segments(
        cls,
        segments: Sequence[Tuple[PointLike, PointLike]],
        eps: float = 0.0,
        rho: float = 0.0,
    ) -> "ThreadSystem":
        """Threads along arbitrary endpoint pairs, length = chord"""
        threads = []
        m = None
        for k, (a, b) in enumerate(segments):
            pa, pb = _as_point(a), _as_point(b)
            if m is None:
                m = pa.m
            if pa.m != m or pb.m != m:
                raise ValidationError("all segment endpoints must share one sphere")
            length = float(np.linalg.norm(pa.coords - pb.coords))
            threads.append(Thread(2 * k, 2 * k + 1, pa.coords, pb.coords, length))
        if m is None:
            m = 2
        return cls(tuple(threads), float(eps), float(rho), m)


def tunnel_radius(eps: float, count: int) -> float:
    """rho(eps) = eps / N^2"""
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if count < 1:
        raise ParameterError(f"count must be at least 1, got {count}")
    return eps / float(count) ** 2


def _rotation_partner(u: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Unit tangent orthogonal to u, from the fixed frame, spanning the rotation plane"""
    best = None
    best_norm = 0.0
    for f in frame:
        w = f - np.dot(f, u) * u
        norm = np.linalg.norm(w)
        if norm > best_norm + 1e-12:
            best, best_norm = w / norm, norm
    return best


def place_endpoints(net: Net) -> EndpointSet:
    """
    Put q_j^i on the boundary of B_{p_i}(eps), aimed at p_j

    Endpoints are placed in (i, j) order. A candidate closer than eps/N to an
    endpoint on its own ball, or closer than 2 rho to one on another ball, is
    rotated along the boundary in steps of eps/N until it is clear.
    """
    n = net.count
    eps = net.eps
    if n == 1:
        return EndpointSet(net, {})
    spacing = eps / n
    rho = tunnel_radius(eps, n)
    margin = THREAD_CONFIG['spacing_margin']
    radius = math.sin(eps)
    if 2.0 * math.pi * radius <= (n - 1) * spacing:
        raise ConstructionError(
            f"boundary of ball 0 (radius {eps}) is too short for {n - 1} endpoints at spacing {spacing}"
        )
    step = spacing / radius
    max_steps = min(THREAD_CONFIG['max_rotations'], int(math.ceil(2.0 * math.pi / step)))

    endpoints: Dict[Tuple[int, int], np.ndarray] = {}
    placed = np.empty((0, net.m + 1))
    owner = np.empty(0, dtype=int)
    for i in range(n):
        p = net.centers[i]
        frame = tangent_frame(p)
        for j in range(n):
            if j == i:
                continue
            u = tangent_toward(p, net.centers[j])
            if u is None:
                u = frame[0]
            w = _rotation_partner(u, frame)
            for k in range(max_steps):
                angle = k * step
                direction = math.cos(angle) * u + math.sin(angle) * w
                q = exp_map(p, eps * direction)
                if len(placed):
                    d = geodesic_matrix(q[None, :], placed)[0]
                    same = owner == i
                    if np.any(d[same] <= spacing + margin) or np.any(d[~same] <= 2.0 * rho + margin):
                        continue
                if k:
                    logger.debug(f"endpoint ({i}, {j}) rotated by {k} steps")
                break
            else:
                raise ConstructionError(
                    f"no admissible position for endpoint ({i}, {j}) on the boundary of ball {i}"
                )
            endpoints[(i, j)] = q
            placed = np.vstack([placed, q])
            owner = np.append(owner, i)
    logger.info(f"placed {len(endpoints)} endpoints on {n} balls (spacing > {spacing:.3g})")
    return EndpointSet(net, endpoints)


def build_threads(endpoints: EndpointSet) -> ThreadSystem:
    """One thread per unordered pair {i, j}, length = chord |q_j^i - q_i^j|"""
    net = endpoints.net
    n = net.count
    threads = []
    for i in range(n):
        for j in range(i + 1, n):
            a = endpoints.endpoints[(i, j)]
            b = endpoints.endpoints[(j, i)]
            threads.append(Thread(i, j, a, b, float(np.linalg.norm(a - b))))
    rho = tunnel_radius(net.eps, n)
    system = ThreadSystem(tuple(threads), net.eps, rho, net.m, endpoints)
    logger.info(f"built {system.K} threads, rho = {rho:.6g}")
    return system


def check_thread_system(system: ThreadSystem,
                        tolerances: Optional[Mapping[str, float]] = None) -> List[str]:
    """Names of the thread-system invariants that fail (empty when all hold)"""
    tolerances = tolerances or TOLERANCES
    problems = []
    tol = tolerances['metric']
    es = system.endpoint_set
    if es is not None:
        n = es.net.count
        if system.K != n * (n - 1) // 2:
            problems.append("thread count differs from N(N-1)/2")
        for (i, j), q in es.endpoints.items():
            d = geodesic_matrix(q[None, :], es.net.centers[i:i + 1])[0, 0]
            if abs(d - es.eps) > tol:
                problems.append(f"endpoint ({i}, {j}) is not on the boundary of ball {i}")
                break
        if n > 1 and es.min_spacing() <= es.eps / n:
            problems.append("same-ball endpoint spacing not above eps/N")
    for t in system.threads:
        if not (0.0 < t.length <= 2.0 + tolerances['algebraic']):
            problems.append(f"thread ({t.i}, {t.j}) has length {t.length}")
            break
    if system.K and system.rho > 0 and not system.rho_balls_disjoint():
        problems.append("rho-balls about endpoints overlap")
    return problems
