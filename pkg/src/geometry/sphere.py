"""
Round unit sphere S^m inside E^{m+1}: distances, curve lengths, the
midpoint defect of the chordal metric and epsilon-net construction
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad
from scipy.spatial.distance import cdist
from scipy.special import gamma

from ..config import MIDPOINT_CONFIG, NET_CONFIG, TOLERANCES
from ..errors import ParameterError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """Unit vector in E^{m+1}, m >= 2"""
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1)
        if coords.size < 3:
            raise ValidationError(f"ambient dimension must be at least 3, got {coords.size}")
        if not np.all(np.isfinite(coords)):
            raise ValidationError("sphere point has non-finite coordinates")
        norm = float(np.linalg.norm(coords))
        if abs(norm - 1.0) > TOLERANCES['algebraic']:
            raise ValidationError(f"point is not on the unit sphere: |x| = {norm!r}")
        coords.setflags(write=False)
        object.__setattr__(self, 'coords', coords)

    @property
    def m(self) -> int:
        return self.coords.size - 1

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "SpherePoint":
        """Normalize an arbitrary nonzero vector onto the sphere"""
        v = np.asarray(vector, dtype=float).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0.0 or not np.isfinite(norm):
            raise ValidationError("cannot normalize a zero or non-finite vector")
        return cls(v / norm)

    @classmethod
    def axis(cls, m: int, k: int, sign: float = 1.0) -> "SpherePoint":
        """Standard basis vector e_k (0-based) of E^{m+1}"""
        v = np.zeros(m + 1)
        v[k] = sign
        return cls(v)

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.coords)

    def __repr__(self) -> str:
        return f"SpherePoint({np.array2string(self.coords, precision=6)})"


PointLike = Union[SpherePoint, Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class SpherePolyline:
    """Ordered vertices of a discretized curve on the sphere"""
    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) < 1:
            raise ValidationError("a polyline needs at least one vertex")
        object.__setattr__(self, 'vertices', tuple(_as_point(v) for v in self.vertices))

    def coords(self) -> np.ndarray:
        return np.vstack([v.coords for v in self.vertices])


@dataclass(frozen=True, eq=False)
class Net:
    """Centers p_1..p_N with pairwise distance > 2 eps covering S^m at radius 2 eps"""
    centers: np.ndarray
    eps: float
    seed: int

    def __post_init__(self):
        centers = np.array(self.centers, dtype=float)
        if centers.ndim != 2 or centers.shape[0] < 1:
            raise ValidationError("a net needs a non-empty (N, m+1) array of centers")
        centers.setflags(write=False)
        object.__setattr__(self, 'centers', centers)

    @property
    def count(self) -> int:
        return self.centers.shape[0]

    @property
    def m(self) -> int:
        return self.centers.shape[1] - 1

    def points(self) -> List[SpherePoint]:
        return [SpherePoint(c) for c in self.centers]

    def min_separation(self) -> float:
        """Smallest pairwise geodesic distance between centers (inf for N = 1)"""
        if self.count < 2:
            return math.inf
        d = geodesic_matrix(self.centers, self.centers)
        np.fill_diagonal(d, np.inf)
        return float(d.min())


# ---------------------------------------------------------------------------
# coercion
# ---------------------------------------------------------------------------

def _as_point(x: PointLike) -> SpherePoint:
    return x if isinstance(x, SpherePoint) else SpherePoint(x)


def _as_unit_array(points: np.ndarray) -> np.ndarray:
    """Validate an (n, m+1) array of unit vectors"""
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.shape[1] < 3:
        raise ValidationError(f"ambient dimension must be at least 3, got {arr.shape[1]}")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(np.abs(norms - 1.0) > TOLERANCES['algebraic']):
        raise ValidationError("points are not on the unit sphere")
    return arr


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def geodesic_distance(x: PointLike, y: PointLike) -> float:
    """Great-circle distance arccos(x . y), in [0, pi]"""
    a, b = _as_point(x).coords, _as_point(y).coords
    if a.size != b.size:
        raise ValidationError("points live on spheres of different dimension")
    # atan2 form keeps full precision near 0 and near pi
    return float(2.0 * math.atan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def chordal_distance(x: PointLike, y: PointLike) -> float:
    """Restricted Euclidean distance sqrt(2 - 2 cos d_S(x, y))"""
    return float(2.0 * math.sin(0.5 * geodesic_distance(x, y)))


def geodesic_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Table of geodesic distances between rows of a and rows of b"""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    return 2.0 * np.arctan2(cdist(a, b), cdist(a, -b))


def chordal_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Table of ambient Euclidean distances between rows of a and rows of b"""
    return cdist(np.atleast_2d(a), np.atleast_2d(b))


def paired_geodesic(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Row-wise geodesic distance between two (n, m+1) arrays"""
    xs = np.atleast_2d(xs)
    ys = np.atleast_2d(ys)
    return 2.0 * np.arctan2(np.linalg.norm(xs - ys, axis=1), np.linalg.norm(xs + ys, axis=1))


def paired_chordal(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Row-wise ambient distance between two (n, m+1) arrays"""
    return np.linalg.norm(np.atleast_2d(xs) - np.atleast_2d(ys), axis=1)


def polyline_length(curve: SpherePolyline, metric: str = 'geodesic') -> float:
    """
    Length of a polyline on its own vertex partition

    Args:
        curve: the polyline
        metric: 'geodesic' or 'chordal'

    Returns:
        Sum of consecutive distances; 0 for a single vertex
    """
    if metric not in ('geodesic', 'chordal'):
        raise ValidationError(f"unknown metric {metric!r}")
    pts = curve.coords()
    if len(pts) < 2:
        return 0.0
    steps = paired_geodesic(pts[:-1], pts[1:])
    if metric == 'chordal':
        steps = 2.0 * np.sin(0.5 * steps)
    return float(steps.sum())


# ---------------------------------------------------------------------------
# tangent geometry
# ---------------------------------------------------------------------------

def exp_map(p: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exponential map of the unit sphere at p applied to tangent vector v"""
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return np.array(p, dtype=float)
    q = math.cos(norm) * p + math.sin(norm) * (v / norm)
    return q / np.linalg.norm(q)


def tangent_toward(p: np.ndarray, q: np.ndarray) -> Optional[np.ndarray]:
    """Unit tangent at p pointing along the minimizing geodesic to q; None if q = +-p"""
    w = q - np.dot(p, q) * p
    norm = np.linalg.norm(w)
    if norm < TOLERANCES['algebraic']:
        return None
    return w / norm


def tangent_frame(p: np.ndarray) -> np.ndarray:
    """
    Deterministic orthonormal basis of the tangent space at p

    Gram-Schmidt over the standard basis, taken in order of how far each
    axis is from p, so the frame depends on p's coordinates only.
    """
    dim = p.size
    order = np.argsort(np.abs(p), kind='stable')
    frame = []
    for k in order:
        e = np.zeros(dim)
        e[k] = 1.0
        w = e - np.dot(e, p) * p
        for f in frame:
            w -= np.dot(w, f) * f
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            frame.append(w / norm)
        if len(frame) == dim - 1:
            break
    return np.vstack(frame)


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

def sphere_volume(m: int) -> float:
    """Measure of the unit sphere S^m"""
    return float(2.0 * math.pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0))


def ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m"""
    return float(math.pi ** (m / 2.0) / gamma(m / 2.0 + 1.0))


def cap_area(m: int, radius: float) -> float:
    """Measure of a geodesic ball of the given radius in S^m"""
    radius = min(max(radius, 0.0), math.pi)
    if m == 2:
        return 2.0 * math.pi * (1.0 - math.cos(radius))
    value, _ = quad(lambda s: math.sin(s) ** (m - 1), 0.0, radius)
    return sphere_volume(m - 1) * value


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def random_sphere_points(m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded uniform sample: normalized standard-normal vectors"""
    pts = rng.standard_normal((count, m + 1))
    norms = np.linalg.norm(pts, axis=1)
    # a zero draw has probability zero; redraw defensively keeps shape
    while np.any(norms == 0.0):
        bad = norms == 0.0
        pts[bad] = rng.standard_normal((int(bad.sum()), m + 1))
        norms = np.linalg.norm(pts, axis=1)
    return pts / norms[:, None]


def fibonacci_sphere(count: int) -> np.ndarray:
    """Quasi-uniform spiral lattice on S^2"""
    i = np.arange(count, dtype=float)
    y = 1.0 - (i + 0.5) * (2.0 / count)
    r = np.sqrt(np.clip(1.0 - y * y, 0.0, None))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    pts = np.column_stack([np.cos(phi) * r, y, np.sin(phi) * r])
    return pts / np.linalg.norm(pts, axis=1)[:, None]


def validation_points(m: int, size: Optional[int] = None) -> np.ndarray:
    """
    Dense deterministic sample used to check covering

    The spiral lattice for S^2, a fixed-seed uniform sample otherwise.
    """
    size = size or NET_CONFIG['validation_sample']
    if m == 2:
        return fibonacci_sphere(size)
    return random_sphere_points(m, size, np.random.default_rng(0))


def covering_radius(net: Net, sample: np.ndarray) -> float:
    """Largest distance from a sample point to its nearest center"""
    sample = np.atleast_2d(sample)
    worst = 0.0
    step = NET_CONFIG['batch_size']
    for start in range(0, len(sample), step):
        d = geodesic_matrix(sample[start:start + step], net.centers)
        worst = max(worst, float(d.min(axis=1).max()))
    return worst


# ---------------------------------------------------------------------------
# midpoint defect
# ---------------------------------------------------------------------------

def midpoint_defect_closed_form(theta: float) -> float:
    """Defect attained at the geodesic midpoint of a pair at angle theta"""
    return 2.0 * math.sin(theta / 4.0) - math.sin(theta / 2.0)


def _plane_basis(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Orthonormal 3-frame containing a and b"""
    vecs = [a, b]
    basis: List[np.ndarray] = []
    for v in vecs + list(np.eye(a.size)[np.argsort(np.abs(a), kind='stable')]):
        w = np.array(v, dtype=float)
        for f in basis:
            w -= np.dot(w, f) * f
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            basis.append(w / norm)
        if len(basis) == 3:
            break
    return np.vstack(basis)


def midpoint_defect(x: PointLike, y: PointLike, resolution: Optional[int] = None) -> float:
    """
    How far the chordal metric is from having a midpoint of x and y

    min over z of max(|d_E(x,z) - d_E(x,y)/2|, |d_E(y,z) - d_E(x,y)/2|).
    The objective depends on z only through (x.z, y.z), so the search runs
    on the 2-sphere spanned by x, y and one extra axis: a spiral grid of
    about 4 * resolution^2 points, then compass refinement.
    """
    a, b = _as_point(x).coords, _as_point(y).coords
    if a.size != b.size:
        raise ValidationError("points live on spheres of different dimension")
    half = 0.5 * chordal_distance(a, b)
    if half == 0.0:
        return 0.0
    resolution = resolution or MIDPOINT_CONFIG['default_resolution']
    frame = _plane_basis(a, b)
    ra, rb = frame @ a, frame @ b

    def objective(w: np.ndarray) -> np.ndarray:
        w = np.atleast_2d(w)
        da = np.linalg.norm(w - ra, axis=1)
        db = np.linalg.norm(w - rb, axis=1)
        return np.maximum(np.abs(da - half), np.abs(db - half))

    grid = fibonacci_sphere(max(64, 4 * resolution * resolution))
    values = objective(grid)
    k = int(np.argmin(values))
    best, best_val = grid[k], float(values[k])

    # compass search on S^2
    step = 2.0 * math.pi / resolution
    angles = np.linspace(0.0, 2.0 * math.pi, MIDPOINT_CONFIG['refine_candidates'], endpoint=False)
    for _ in range(MIDPOINT_CONFIG['refine_rounds'] * 4):
        if step < TOLERANCES['search']:
            break
        t = tangent_frame(best)
        dirs = np.cos(angles)[:, None] * t[0] + np.sin(angles)[:, None] * t[1]
        cand = math.cos(step) * best + math.sin(step) * dirs
        cand /= np.linalg.norm(cand, axis=1)[:, None]
        vals = objective(cand)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best, best_val = cand[j], float(vals[j])
        else:
            step *= 0.5
    return best_val


# ---------------------------------------------------------------------------
# epsilon nets
# ---------------------------------------------------------------------------

def _greedy_extend(centers: List[np.ndarray], pool: np.ndarray, threshold: float) -> List[np.ndarray]:
    """Farthest-point insertion from pool while the farthest point is > threshold away"""
    if len(pool) == 0:
        return centers
    if centers:
        dist = geodesic_matrix(pool, np.vstack(centers)).min(axis=1)
    else:
        centers.append(pool[0])
        dist = geodesic_matrix(pool, pool[:1])[:, 0]
    while True:
        k = int(np.argmax(dist))
        if dist[k] <= threshold:
            return centers
        centers.append(pool[k])
        dist = np.minimum(dist, geodesic_matrix(pool, pool[k:k + 1])[:, 0])


def build_net(m: int, eps: float, seed: int) -> Net:
    """
    Greedy maximal 2 eps-separated family on S^m

    Farthest-point insertion over a seeded candidate pool, then over the
    dense validation sample so that the sample is covered at radius 2 eps.
    """
    if m < 2:
        raise ParameterError(f"m must be at least 2, got {m}")
    if not (0.0 < eps < math.pi):
        raise ParameterError(f"eps must lie in (0, pi), got {eps}")
    rng = np.random.default_rng(seed)
    ratio = sphere_volume(m) / cap_area(m, eps)
    pool_size = max(NET_CONFIG['min_pool'], int(math.ceil(NET_CONFIG['pool_factor'] * ratio)))
    pool = random_sphere_points(m, pool_size, rng)

    threshold = 2.0 * eps
    centers = _greedy_extend([], pool, threshold)
    from_pool = len(centers)
    centers = _greedy_extend(centers, validation_points(m), threshold)
    logger.info(
        f"net m={m} eps={eps} seed={seed}: {len(centers)} centers "
        f"({from_pool} from a pool of {pool_size})"
    )
    return Net(np.vstack(centers), float(eps), int(seed))
