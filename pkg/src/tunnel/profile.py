"""
Rotationally symmetric tunnel profiles and their intrinsic geometry

A profile is a radius function r(s) of meridian arc length s on
[-L/2, L/2]; the tunnel is the warped product ds^2 + r(s)^2 g_{S^{m-1}}.
The committed family has three pieces on each side of s = 0:

* neck: r = rho0
* bend: r' = sin(psi), psi' = cos(psi) / (3 r), in closed form
  r = rho0 (1 + t^2)^{3/2}, s = rho0 (3t + t^3), t = tan(psi)
* collar: a piece of the unit sphere, r = sin(sigma), ending at sigma = rho

The bend meets the sphere where cos(psi)^4 = rho0; the collar fits inside
the removed ball only when rho0 <= sin(rho)^4. Both joins are replaced by
quintic Hermite windows so the profile is C2.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid, quad
from scipy.interpolate import BPoly
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ..config import PROFILE_CONFIG, TOLERANCES
from ..errors import ConstructionError, DomainError, ParameterError
from ..geometry.sphere import ball_volume, sphere_volume

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]
ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True, eq=False)
class TunnelProfile:
    """Radius function r(s) with first and second arc-length derivatives"""
    m: int
    rho0: float
    rho: float
    L: float
    L_prime: float
    s: np.ndarray
    r: np.ndarray
    r_prime: np.ndarray
    r_double_prime: np.ndarray
    evaluator: Evaluator
    breakpoints: Tuple[float, ...]
    kind: str = 'tunnel'
    neck_length: float = 0.0
    min_length: float = 0.0

    @property
    def s_min(self) -> float:
        return float(self.breakpoints[0])

    @property
    def s_max(self) -> float:
        return float(self.breakpoints[-1])

    def evaluate(self, s: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(r, r', r'') at arc length s"""
        arr = np.atleast_1d(np.asarray(s, dtype=float))
        slack = TOLERANCES['metric'] * max(1.0, self.L)
        if np.any(arr < self.s_min - slack) or np.any(arr > self.s_max + slack):
            raise DomainError(
                f"arc length outside the profile range [{self.s_min}, {self.s_max}]"
            )
        return self.evaluator(np.clip(arr, self.s_min, self.s_max))

    def _integrate(self, f: Callable[[float], float]) -> float:
        total = 0.0
        for lo, hi in zip(self.breakpoints[:-1], self.breakpoints[1:]):
            if hi > lo:
                value, _ = quad(f, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)
                total += value
        return total

    def _axial_rate(self, s: float) -> float:
        _, rp, _ = self.evaluator(np.array([s]))
        return math.sqrt(max(0.0, 1.0 - float(rp[0]) ** 2))

    def graph_length(self) -> float:
        """Length of the meridian graph, |(dt/ds, dr/ds)| integrated"""
        def speed(s: float) -> float:
            _, rp, _ = self.evaluator(np.array([s]))
            return math.hypot(self._axial_rate(s), float(rp[0]))
        return self._integrate(speed)

    def axial_extent(self) -> float:
        """L', the extent of the tunnel along its axis"""
        return self._integrate(self._axial_rate)

    def gluing_residual(self) -> float:
        """C1 mismatch against the unit-sphere cap at both ends (nan if not glued)"""
        if self.kind != 'tunnel':
            return math.nan
        r, rp, _ = self.evaluator(np.array([self.s_min, self.s_max]))
        target_r = math.sin(self.rho)
        target_rp = math.cos(self.rho)
        return float(max(
            abs(r[0] - target_r), abs(r[1] - target_r),
            abs(rp[0] + target_rp), abs(rp[1] - target_rp),
        ))

    def pipe_volume(self) -> float:
        """Half of the solid bounded by the rotated graph in E^{m+1}"""
        m = self.m

        def f(s: float) -> float:
            r, _, _ = self.evaluator(np.array([s]))
            return float(r[0]) ** m * self._axial_rate(s)
        return 0.5 * ball_volume(m) * self._integrate(f)

    def pipe_slice_volume(self) -> float:
        """Height-zero slice of the half solid"""
        m = self.m

        def f(s: float) -> float:
            r, _, _ = self.evaluator(np.array([s]))
            return float(r[0]) ** (m - 1) * self._axial_rate(s)
        return ball_volume(m - 1) * self._integrate(f)

    @classmethod
    def cylinder(cls, m: int, rho0: float, L: float, samples: Optional[int] = None) -> "TunnelProfile":
        """Round cylinder of radius rho0 and length L"""
        _check_dimension(m)
        if rho0 <= 0 or L <= 0:
            raise ParameterError("cylinder radius and length must be positive")

        def evaluator(s: np.ndarray):
            return np.full_like(s, rho0), np.zeros_like(s), np.zeros_like(s)

        return _sampled(
            m, rho0, rho0, L, L, evaluator, (-L / 2.0, L / 2.0), 'cylinder', samples,
            neck_length=L, min_length=0.0,
        )

    @classmethod
    def from_radius(
        cls,
        m: int,
        radius: Callable[[np.ndarray], np.ndarray],
        s_min: float,
        s_max: float,
        samples: Optional[int] = None,
    ) -> "TunnelProfile":
        """
        Profile from an arbitrary positive radius function

        Derivatives by 4th-order central differences with spacing span/2000.
        """
        _check_dimension(m)
        if s_max <= s_min:
            raise ParameterError("empty arc-length range")
        h = (s_max - s_min) / 2000.0

        def evaluator(s: np.ndarray):
            f = lambda k: np.asarray(radius(s + k * h), dtype=float)
            f2, f1, f0, fm1, fm2 = f(2), f(1), f(0), f(-1), f(-2)
            rp = (-f2 + 8.0 * f1 - 8.0 * fm1 + fm2) / (12.0 * h)
            rpp = (-f2 + 16.0 * f1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h)
            return f0, rp, rpp

        grid = np.linspace(s_min, s_max, samples or PROFILE_CONFIG['samples'])
        r = np.asarray(radius(grid), dtype=float)
        if np.any(r <= 0):
            raise ParameterError("radius function must be positive on its range")
        profile = _sampled(
            m, float(r.min()), float(r.max()), s_max - s_min, 0.0, evaluator,
            (s_min, s_max), 'radius', samples,
        )
        return _with_axial_extent(profile)


def _check_dimension(m: int) -> None:
    if m < 2:
        raise ParameterError(f"m must be at least 2, got {m}")


def _sampled(m, rho0, rho, L, L_prime, evaluator, breakpoints, kind, samples, **extra) -> TunnelProfile:
    count = samples or PROFILE_CONFIG['samples']
    s = np.linspace(breakpoints[0], breakpoints[-1], count)
    r, rp, rpp = evaluator(s)
    for arr in (s, r, rp, rpp):
        arr.setflags(write=False)
    return TunnelProfile(
        m=m, rho0=float(rho0), rho=float(rho), L=float(L), L_prime=float(L_prime),
        s=s, r=r, r_prime=rp, r_double_prime=rpp, evaluator=evaluator,
        breakpoints=tuple(float(b) for b in breakpoints), kind=kind, **extra,
    )


def _with_axial_extent(profile: TunnelProfile) -> TunnelProfile:
    return TunnelProfile(
        m=profile.m, rho0=profile.rho0, rho=profile.rho, L=profile.L,
        L_prime=profile.axial_extent(), s=profile.s, r=profile.r,
        r_prime=profile.r_prime, r_double_prime=profile.r_double_prime,
        evaluator=profile.evaluator, breakpoints=profile.breakpoints,
        kind=profile.kind, neck_length=profile.neck_length, min_length=profile.min_length,
    )


# ---------------------------------------------------------------------------
# the committed tunnel family
# ---------------------------------------------------------------------------

def max_neck_radius(rho: float) -> float:
    """Largest neck radius whose bend reaches the sphere inside the removed ball"""
    return math.sin(rho) ** 4


@dataclass(frozen=True)
class BendGeometry:
    """Closed-form bend data for one neck radius"""
    rho0: float
    t_end: float
    length: float
    sigma_join: float


def bend_geometry(rho0: float) -> BendGeometry:
    t_end = math.sqrt(max(rho0 ** -0.5 - 1.0, 0.0))
    length = rho0 * (3.0 * t_end + t_end ** 3)
    sigma_join = math.asin(min(1.0, rho0 ** 0.25))
    return BendGeometry(rho0, t_end, length, sigma_join)


def minimal_length(rho0: float, rho: float) -> float:
    """Shortest admissible L: both bends and collars, no neck"""
    bend = bend_geometry(rho0)
    return 2.0 * (bend.length + rho - bend.sigma_join)


def _bend_parameter(v: np.ndarray) -> np.ndarray:
    """Real root t of t^3 + 3t = v"""
    a = np.cbrt(0.5 * v + np.sqrt(0.25 * v * v + 1.0))
    return a - 1.0 / a


def _bend_piece(rho0: float, v: np.ndarray):
    """(r, r', r'') of the bend, v = arc length past the neck"""
    t = _bend_parameter(np.asarray(v, dtype=float) / rho0)
    q = 1.0 + t * t
    return rho0 * q ** 1.5, t / np.sqrt(q), 1.0 / (3.0 * rho0 * q ** 2.5)


def _collar_piece(bend: BendGeometry, v: np.ndarray):
    """(r, r', r'') of the collar, v = arc length past the bend"""
    sigma = bend.sigma_join + np.asarray(v, dtype=float)
    return np.sin(sigma), np.cos(sigma), -np.sin(sigma)


def _hermite(lo: float, hi: float, left, right) -> BPoly:
    """Quintic matching (r, r', r'') at both ends of [lo, hi]"""
    return BPoly.from_derivatives(
        [lo, hi], [[float(np.squeeze(x)) for x in left], [float(np.squeeze(x)) for x in right]]
    )


def _smoothed_joins(rho0: float, bend: BendGeometry, neck: float,
                    collar: float) -> List[Tuple[float, float, BPoly]]:
    """
    C2 windows over the two joins, in arc length past the neck

    The neck window starts at the neck end and lies inside the bend, so a
    longer neck only translates it. The collar window is centred on the join.
    """
    width = PROFILE_CONFIG['smoothing_fraction'] * min(rho0, bend.length)
    joins = [(0.0, width, _hermite(0.0, width, (rho0, 0.0, 0.0), _bend_piece(rho0, width)))]
    half = min(0.5 * width, collar)
    if half > 0.0:
        lo, hi = bend.length - half, bend.length + half
        joins.append((lo, hi, _hermite(lo, hi, _bend_piece(rho0, lo), _collar_piece(bend, half))))
    return joins


def generate_profile(m: int, rho0: float, rho: float, L: float, samples: Optional[int] = None,
                     check_psc: bool = True) -> TunnelProfile:
    """
    Build r_{rho0, L}: neck, bend, unit-sphere collar, mirrored about s = 0

    Args:
        m: dimension of the tunnel (m >= 2)
        rho0: neck radius
        rho: radius of the removed geodesic ball
        L: prescribed length of the meridian graph
        samples: arc-length grid size (default PROFILE_CONFIG['samples'])
        check_psc: for m >= 3, fail if scalar curvature is not positive

    Returns:
        The sampled profile
    """
    _check_dimension(m)
    if not (0.0 < rho0 < rho):
        raise ParameterError(f"need 0 < rho0 < rho, got rho0={rho0}, rho={rho}")
    if rho >= math.pi / 2.0:
        raise ParameterError(f"removed-ball radius must be below pi/2, got {rho}")
    if L <= 2.0 * (rho - rho0):
        raise ParameterError(f"L must exceed 2 (rho - rho0) = {2.0 * (rho - rho0)}, got {L}")
    neck_cap = max_neck_radius(rho)
    if rho0 > neck_cap:
        raise ConstructionError(
            f"neck radius {rho0} too large: the bend reaches the sphere outside the "
            f"removed ball; largest feasible neck for rho={rho} is {neck_cap}"
        )
    bend = bend_geometry(rho0)
    collar = rho - bend.sigma_join
    L_min = 2.0 * (bend.length + collar)
    if L < L_min * (1.0 - 1e-12):
        raise ConstructionError(f"L={L} is too short for the bend geometry; minimal feasible L is {L_min}")
    neck = max(0.0, 0.5 * L - bend.length - collar)
    bend_end = neck + bend.length
    joins = _smoothed_joins(rho0, bend, neck, collar)

    def evaluator(s: np.ndarray):
        u = np.abs(s)
        sign = np.where(s < 0, -1.0, 1.0)
        r = np.empty_like(u)
        rp = np.empty_like(u)
        rpp = np.empty_like(u)

        in_neck = u <= neck
        in_bend = (~in_neck) & (u <= bend_end)
        in_collar = ~(in_neck | in_bend)

        r[in_neck] = rho0
        rp[in_neck] = 0.0
        rpp[in_neck] = 0.0
        r[in_bend], rp[in_bend], rpp[in_bend] = _bend_piece(rho0, u[in_bend] - neck)
        r[in_collar], rp[in_collar], rpp[in_collar] = _collar_piece(bend, u[in_collar] - bend_end)

        for lo, hi, join in joins:
            inside = (u > neck + lo) & (u < neck + hi)
            v = u[inside] - neck
            r[inside], rp[inside], rpp[inside] = join(v), join(v, 1), join(v, 2)
        return r, sign * rp, rpp

    edges = sorted({0.5 * L, neck, bend_end, *(neck + e for lo, hi, _ in joins for e in (lo, hi))})
    breakpoints = tuple([-e for e in reversed(edges)] + [e for e in edges if e > 0.0])
    profile = _with_axial_extent(_sampled(
        m, rho0, rho, L, 0.0, evaluator, breakpoints, 'tunnel', samples,
        neck_length=2.0 * neck, min_length=L_min,
    ))
    if check_psc and m >= 3:
        curvature = scalar_curvature(profile, profile.s)
        bad = np.flatnonzero(curvature <= 0.0)
        if len(bad):
            k = int(bad[0])
            raise ConstructionError(
                f"scalar curvature {curvature[k]:.6g} <= 0 at s={profile.s[k]:.9g}"
            )
    logger.debug(f"profile m={m} rho0={rho0} rho={rho} L={L}: neck {2.0 * neck:.6g}, L'={profile.L_prime:.6g}")
    return profile


# ---------------------------------------------------------------------------
# accessors
# ---------------------------------------------------------------------------

def scalar_curvature(profile: TunnelProfile, s: ArrayLike) -> np.ndarray:
    """R(s) = (m-1) [ (m-2)(1 - r'^2)/r^2 - 2 r''/r ] for ds^2 + r^2 g_{S^{m-1}}"""
    r, rp, rpp = profile.evaluate(s)
    m = profile.m
    value = (m - 1) * ((m - 2) * (1.0 - rp * rp) / (r * r) - 2.0 * rpp / r)
    return value if np.ndim(s) else value[0]


def profile_volume(profile: TunnelProfile) -> float:
    """omega_{m-1} * integral of r^{m-1} ds"""
    m = profile.m

    def f(s: float) -> float:
        r, _, _ = profile.evaluator(np.array([s]))
        return float(r[0]) ** (m - 1)
    return sphere_volume(m - 1) * profile._integrate(f)


def fitted_volume_constant(profile: TunnelProfile) -> float:
    """Vol / (L rho0^{m-1})"""
    return profile_volume(profile) / (profile.L * profile.rho0 ** (profile.m - 1))


def _surface_grid(profile: TunnelProfile, axial: int, angular: int):
    s = np.linspace(profile.s_min, profile.s_max, axial)
    r, _, _ = profile.evaluator(s)
    return s, r, 2.0 * math.pi / angular


def _grid_offsets(reach: int) -> List[Tuple[int, int]]:
    """Primitive steps (di, dj) with 0 < di <= reach, |dj| <= 2, plus one angular step"""
    offsets = [(0, 1)]
    for di in range(1, reach + 1):
        for dj in (-2, -1, 0, 1, 2):
            if math.gcd(di, abs(dj)) == 1:
                offsets.append((di, dj))
    return offsets


def diameter_and_tube_check(profile: TunnelProfile, axial: Optional[int] = None,
                            angular: Optional[int] = None) -> Tuple[float, bool]:
    """
    Intrinsic diameter and the 2 pi rho tube condition about one meridian

    Shortest paths run on a meridian-latitude grid of the 2-dimensional
    slice through the axis, which is totally geodesic in the warped product.
    Distances from a node depend only on its angular offset, so sources on
    one meridian give the whole diameter.
    """
    axial = axial or PROFILE_CONFIG['diameter_axial_nodes']
    angular = angular or PROFILE_CONFIG['diameter_angular_nodes']
    if angular < 5:
        raise ParameterError("the angular grid needs at least 5 nodes")
    s, r, dphi = _surface_grid(profile, axial, angular)
    ds = s[1] - s[0]

    # straight (s, phi) segments, length from the mean radius they cross
    csum = np.concatenate([[0.0], np.cumsum(r)])
    idx = np.arange(axial * angular).reshape(axial, angular)
    columns = np.arange(angular)
    rows, cols, weights = [], [], []
    for di, dj in _grid_offsets(PROFILE_CONFIG['diameter_axial_reach']):
        if di >= axial:
            continue
        i = np.arange(axial - di)
        r_mean = (csum[i + di + 1] - csum[i]) / (di + 1)
        length = np.sqrt((di * ds) ** 2 + (r_mean * dj * dphi) ** 2)
        rows.append(idx[i].ravel())
        cols.append(idx[i + di][:, (columns + dj) % angular].ravel())
        weights.append(np.repeat(length, angular))
    graph = coo_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
        shape=(axial * angular, axial * angular),
    ).tocsr()

    meridian = idx[:, 0]
    dist = dijkstra(graph, directed=False, indices=meridian)
    diameter = float(dist.max())
    to_meridian = dijkstra(graph, directed=False, indices=meridian, min_only=True)
    tube_ok = bool(to_meridian.max() <= 2.0 * math.pi * profile.rho)
    return diameter, tube_ok


def profile_rows(profile: TunnelProfile) -> pd.DataFrame:
    """Sampled profile with curvature, one row per arc-length sample"""
    return pd.DataFrame({
        's': profile.s,
        'r': profile.r,
        'r_prime': profile.r_prime,
        'r_double_prime': profile.r_double_prime,
        'scalar_curvature': scalar_curvature(profile, profile.s),
    })


def surface_mesh(profile: TunnelProfile, angular: int = 48) -> Tuple[np.ndarray, np.ndarray]:
    """
    Triangulated surface of revolution in E^3 (m = 2 only)

    Returns:
        vertices (n, 3) with the axis along x, and 0-based triangle indices
    """
    if profile.m != 2:
        raise ParameterError("surface mesh export is for m = 2 profiles")
    s, r = profile.s, profile.r
    axial_rate = np.sqrt(np.clip(1.0 - profile.r_prime ** 2, 0.0, None))
    x = cumulative_trapezoid(axial_rate, s, initial=0.0)
    x -= 0.5 * x[-1]
    phi = np.linspace(0.0, 2.0 * math.pi, angular, endpoint=False)
    vertices = np.column_stack([
        np.repeat(x, angular),
        (r[:, None] * np.cos(phi)[None, :]).ravel(),
        (r[:, None] * np.sin(phi)[None, :]).ravel(),
    ])
    faces = []
    n = len(s)
    for i in range(n - 1):
        for j in range(angular):
            a = i * angular + j
            b = i * angular + (j + 1) % angular
            c = a + angular
            d = b + angular
            faces.append((a, b, d))
            faces.append((a, d, c))
    return vertices, np.array(faces, dtype=int)
