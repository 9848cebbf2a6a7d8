"""
Convergence experiments for spheres with threads

Sampled estimates of the uniform deviation d_Y - d_E, the biLipschitz
ratios d_Y / d_E, a Gromov-Hausdorff estimate on a shared sample, and the
end-to-end suite over a decreasing eps schedule with its filling budgets.
Sup-norms are estimated on seeded samples; nothing here is a certificate.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import SUITE_CONFIG, TOLERANCES
from ..errors import ConstructionError, ParameterError, ValidationError
from ..filling.budget import ProfileParams, iterated_budget
from ..geometry.sphere import (
    build_net,
    chordal_matrix,
    paired_chordal,
    random_sphere_points,
)
from ..geometry.threads import build_threads, check_thread_system, place_endpoints
from ..metric.hybrid import HybridMetric, build_metric

logger = logging.getLogger(__name__)

PointPairs = Tuple[np.ndarray, np.ndarray]


class Ratios(NamedTuple):
    """Extremes of d_Y / d_E over a sample, with the coincident pairs left out"""
    min_ratio: float
    max_ratio: float
    skipped: int


@dataclass
class ConvergenceRecord:
    """Measurements for one (eps, seed) point of the schedule"""
    eps: float
    seed: int
    N: int = 0
    K: int = 0
    rho: float = math.nan
    sup_deviation: float = math.nan
    max_ratio: float = math.nan
    min_ratio: float = math.nan
    near_diagonal_max_ratio: float = math.nan
    skipped_pairs: int = 0
    gh_estimate: float = math.nan
    dF_budget: float = math.nan
    dGH_budget: float = math.nan
    uniform_surrogate: float = math.nan
    twelve_eps_ok: bool = False
    lambda_ok: bool = False
    near_ok: bool = False
    small_angle_ok: bool = False
    single_ball_ok: bool = False
    sample_size: int = 0
    wall_time: float = 0.0
    status: str = 'ok'
    error: str = ''

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> "ConvergenceRecord":
        return cls(**data)


@dataclass
class ConvergenceReport:
    """All records of one suite run, in schedule order then seed order"""
    m: int
    schedule: List[float]
    seeds: List[int]
    sample_size: int
    per_eps: List[ConvergenceRecord] = field(default_factory=list)

    def records_for(self, eps: float) -> List[ConvergenceRecord]:
        return [r for r in self.per_eps if r.eps == eps]

    def sup_by_eps(self) -> List[float]:
        """Mean sup deviation across seeds, one value per schedule point"""
        out = []
        for eps in self.schedule:
            values = [r.sup_deviation for r in self.records_for(eps) if r.status == 'ok']
            out.append(float(np.mean(values)) if values else math.nan)
        return out

    def breaches(self) -> List[str]:
        """Bound violations among the successful records"""
        found = []
        for r in self.per_eps:
            if r.status == 'invalid':
                found.append(f"eps={r.eps} seed={r.seed}: {r.error}")
            if r.status != 'ok':
                continue
            if not r.twelve_eps_ok:
                found.append(f"eps={r.eps} seed={r.seed}: sup deviation {r.sup_deviation:.6g} > 12 eps")
            if r.small_angle_ok and not r.lambda_ok:
                found.append(f"eps={r.eps} seed={r.seed}: ratio range [{r.min_ratio:.6g}, {r.max_ratio:.6g}] breaks lambda")
        return found

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for r in self.per_eps:
            rows.append({
                'eps': r.eps,
                'N': r.N,
                'K': r.K,
                'sup_dev': r.sup_deviation,
                'max_ratio': r.max_ratio,
                'min_ratio': r.min_ratio,
                'gh_est': r.gh_estimate,
                'dF_budget': r.dF_budget,
                'dGH_budget': r.dGH_budget,
                'seed': r.seed,
                'wall_ms': r.wall_time * 1000.0,
                'twelve_eps_ok': r.twelve_eps_ok,
                'lambda_ok': r.lambda_ok,
                'near_ok': r.near_ok,
                'small_angle_ok': r.small_angle_ok,
                'single_ball_ok': r.single_ball_ok,
                'status': r.status,
            })
        return pd.DataFrame(rows)

    def plot_rows(self) -> pd.DataFrame:
        """eps against sup deviation and against the d_F budget"""
        frame = self.to_frame()
        if frame.empty:
            return pd.DataFrame(columns=['eps', 'sup_dev', 'dF_budget'])
        return frame.groupby('eps', sort=False)[['sup_dev', 'dF_budget']].mean().reset_index()


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sample_pairs(m: int, size: int, seed: int) -> PointPairs:
    """Independent uniform pairs"""
    if size < 1:
        raise ParameterError(f"sample size must be at least 1, got {size}")
    rng = np.random.default_rng(seed)
    return random_sphere_points(m, size, rng), random_sphere_points(m, size, rng)


def near_diagonal_pairs(m: int, rho: float, size: int, rng: np.random.Generator,
                        max_rounds: int = 50) -> PointPairs:
    """
    Pairs with d_E < rho

    y is the exponential of a tangent Gaussian of scale rho/2 at x; draws
    with d_E >= rho or d_E = 0 are discarded.
    """
    xs_out, ys_out = [], []
    have = 0
    for _ in range(max_rounds):
        x = random_sphere_points(m, size, rng)
        v = rng.standard_normal(x.shape) * (0.5 * rho)
        v -= np.sum(v * x, axis=1)[:, None] * x
        norm = np.linalg.norm(v, axis=1)
        ok = norm > 0
        x, v, norm = x[ok], v[ok], norm[ok]
        y = np.cos(norm)[:, None] * x + (np.sin(norm) / norm)[:, None] * v
        y /= np.linalg.norm(y, axis=1)[:, None]
        d = paired_chordal(x, y)
        keep = (d < rho) & (d > 0)
        xs_out.append(x[keep])
        ys_out.append(y[keep])
        have += int(keep.sum())
        if have >= size:
            break
    xs = np.vstack(xs_out)[:size]
    ys = np.vstack(ys_out)[:size]
    return xs, ys


# ---------------------------------------------------------------------------
# measurements
# ---------------------------------------------------------------------------

def uniform_deviation(metric: HybridMetric, sample_size: int = SUITE_CONFIG['sample_size'],
                      seed: int = 0, pairs: Optional[PointPairs] = None) -> float:
    """sup over sampled pairs of d_Y - d_E"""
    xs, ys = pairs if pairs is not None else sample_pairs(metric.threads.m, sample_size, seed)
    gap = metric.distances(xs, ys) - paired_chordal(xs, ys)
    return max(0.0, float(gap.max()))


def lipschitz_ratios(metric: HybridMetric, sample_size: int = SUITE_CONFIG['sample_size'],
                     seed: int = 0, pairs: Optional[PointPairs] = None,
                     coincident: Optional[float] = None) -> Ratios:
    """Min and max of d_Y / d_E; pairs with d_E = 0 are skipped and counted"""
    xs, ys = pairs if pairs is not None else sample_pairs(metric.threads.m, sample_size, seed)
    d_e = paired_chordal(xs, ys)
    usable = d_e > (TOLERANCES['algebraic'] if coincident is None else coincident)
    skipped = int((~usable).sum())
    if skipped:
        logger.debug(f"{skipped} coincident pairs skipped")
    if not usable.any():
        return Ratios(math.nan, math.nan, skipped)
    ratio = metric.distances(xs[usable], ys[usable]) / d_e[usable]
    return Ratios(float(ratio.min()), float(ratio.max()), skipped)


def small_angle_check(rho: float, points: int = 10_000, tolerance: Optional[float] = None) -> bool:
    """r^2 / 100 <= 2 - 2 cos r on a grid of [0, rho]"""
    if rho <= 0:
        raise ParameterError(f"rho must be positive, got {rho}")
    tolerance = TOLERANCES['algebraic'] if tolerance is None else tolerance
    r = np.linspace(0.0, rho, points)
    return bool(np.all(r * r / 100.0 <= 4.0 * np.sin(0.5 * r) ** 2 + tolerance * r * r))


def gh_sample_estimate(dist_a: np.ndarray, dist_b: np.ndarray) -> float:
    """
    Half the distortion of the identity correspondence on a shared sample

    Upper-bounds the Gromov-Hausdorff distance between the two sampled
    submetrics.
    """
    a = np.asarray(dist_a, dtype=float)
    b = np.asarray(dist_b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("distance tables must be square and of equal shape")
    if a.size == 0:
        return 0.0
    return 0.5 * float(np.abs(a - b).max())


# ---------------------------------------------------------------------------
# trend helpers
# ---------------------------------------------------------------------------

def deviation_trend_ok(values: Sequence[float], inversion_tol: float = SUITE_CONFIG['inversion_tolerance']) -> bool:
    """Nonincreasing along the schedule, except for at most one rise of at most inversion_tol"""
    clean = [v for v in values if not math.isnan(v)]
    inversions = 0
    for prev, cur in zip(clean, clean[1:]):
        if cur > prev:
            inversions += 1
            if inversions > 1 or cur > prev * (1.0 + inversion_tol):
                return False
    return True


def seed_spread(values: Iterable[float]) -> float:
    """(max - min) / mean across seeds"""
    clean = np.array([v for v in values if not math.isnan(v)], dtype=float)
    if len(clean) < 2 or clean.mean() == 0:
        return 0.0
    return float((clean.max() - clean.min()) / clean.mean())


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SuitePoint:
    m: int
    eps: float
    seed: int
    sample_size: int
    near_size: int
    gh_points: int
    params: ProfileParams
    with_budget: bool
    tolerances: Mapping[str, float]


def _measure(point: _SuitePoint) -> ConvergenceRecord:
    started = time.perf_counter()
    record = ConvergenceRecord(eps=point.eps, seed=point.seed, sample_size=point.sample_size)
    try:
        net = build_net(point.m, point.eps, point.seed)
        threads = build_threads(place_endpoints(net))
    except ConstructionError as exc:
        logger.warning(f"eps={point.eps} seed={point.seed}: construction failed: {exc}")
        record.status = 'failed'
        record.error = str(exc)
        record.wall_time = time.perf_counter() - started
        return record

    problems = check_thread_system(threads, point.tolerances)
    if problems:
        logger.warning(f"eps={point.eps} seed={point.seed}: thread invariants fail: {problems}")
        record.status = 'invalid'
        record.error = "; ".join(problems)
        record.wall_time = time.perf_counter() - started
        return record

    metric = build_metric(threads)
    record.N = net.count
    record.K = threads.K
    record.rho = threads.rho

    xs, ys = sample_pairs(point.m, point.sample_size, point.seed)
    record.sup_deviation = uniform_deviation(metric, pairs=(xs, ys))
    tol = point.tolerances
    ratios = lipschitz_ratios(metric, pairs=(xs, ys), coincident=tol['algebraic'])
    record.min_ratio, record.max_ratio, record.skipped_pairs = ratios

    rng = np.random.default_rng([point.seed, 1])
    near = near_diagonal_pairs(point.m, threads.rho, point.near_size, rng)
    record.near_diagonal_max_ratio = lipschitz_ratios(metric, pairs=near, coincident=tol['algebraic']).max_ratio

    shared = xs[:point.gh_points]
    record.gh_estimate = gh_sample_estimate(metric.pairwise(shared), chordal_matrix(shared, shared))

    record.small_angle_ok = small_angle_check(threads.rho, tolerance=tol['algebraic'])
    record.single_ball_ok = threads.rho_balls_disjoint()
    if not (record.small_angle_ok and record.single_ball_ok):
        logger.warning(f"eps={point.eps} seed={point.seed}: small-eps preconditions fail")

    record.twelve_eps_ok = record.sup_deviation <= SUITE_CONFIG['twelve_eps_factor'] * point.eps
    record.lambda_ok = (
        record.max_ratio <= SUITE_CONFIG['lambda_bound']
        and record.min_ratio >= 1.0 - tol['metric']
    )
    near_max = record.near_diagonal_max_ratio
    record.near_ok = math.isnan(near_max) or near_max <= SUITE_CONFIG['near_diagonal_bound']
    record.uniform_surrogate = record.sup_deviation

    if point.with_budget:
        try:
            budget = iterated_budget(threads, point.params)
            record.dF_budget = budget.total_dF
            record.dGH_budget = budget.total_dGH
        except ConstructionError as exc:
            logger.warning(f"eps={point.eps} seed={point.seed}: no tunnel budget: {exc}")
    record.wall_time = time.perf_counter() - started
    logger.info(
        f"eps={point.eps} seed={point.seed}: N={record.N} K={record.K} "
        f"sup_dev={record.sup_deviation:.6g} ratio=[{record.min_ratio:.6g}, {record.max_ratio:.6g}]"
    )
    return record


def run_convergence_suite(
    m: int = SUITE_CONFIG['m'],
    schedule: Sequence[float] = tuple(SUITE_CONFIG['schedule']),
    seeds: Sequence[int] = tuple(SUITE_CONFIG['seeds']),
    sample_size: int = SUITE_CONFIG['sample_size'],
    near_size: int = SUITE_CONFIG['near_diagonal_size'],
    gh_points: int = SUITE_CONFIG['gh_points'],
    workers: int = SUITE_CONFIG['workers'],
    params: Optional[ProfileParams] = None,
    with_budget: bool = True,
    tolerances: Optional[Mapping[str, float]] = None,
) -> ConvergenceReport:
    """
    Build Y_eps for every (eps, seed) and measure it

    Args:
        m: sphere dimension
        schedule: strictly decreasing eps values
        seeds: one record per seed at every eps
        sample_size: uniform pairs per record
        near_size: near-diagonal pairs per record
        gh_points: shared sample size for the Gromov-Hausdorff estimate
        workers: thread pool size; records come back in schedule order
        params: tunnel shape used for the filling budgets
        with_budget: skip the iterated budget when False
        tolerances: overrides merged over TOLERANCES

    Returns:
        ConvergenceReport; construction failures are recorded, not raised
    """
    schedule = [float(e) for e in schedule]
    seeds = [int(s) for s in seeds]
    if m < 2:
        raise ParameterError(f"m must be at least 2, got {m}")
    if not schedule or not seeds:
        raise ParameterError("schedule and seeds must be non-empty")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ParameterError(f"schedule must be strictly decreasing, got {schedule}")
    if sample_size < 1:
        raise ParameterError(f"sample_size must be at least 1, got {sample_size}")
    params = params or ProfileParams()
    tolerances = {**TOLERANCES, **(tolerances or {})}

    points = [
        _SuitePoint(m, eps, seed, sample_size, near_size, gh_points, params, with_budget, tolerances)
        for eps in schedule for seed in seeds
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(_measure, points))
    else:
        records = [_measure(p) for p in points]
    return ConvergenceReport(m, schedule, seeds, sample_size, records)
