"""
Pipe-filling budgets: heights, region volumes and the d_F / d_GH bounds

A manifold with one tunnel and the same manifold with a thread in its place
are joined by a filling built from three slabs:

* bottom: N_rho x [-h0, 0], plus the height-zero slice of the pipe
* middle: the rho-thick layer over N together with the half pipe P
* top: N x [0, h]

Its volume bounds the flat distance; the lengths of the vertical paths
bound the Gromov-Hausdorff distance by h0 + 2 pi rho + h.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from ..config import BUDGET_CONFIG
from ..errors import InvariantViolation, ParameterError
from ..geometry.sphere import ball_volume, cap_area, sphere_volume
from ..geometry.threads import ThreadSystem
from ..tunnel.profile import (
    TunnelProfile,
    generate_profile,
    max_neck_radius,
    minimal_length,
    profile_volume,
)

logger = logging.getLogger(__name__)

L_POLICIES = ('thread', 'min')


@dataclass(frozen=True)
class FillingBudget:
    """Volume and length budget for replacing one tunnel by a thread"""
    m: int
    rho: float
    rho0: float
    L: float
    diam: float
    vol: float
    h: float
    h0: float
    vol_bottom: float
    vol_mid: float
    vol_top: float
    pipe_vol: float
    pipe_slice_vol: float
    cusp_vol: float
    removed_ball_vol: float
    pipe_constant: float
    dF_bound: float
    dGH_bound: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ProfileParams:
    """How each thread's tunnel is shaped in an iterated budget"""
    rho0_factor: float = BUDGET_CONFIG['rho0_factor']
    L_policy: str = BUDGET_CONFIG['L_policy']

    def __post_init__(self):
        if not (0.0 < self.rho0_factor < 1.0):
            raise ParameterError(f"rho0_factor must lie in (0, 1), got {self.rho0_factor}")
        if self.L_policy not in L_POLICIES:
            raise ParameterError(f"L_policy must be one of {L_POLICIES}, got {self.L_policy!r}")


@dataclass(frozen=True)
class IteratedBudget:
    """Tunnels replaced one at a time; budgets chain by the triangle inequality"""
    m: int
    eps: float
    count: int
    K: int
    rho: float
    rho0: float
    per_step: Tuple[FillingBudget, ...]
    host_volumes: Tuple[float, ...]
    total_dF: float
    total_dGH: float
    fitted_constants: Dict[str, float] = field(default_factory=dict)
    dF_per_eps: float = 0.0
    chained_bound: float = 0.0


def heights(rho: float, diam: float) -> Tuple[float, float]:
    """
    h = sqrt(2 rho diam - rho^2) and h0 = sqrt(2 pi rho diam + 8 rho)

    Raises:
        ParameterError: rho not positive, or rho > 2*diam (h imaginary)
    """
    if diam <= 0:
        raise ParameterError(f"diam must be positive, got {diam}")
    if rho <= 0:
        raise ParameterError(f"rho must be positive, got {rho}")
    if rho > 2.0 * diam:
        raise ParameterError(
            f"height h is imaginary: rho={rho} > 2*diam={2.0 * diam} "
            f"makes 2*rho*diam - rho^2 negative"
        )
    h = math.sqrt(max(0.0, 2.0 * rho * diam - rho * rho))
    h0 = math.sqrt(2.0 * math.pi * rho * diam + 8.0 * rho)
    return h, h0


def _assemble(m: int, rho: float, rho0: float, L: float, vol: float, diam: float,
              pipe_vol: float, pipe_slice_vol: float) -> FillingBudget:
    h, h0 = heights(rho, diam)
    vol_bottom = h0 * (vol + pipe_slice_vol)
    vol_mid = rho * vol + pipe_vol
    vol_top = h * vol
    removed = cap_area(m, rho)
    return FillingBudget(
        m=m, rho=rho, rho0=rho0, L=L, diam=diam, vol=vol, h=h, h0=h0,
        vol_bottom=vol_bottom, vol_mid=vol_mid, vol_top=vol_top,
        pipe_vol=pipe_vol, pipe_slice_vol=pipe_slice_vol,
        cusp_vol=2.0 * removed * rho,
        removed_ball_vol=removed,
        pipe_constant=pipe_vol / (L * rho0 ** m),
        dF_bound=vol_bottom + vol_mid + vol_top,
        dGH_bound=h0 + 2.0 * math.pi * rho + h,
    )


def filling_budget(profile: TunnelProfile, vol: float, diam: float) -> FillingBudget:
    """
    Budget for one tunnel of the given profile in a host of volume vol and diameter diam

    Args:
        profile: the tunnel being replaced
        vol: Vol(N) of the host
        diam: diam(N) of the host

    Returns:
        FillingBudget with all three slab volumes and both bounds
    """
    if vol <= 0:
        raise ParameterError(f"host volume must be positive, got {vol}")
    heights(profile.rho, diam)
    if profile.rho >= diam:
        raise ParameterError(f"tunnel radius {profile.rho} must be below the host diameter {diam}")
    return _assemble(
        profile.m, profile.rho, profile.rho0, profile.L, vol, diam,
        profile.pipe_volume(), profile.pipe_slice_volume(),
    )


def _tunnel_length(params: ProfileParams, thread_length: float, L_min: float) -> float:
    if params.L_policy == 'min':
        return L_min
    return max(thread_length, L_min)


def iterated_budget(threads: ThreadSystem, params: Optional[ProfileParams] = None) -> IteratedBudget:
    """
    Replace the K tunnels of M_eps by threads one at a time

    All tunnels share rho and rho0, so they differ only in neck length.
    One base tunnel of minimal length is integrated; longer ones add a
    cylinder of radius rho0, whose volume, pipe and pipe slice are exact.
    The host at step k is the sphere with the tunnels k, k+1, ... still
    attached, diameter pi plus the longest of those tunnels.
    """
    params = params or ProfileParams()
    m, eps, rho = threads.m, threads.eps, threads.rho
    K = threads.K
    count = threads.count
    if count is None:
        count = int(math.ceil((1.0 + math.sqrt(1.0 + 8.0 * K)) / 2.0)) if K else 1
    elif K != count * (count - 1) // 2:
        raise InvariantViolation(f"{K} threads for {count} net points, expected {count * (count - 1) // 2}")
    sphere = sphere_volume(m)
    if K == 0:
        return IteratedBudget(m, eps, count, 0, rho, 0.0, (), (), 0.0, 0.0,
                              {'C1': 0.0, 'C2': 0.0, 'C3': 0.0}, 0.0, 0.0)
    if rho <= 0 or eps <= 0:
        raise ParameterError("thread system carries no eps or tunnel radius")

    rho0 = params.rho0_factor * max_neck_radius(rho)
    L_min = minimal_length(rho0, rho)
    base = generate_profile(m, rho0, rho, L_min)
    base_vol = profile_volume(base)
    base_pipe = base.pipe_volume()
    base_slice = base.pipe_slice_volume()
    neck_vol = sphere_volume(m - 1) * rho0 ** (m - 1)
    neck_pipe = 0.5 * ball_volume(m) * rho0 ** m
    neck_slice = ball_volume(m - 1) * rho0 ** (m - 1)

    lengths = [_tunnel_length(params, t.length, L_min) for t in threads.threads]
    short = sum(1 for t in threads.threads if t.length < L_min)
    if short and params.L_policy == 'thread':
        logger.warning(f"{short} of {K} threads are shorter than the minimal tunnel {L_min:.6g}; tunnels use L_min")
    tunnel_vols = [base_vol + neck_vol * (L - L_min) for L in lengths]

    per_step: List[FillingBudget] = []
    hosts: List[float] = []
    for k, L in enumerate(lengths):
        host_vol = sphere + sum(tunnel_vols[k:])
        host_diam = math.pi + max(lengths[k:])
        extra = L - L_min
        per_step.append(_assemble(
            m, rho, rho0, L, host_vol, host_diam,
            base_pipe + neck_pipe * extra, base_slice + neck_slice * extra,
        ))
        hosts.append(host_vol)

    total_dF = sum(b.dF_bound for b in per_step)
    total_dGH = sum(b.dGH_bound for b in per_step)
    constants = {
        'C1': max(tunnel_vols) / rho ** (m - 1),
        'C2': max(h - sphere for h in hosts) / eps ** (m - 1),
        'C3': max(b.dF_bound for b in per_step) / rho,
    }
    logger.info(f"iterated budget eps={eps}: K={K}, total dF={total_dF:.6g}, total dGH={total_dGH:.6g}")
    return IteratedBudget(
        m=m, eps=eps, count=count, K=K, rho=rho, rho0=rho0,
        per_step=tuple(per_step), host_volumes=tuple(hosts),
        total_dF=total_dF, total_dGH=total_dGH, fitted_constants=constants,
        dF_per_eps=total_dF / eps if eps > 0 else math.inf,
        chained_bound=count ** 2 * constants['C3'] * rho,
    )
