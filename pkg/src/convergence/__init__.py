"""Convergence experiments"""
from .lab import (
    ConvergenceRecord,
    ConvergenceReport,
    Ratios,
    sample_pairs,
    near_diagonal_pairs,
    uniform_deviation,
    lipschitz_ratios,
    small_angle_check,
    gh_sample_estimate,
    deviation_trend_ok,
    seed_spread,
    run_convergence_suite,
)

__all__ = [
    'ConvergenceRecord',
    'ConvergenceReport',
    'Ratios',
    'sample_pairs',
    'near_diagonal_pairs',
    'uniform_deviation',
    'lipschitz_ratios',
    'small_angle_check',
    'gh_sample_estimate',
    'deviation_trend_ok',
    'seed_spread',
    'run_convergence_suite',
]
