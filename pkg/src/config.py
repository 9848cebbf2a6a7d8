"""
Configuration module for flatlab
"""
import os
from pathlib import Path

# Project paths
PROJECT_ROOT = Path(__file__).parent.parent
OUTPUT_DIR = Path(os.getenv('FLATLAB_OUTPUT_DIR', str(PROJECT_ROOT / "runs")))

# Seed override for CI runs
SEED_ENV_VAR = 'FLATLAB_SEED'

# Number formatting for artifacts (bit-faithful float round-trip)
FLOAT_DIGITS = 17

# Every numerical tolerance lives here
TOLERANCES = {
    'algebraic': 1e-12,   # closed-form identities, unit norms
    'metric': 1e-10,      # metric axioms, distances placed by construction
    'search': 1e-6,       # midpoint refinement stop
    'gluing': 1e-8,       # C1 residual at the sphere cap
    'arc_length': 1e-6,   # graph length of a tunnel profile
}

NET_CONFIG = {
    'pool_factor': 50,            # candidate pool = factor * area / cap area
    'min_pool': 200,
    'validation_sample': 20000,
    'batch_size': 4096,
}

THREAD_CONFIG = {
    'spacing_margin': 1e-12,
    'max_rotations': 100000,
}

METRIC_CONFIG = {
    'dense_limit': 5000,          # endpoints kept in a dense distance matrix
    'brute_force_cap': 8,         # threads the exhaustive oracle accepts
    'chunk_cells': 4_000_000,     # broadcast cells per min-plus block
}

MIDPOINT_CONFIG = {
    'default_resolution': 24,
    'refine_rounds': 40,
    'refine_candidates': 64,
}

PROFILE_CONFIG = {
    'samples': 2000,
    'diameter_axial_nodes': 200,
    'diameter_angular_nodes': 32,
    'diameter_axial_reach': 16,    # longest axial step of the shortest-path grid
    'smoothing_fraction': 0.25,    # join window = fraction * min(rho0, bend length)
}

BUDGET_CONFIG = {
    'rho0_factor': 0.5,           # neck = factor * largest feasible neck
    'L_policy': 'thread',
}

SUITE_CONFIG = {
    'm': 2,
    'schedule': [0.7, 0.5, 0.35],
    'seeds': [0],
    'sample_size': 2000,
    'near_diagonal_size': 500,
    'gh_points': 120,
    'workers': 1,
    'twelve_eps_factor': 12.0,
    'lambda_bound': 13.0,
    'near_diagonal_bound': 10.0,
    'inversion_tolerance': 0.10,
}

SCHEMAS = {
    'net': 'net/1',
    'threads': 'threads/1',
    'profile': 'profile/1',
    'budget': 'budget/1',
    'report': 'report/1',
    'query': 'query/1',
}

# Visualization configuration
VIZ_CONFIG = {
    'template': 'plotly_white',
    'deviation_color': '#1f77b4',
    'bound_color': '#d62728',
    'budget_color': '#2ca02c',
    'height': 450,
}
