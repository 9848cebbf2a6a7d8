"""Sphere-with-threads length metric"""
from .hybrid import (
    HybridMetric,
    build_metric,
    distance,
    brute_force_distance,
    dijkstra_heap,
    export_pair_distances,
)

__all__ = [
    'HybridMetric',
    'build_metric',
    'distance',
    'brute_force_distance',
    'dijkstra_heap',
    'export_pair_distances',
]
