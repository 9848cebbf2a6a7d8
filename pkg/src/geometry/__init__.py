"""Sphere geometry and thread systems"""
from .sphere import (
    SpherePoint,
    SpherePolyline,
    Net,
    geodesic_distance,
    chordal_distance,
    polyline_length,
    midpoint_defect,
    midpoint_defect_closed_form,
    build_net,
    random_sphere_points,
    covering_radius,
    validation_points,
    sphere_volume,
    cap_area,
)
from .threads import (
    EndpointSet,
    Thread,
    ThreadSystem,
    place_endpoints,
    build_threads,
    tunnel_radius,
    check_thread_system,
)

__all__ = [
    'SpherePoint',
    'SpherePolyline',
    'Net',
    'geodesic_distance',
    'chordal_distance',
    'polyline_length',
    'midpoint_defect',
    'midpoint_defect_closed_form',
    'build_net',
    'random_sphere_points',
    'covering_radius',
    'validation_points',
    'sphere_volume',
    'cap_area',
    'EndpointSet',
    'Thread',
    'ThreadSystem',
    'place_endpoints',
    'build_threads',
    'tunnel_radius',
    'check_thread_system',
]
