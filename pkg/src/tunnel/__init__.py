"""Rotationally symmetric tunnel profiles"""
from .profile import (
    TunnelProfile,
    generate_profile,
    max_neck_radius,
    minimal_length,
    scalar_curvature,
    profile_volume,
    fitted_volume_constant,
    diameter_and_tube_check,
    profile_rows,
    surface_mesh,
)

__all__ = [
    'TunnelProfile',
    'generate_profile',
    'max_neck_radius',
    'minimal_length',
    'scalar_curvature',
    'profile_volume',
    'fitted_volume_constant',
    'diameter_and_tube_check',
    'profile_rows',
    'surface_mesh',
]
