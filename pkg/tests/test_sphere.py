"""Sphere distances, curve lengths, midpoint defect and nets"""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.errors import ParameterError, ValidationError
from src.geometry import (
    SpherePoint,
    SpherePolyline,
    build_net,
    cap_area,
    chordal_distance,
    covering_radius,
    geodesic_distance,
    midpoint_defect,
    midpoint_defect_closed_form,
    polyline_length,
    random_sphere_points,
    sphere_volume,
    validation_points,
)
from src.geometry.sphere import paired_geodesic

E0 = SpherePoint.axis(2, 0)
E1 = SpherePoint.axis(2, 1)

vectors = st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 0.1
)
points = vectors.map(SpherePoint.from_vector)


def test_point_must_be_unit():
    with pytest.raises(ValidationError):
        SpherePoint(np.array([1.0, 1.0, 0.0]))
    with pytest.raises(ValidationError):
        SpherePoint(np.array([1.0, 0.0]))


def test_distance_examples():
    assert geodesic_distance(E0, E1) == pytest.approx(math.pi / 2)
    assert chordal_distance(E0, E1) == pytest.approx(math.sqrt(2.0))
    assert geodesic_distance(E0, -E0) == pytest.approx(math.pi)
    assert chordal_distance(E0, -E0) == pytest.approx(2.0)
    assert geodesic_distance(E0, E0) == 0.0


def test_chordal_law_of_cosines(rng):
    """d_E^2 = 2 - 2 cos d_S"""
    for x, y in zip(random_sphere_points(3, 50, rng), random_sphere_points(3, 50, rng)):
        d_s = geodesic_distance(x, y)
        assert chordal_distance(x, y) ** 2 == pytest.approx(2.0 - 2.0 * math.cos(d_s), abs=1e-12)


def test_chordal_matches_ambient_norm(rng):
    """2 sin(d_S / 2) against |x - y| in the ambient space"""
    xs = random_sphere_points(2, 100_000, rng)
    ys = random_sphere_points(2, 100_000, rng)
    formula = 2.0 * np.sin(0.5 * paired_geodesic(xs, ys))
    np.testing.assert_allclose(formula, np.linalg.norm(xs - ys, axis=1), rtol=0, atol=1e-12)
    for x, y in zip(xs[:2000], ys[:2000]):
        assert abs(chordal_distance(x, y) - np.linalg.norm(x - y)) <= 1e-12


@given(points, points, points)
def test_chordal_metric_axioms(x, y, z):
    """Symmetry and triangle inequality of the restricted Euclidean distance"""
    assert chordal_distance(x, y) == pytest.approx(chordal_distance(y, x), abs=1e-12)
    assert chordal_distance(x, z) <= chordal_distance(x, y) + chordal_distance(y, z) + 1e-12


@given(points, points)
def test_chordal_geodesic_bilipschitz(x, y):
    """d_E <= d_S <= (pi/2) d_E"""
    d_e, d_s = chordal_distance(x, y), geodesic_distance(x, y)
    assert d_e <= d_s + 1e-12
    assert d_s <= 0.5 * math.pi * d_e + 1e-12


def test_polyline_refinement():
    """Geodesic length stays fixed while chordal length grows toward it"""
    theta = 2.5
    previous = 0.0
    for pieces in (1, 2, 4, 8, 64):
        angles = np.linspace(0.0, theta, pieces + 1)
        curve = SpherePolyline(tuple(np.column_stack([np.cos(angles), np.sin(angles), np.zeros_like(angles)])))
        assert polyline_length(curve) == pytest.approx(theta)
        chordal = polyline_length(curve, 'chordal')
        assert chordal == pytest.approx(pieces * 2.0 * math.sin(theta / (2 * pieces)))
        assert chordal > previous
        previous = chordal
    assert previous == pytest.approx(theta, rel=1e-3)


def test_polyline_single_vertex_and_bad_metric():
    curve = SpherePolyline((E0,))
    assert polyline_length(curve) == 0.0
    with pytest.raises(ValidationError):
        polyline_length(curve, 'manhattan')


def test_midpoint_defect_antipodal():
    """An equatorial point is the best compromise: defect sqrt(2) - 1"""
    assert midpoint_defect(E0, -E0) == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-4)


def test_midpoint_defect_right_angle():
    assert midpoint_defect(E0, E1) == pytest.approx(midpoint_defect_closed_form(math.pi / 2), abs=1e-3)
    assert midpoint_defect_closed_form(math.pi / 2) == pytest.approx(0.05826, abs=1e-5)


def test_midpoint_defect_positive_away_from_diagonal(rng):
    xs = random_sphere_points(2, 1200, rng)
    ys = random_sphere_points(2, 1200, rng)
    tested = 0
    for x, y in zip(xs, ys):
        if geodesic_distance(x, y) < 0.1:
            continue
        assert midpoint_defect(x, y, resolution=12) > 0.0
        tested += 1
        if tested == 1000:
            break
    assert tested == 1000
    assert midpoint_defect(E0, E0) == 0.0


def test_measures():
    assert sphere_volume(2) == pytest.approx(4.0 * math.pi)
    assert sphere_volume(3) == pytest.approx(2.0 * math.pi ** 2)
    assert cap_area(2, math.pi) == pytest.approx(4.0 * math.pi)
    r = 0.7
    assert cap_area(3, r) == pytest.approx(4.0 * math.pi * (r / 2.0 - math.sin(2.0 * r) / 4.0))


def test_net_single_point_for_large_eps():
    assert build_net(2, 1.6, 0).count == 1


def test_net_packing_and_covering(net_05):
    assert net_05.min_separation() > 1.0
    assert covering_radius(net_05, validation_points(2)) <= 1.0


def test_net_covers_an_independent_sample(net_05):
    sample = random_sphere_points(2, 200_000, np.random.default_rng(2024))
    assert covering_radius(net_05, sample) <= 2.0 * net_05.eps


def test_net_size_between_volume_bounds():
    eps = 0.4
    net = build_net(2, eps, 3)
    assert sphere_volume(2) / cap_area(2, 2.0 * eps) <= net.count <= sphere_volume(2) / cap_area(2, eps)


def test_net_is_seed_deterministic():
    a, b = build_net(2, 0.7, 11), build_net(2, 0.7, 11)
    np.testing.assert_array_equal(a.centers, b.centers)


@pytest.mark.parametrize("m, eps", [(1, 0.5), (2, 0.0), (2, 4.0)])
def test_net_rejects_bad_parameters(m, eps):
    with pytest.raises(ParameterError):
        build_net(m, eps, 0)
