import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwhull.geom2d import (ConvexPolygon, DegenerateInputError, DirectionGrid, GeometryError,
                           Vec2, cauchy_perimeter, convex_hull, diameter,
                           diameter_via_projections, hausdorff, inradius_at_origin,
                           perimeter, point_polygon_distance, projection_range,
                           regular_polygon, scale_unit_diameter, support, unit_vector)

import oracles

UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]

# Dyadic coordinates (multiples of 2**-20 in [-10, 10]) keep every orientation
# cross product exact in doubles, which is the regime the plain predicate targets.
coord = st.integers(-10 << 20, 10 << 20).map(lambda k: k / (1 << 20))
point = st.tuples(coord, coord)
point_sets = st.lists(point, min_size=1, max_size=40)
lattice_sets = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=40)


def _vset(K):
    return set(map(tuple, K.vertices.tolist()))


# --- unit_vector ---

def test_unit_vector_axes():
    assert unit_vector(0.0) == Vec2(1.0, 0.0)
    u = unit_vector(math.pi / 2)
    assert abs(u.x) < 1e-15 and abs(u.y - 1) < 1e-15
    u = unit_vector(math.pi / 4)
    assert abs(u.x - math.sqrt(0.5)) < 1e-15 and abs(u.y - math.sqrt(0.5)) < 1e-15


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_unit_vector_rejects_non_finite(bad):
    with pytest.raises(GeometryError):
        unit_vector(bad)


@given(st.floats(-100, 100))
def test_unit_vector_norm(theta):
    assert abs(unit_vector(theta).norm() - 1.0) <= 4 * np.finfo(float).eps


# --- convex_hull ---

def test_hull_single_point():
    K = convex_hull([(0, 0)])
    assert K.count == 1 and K.kind == "point"


def test_hull_repeated_point():
    K = convex_hull([(2.5, -1)] * 5)
    assert K.count == 1 and K.vertices.tolist() == [[2.5, -1.0]]


def test_hull_collinear():
    K = convex_hull([(0, 0), (1, 0), (2, 0)])
    assert K.kind == "segment"
    assert _vset(K) == {(0.0, 0.0), (2.0, 0.0)}


def test_hull_interior_point_removed():
    K = convex_hull(UNIT_SQUARE + [(0.5, 0.5)])
    assert K.vertices.tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]


def test_hull_empty_rejected():
    with pytest.raises(GeometryError):
        convex_hull(np.zeros((0, 2)))


def test_hull_non_finite_rejected():
    with pytest.raises(GeometryError):
        convex_hull([(0, 0), (math.nan, 1)])


def test_hull_random_12_matches_oracle():
    rng = np.random.default_rng(12)
    for _ in range(50):
        pts = rng.random((12, 2))
        assert _vset(convex_hull(pts)) == oracles.extreme_points(pts)


def _assert_strict_ccw(K):
    v = K.vertices
    if K.count >= 3:
        ConvexPolygon.from_vertices(v)  # validates strict convexity and orientation
    elif K.count == 2:
        assert not np.array_equal(v[0], v[1])


@given(point_sets)
def test_hull_matches_oracle_continuous(pts):
    K = convex_hull(pts)
    assert _vset(K) == oracles.extreme_points(pts)
    _assert_strict_ccw(K)


@given(lattice_sets)
def test_hull_matches_oracle_lattice(pts):
    # integer inputs exercise many exact collinearities
    K = convex_hull(pts)
    assert _vset(K) == oracles.extreme_points(pts)
    _assert_strict_ccw(K)


@given(point_sets)
def test_hull_idempotent(pts):
    K = convex_hull(pts)
    assert convex_hull(K.vertices) == K


@given(point_sets, st.randoms(use_true_random=False))
def test_hull_order_invariant(pts, rnd):
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    assert convex_hull(shuffled) == convex_hull(pts)


def test_from_vertices_rejects_clockwise():
    with pytest.raises(GeometryError):
        ConvexPolygon.from_vertices(UNIT_SQUARE[::-1])
    with pytest.raises(GeometryError):
        ConvexPolygon.from_vertices([(0, 0), (1, 0), (2, 0), (1, 1)])
    with pytest.raises(GeometryError):
        ConvexPolygon.from_vertices([(1, 1), (1, 1)])


# --- perimeter / diameter ---

def test_perimeter_examples():
    assert perimeter(convex_hull(UNIT_SQUARE)) == 4.0
    assert perimeter(convex_hull([(0, 0), (3, 4)])) == 10.0
    assert perimeter(convex_hull([(0, 0), (1, 0), (0, 1)])) == pytest.approx(2 + math.sqrt(2), abs=1e-15)
    assert perimeter(convex_hull([(5, 5)])) == 0.0


def test_diameter_examples():
    d, (i, j) = diameter(convex_hull(UNIT_SQUARE))
    assert d == pytest.approx(math.sqrt(2), rel=1e-15)
    assert (i, j) == (0, 2)
    d, _ = diameter(regular_polygon(6, 1.0))
    assert d == pytest.approx(2.0, rel=1e-15)
    assert diameter(convex_hull([(1, 1)]))[0] == 0.0
    assert diameter(convex_hull([(0, 0), (3, 4)]))[0] == 5.0


def test_diameter_random_64_matches_all_pairs():
    rng = np.random.default_rng(64)
    for _ in range(100):
        pts = rng.normal(size=(64, 2))
        d, (i, j) = diameter(convex_hull(pts))
        ref = oracles.all_pairs_diameter(pts)
        assert abs(d - ref) <= 1e-12 * ref
        assert i < j


@given(point_sets)
def test_diameter_witness_realises_value(pts):
    K = convex_hull(pts)
    d, (i, j) = diameter(K)
    assert abs(d - oracles.all_pairs_diameter(pts)) <= 1e-12 * max(d, 1e-300)
    if K.count >= 2:
        assert math.dist(K.vertices[i], K.vertices[j]) == d


@given(point_sets)
def test_perimeter_matches_oracle(pts):
    K = convex_hull(pts)
    assert perimeter(K) == pytest.approx(oracles.polygon_perimeter(K.vertices), rel=1e-12, abs=1e-12)


@given(point_sets)
def test_ratio_bounds(pts):
    K = convex_hull(pts)
    d, _ = diameter(K)
    if d > 0:
        ratio = perimeter(K) / d
        assert 2 - 1e-12 <= ratio <= math.pi + 1e-9


# --- Cauchy and projections ---

def test_cauchy_examples():
    v, bound = cauchy_perimeter(UNIT_SQUARE, 100_000)
    assert abs(v - 4) <= 1e-3 and abs(v - 4) <= bound
    assert cauchy_perimeter([(0, 0)], 64) == (0.0, 0.0)
    v, _ = cauchy_perimeter([(0, 0), (3, 4)], 1 << 16)
    assert v >= 0 and abs(v - 10) < 1e-6


@given(point_sets, st.integers(4, 512))
def test_cauchy_within_bound(pts, m):
    v, bound = cauchy_perimeter(pts, m)
    assert abs(v - perimeter(convex_hull(pts))) <= bound + 1e-9


def test_projection_range_examples():
    assert projection_range([(0, 0), (3, 4)], math.atan2(0.8, 0.6)) == pytest.approx(5.0, rel=1e-15)
    assert projection_range([(2, -7)], 1.234) == 0.0
    assert projection_range(UNIT_SQUARE, 0.0) == 1.0


def test_diameter_via_projections_examples():
    v, _ = diameter_via_projections(UNIT_SQUARE, 1024)
    assert abs(v - math.sqrt(2)) < 1e-5
    v, _ = diameter_via_projections([(0, 0), (2.5, 0)], 16)
    assert v == 2.5
    assert diameter_via_projections([(1, 1)], 16)[0] == 0.0


@given(point_sets, st.integers(4, 512))
def test_diameter_via_projections_within_bound(pts, m):
    v, bound = diameter_via_projections(pts, m)
    d = oracles.all_pairs_diameter(pts)
    assert v <= d * (1 + 1e-12)
    assert d - v <= bound + 1e-12 * d


def test_grid_validation():
    with pytest.raises(GeometryError):
        DirectionGrid(3)
    with pytest.raises(GeometryError):
        DirectionGrid(8, "quarter")
    with pytest.raises(GeometryError):
        cauchy_perimeter(UNIT_SQUARE, DirectionGrid(8, "half"))
    with pytest.raises(GeometryError):
        hausdorff(convex_hull(UNIT_SQUARE), convex_hull(UNIT_SQUARE), 8)
    g = DirectionGrid(8, "half")
    assert np.all(np.diff(g.angles) > 0) and g.angles[-1] < math.pi


# --- support / Hausdorff ---

def test_support_examples():
    K = convex_hull(UNIT_SQUARE)
    assert support(K, (1, 0)) == 1.0
    assert support(K, (math.sqrt(0.5), math.sqrt(0.5))) == pytest.approx(math.sqrt(2), rel=1e-15)
    P = convex_hull([(3, -2)])
    u = unit_vector(0.7)
    assert support(P, u) == 3 * u.x - 2 * u.y
    with pytest.raises(GeometryError):
        support(K, (1, 1))


def test_hausdorff_examples():
    K = convex_hull(UNIT_SQUARE)
    assert hausdorff(K, K)[0] == 0.0
    r = 1.75
    v, b = hausdorff(convex_hull([(0, 0)]), regular_polygon(256, r))
    assert v <= r + 1e-12 and r <= v + b
    v, b = hausdorff(K, K.scaled(2.0))
    assert v <= math.sqrt(2) + 1e-12 and math.sqrt(2) <= v + b


@st.composite
def polygon_pairs(draw, with_origin=False):
    def one():
        pts = draw(st.lists(point, min_size=1, max_size=20))
        if with_origin:
            pts = pts + [(0.0, 0.0)]
        return convex_hull(pts)
    return one(), one()


@settings(max_examples=200)
@given(polygon_pairs())
def test_hausdorff_fattening_cross_check(pair):
    K1, K2 = pair
    v, b = hausdorff(K1, K2, 1024)
    far = max(max(point_polygon_distance(p, K2) for p in oracles.boundary_samples(K1.vertices)),
              max(point_polygon_distance(p, K1) for p in oracles.boundary_samples(K2.vertices)))
    # sampled boundary distances are lower bounds of the true distance
    assert far <= v + b + 1e-9


@settings(max_examples=200)
@given(polygon_pairs())
def test_diameter_and_perimeter_continuity(pair):
    K1, K2 = pair
    v, b = hausdorff(K1, K2)
    assert abs(diameter(K1)[0] - diameter(K2)[0]) <= 2 * (v + b) + 1e-9
    assert abs(perimeter(K1) - perimeter(K2)) <= 2 * math.pi * (v + b) + 1e-9


@settings(max_examples=200)
@given(polygon_pairs(with_origin=True))
def test_scale_continuity(pair):
    # the inequality is stated for convex sets that contain the origin
    K1, K2 = pair
    d1 = diameter(K1)[0]
    if d1 == 0 or diameter(K2)[0] == 0:
        return
    lhs, _ = hausdorff(scale_unit_diameter(K1), scale_unit_diameter(K2))
    v, b = hausdorff(K1, K2)
    assert lhs <= 3 * (v + b) / d1 + 1e-9


@given(point, st.floats(-10, 10), st.floats(-10, 10))
def test_projection_lipschitz(x, t1, t2):
    u1, u2 = unit_vector(t1), unit_vector(t2)
    lhs = abs(u1.dot(x) - u2.dot(x))
    assert lhs <= math.hypot(*x) * abs(t1 - t2) + 1e-12


# --- scaling / inradius ---

def test_scale_unit_diameter_examples():
    S = scale_unit_diameter(convex_hull(UNIT_SQUARE))
    np.testing.assert_allclose(S.vertices, np.array(UNIT_SQUARE) / math.sqrt(2), rtol=1e-15)
    S = scale_unit_diameter(convex_hull([(0, 0), (0, 5)]))
    assert S.vertices.tolist() == [[0, 0], [0, 1]]
    with pytest.raises(DegenerateInputError):
        scale_unit_diameter(convex_hull([(3, 3)]))


@given(point_sets)
def test_scale_unit_diameter_gives_one(pts):
    K = convex_hull(pts)
    if diameter(K)[0] > 0:
        assert abs(diameter(scale_unit_diameter(K))[0] - 1) <= 1e-12


def test_inradius_examples():
    assert inradius_at_origin(convex_hull([(-1, -1), (1, -1), (1, 1), (-1, 1)])) == 1.0
    assert inradius_at_origin(convex_hull(UNIT_SQUARE)) == 0.0
    T = convex_hull([(-1, -1), (3, -1), (-1, 3)])
    assert inradius_at_origin(T) == pytest.approx(1.0, rel=1e-15)
    assert inradius_at_origin(convex_hull([(-1, 0), (1, 0)])) == 0.0


@given(point_sets)
def test_inradius_matches_oracle(pts):
    K = convex_hull(pts)
    assert inradius_at_origin(K) == pytest.approx(oracles.inradius_by_lines(K.vertices),
                                                  rel=1e-12, abs=1e-12)


@given(point_sets, point)
def test_monotone_under_insertion(pts, extra):
    K = convex_hull(pts)
    K2 = convex_hull(pts + [extra])
    assert perimeter(K2) >= perimeter(K) * (1 - 1e-12)
    assert diameter(K2)[0] >= diameter(K)[0]
    assert inradius_at_origin(K2) >= inradius_at_origin(K) * (1 - 1e-12)


def test_point_polygon_distance():
    K = convex_hull(UNIT_SQUARE)
    assert point_polygon_distance((0.5, 0.5), K) == 0.0
    assert point_polygon_distance((2, 0.5), K) == 1.0
    assert point_polygon_distance((4, 5), K) == 5.0
    S = convex_hull([(0, 0), (2, 0)])
    assert point_polygon_distance((1, -3), S) == 3.0


@given(lattice_sets)
def test_fast_oracle_agrees_with_scalar_oracle(pts):
    assert oracles.extreme_points_fast(pts) == oracles.extreme_points(pts)
