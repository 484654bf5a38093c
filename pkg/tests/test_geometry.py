import random
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import linprog

from polyhedge.geometry import (
    INF,
    DimensionError,
    EmptySetError,
    InfeasibleError,
    MalformedEpigraphError,
    PolyFn,
    Polyhedron,
    contains,
    convex_hull_union,
    dd_convert,
    intersect,
    is_line_free,
    linear_fn,
    lp_min,
    minkowski_sum_cone,
    polyfn_eval,
    project,
    restrict_domain,
    supfun_of_negated_set,
)
from randmodels import grid_points

SQUARE = Polyhedron.from_h([(1, 0), (-1, 0), (0, 1), (0, -1)], [0, -1, 0, -1], 2)
QUADRANT = Polyhedron.cone([(1, 0), (0, 1)], 2)
# the upper image of the two-objective example
UPPER = Polyhedron.from_h([(F(-1, 3), 1), (-1, 1), (F(1, 3), 1)], [4, 0, 4], 2)


def test_unit_square_vertices():
    p = dd_convert(SQUARE)
    assert set(p.vertices) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert p.rays == ()


def test_upper_image_generators():
    p = dd_convert(UPPER)
    assert set(p.vertices) == {(0, 4), (6, 6)}
    assert set(p.rays) == {(1, 1), (-3, 1)}


def test_upper_image_rays_span_recession_cone():
    # each ray solves the homogeneous system and is tight on a row; the two are independent
    rows = UPPER.h.A
    for r in [(1, 1), (-3, 1)]:
        prods = [sum(a * b for a, b in zip(row, r)) for row in rows]
        assert min(prods) == 0
    assert 1 * 1 - 1 * (-3) != 0


def test_infeasible_system_is_empty():
    p = Polyhedron.from_h([(1,), (-1,)], [1, 0], 1)
    assert p.is_empty()
    assert p.vertices == () and p.rays == ()


def test_convert_is_idempotent():
    p = dd_convert(UPPER)
    again = dd_convert(p)
    assert again.vertices == p.vertices and again.rays == p.rays


def test_intersect_boxes():
    box = Polyhedron.from_v([(F(1, 2), F(1, 2)), (2, F(1, 2)), (F(1, 2), 2), (2, 2)])
    got = intersect(SQUARE, box)
    assert set(got.vertices) == {(F(1, 2), F(1, 2)), (1, F(1, 2)), (F(1, 2), 1), (1, 1)}


def test_intersect_with_empty():
    assert intersect(SQUARE, Polyhedron.empty(2)).is_empty()


def test_intersect_dimension_mismatch():
    with pytest.raises(DimensionError):
        intersect(SQUARE, Polyhedron.universe(3))


def test_point_plus_cone_is_translated_cone():
    got = minkowski_sum_cone(Polyhedron.point((2, -1)), QUADRANT)
    assert got.vertices == ((2, -1),)
    assert set(got.rays) == {(1, 0), (0, 1)}


def test_origin_plus_orthant():
    assert minkowski_sum_cone(Polyhedron.point((0, 0)), QUADRANT) == QUADRANT


def test_segment_plus_cone_gives_upper_image():
    seg = Polyhedron.from_v([(0, 4), (6, 6)])
    got = minkowski_sum_cone(seg, Polyhedron.cone([(-3, 1), (1, 1)], 2))
    assert got == UPPER


def test_narrower_cone_gives_smaller_set():
    seg = Polyhedron.from_v([(0, 4), (6, 6)])
    narrow = minkowski_sum_cone(seg, Polyhedron.cone([(-3, 1), (1, 2)], 2))
    assert narrow.issubset(UPPER) and not UPPER.issubset(narrow)


def test_hull_of_two_points_is_segment():
    got = convex_hull_union([Polyhedron.point((0, 0)), Polyhedron.point((1, 1))])
    assert set(got.vertices) == {(0, 0), (1, 1)} and got.rays == ()


def test_hull_of_axis_cones():
    got = convex_hull_union([Polyhedron.cone([(1, 0)], 2), Polyhedron.cone([(0, 1)], 2)])
    assert got == QUADRANT


def test_hull_of_nothing():
    with pytest.raises(ValueError):
        convex_hull_union([])


def test_project_square():
    got = project(SQUARE, [0])
    assert set(got.vertices) == {(0,), (1,)}


def test_project_empty():
    assert project(Polyhedron.empty(3), [0, 2]).is_empty()


def test_project_bad_index():
    with pytest.raises(DimensionError):
        project(SQUARE, [0, 0])


@pytest.mark.parametrize("method", ["vertices", "simplex"])
def test_lp_min_bounded(method):
    res = lp_min(Polyhedron.from_h(UPPER.h.A, UPPER.h.r, 2), (0, 1), method=method)
    assert res.value == 4 and res.point == (0, 4)


@pytest.mark.parametrize("method", ["vertices", "simplex"])
def test_lp_min_unbounded_returns_descent_ray(method):
    p = Polyhedron.from_h(UPPER.h.A, UPPER.h.r, 2)
    res = lp_min(p, (1, 0), method=method)
    assert res.value == -INF
    assert UPPER.contains_direction(res.ray) and res.ray[0] < 0


def test_lp_min_empty():
    with pytest.raises(InfeasibleError):
        lp_min(Polyhedron.empty(2), (1, 0))


def test_contains():
    assert contains(QUADRANT, (0, 0))
    assert not contains(QUADRANT, (-1, -1))
    assert contains(UPPER, (0, 4)) and not contains(UPPER, (0, 3))


def test_support_of_negated_orthant():
    f = supfun_of_negated_set(QUADRANT)
    assert f((1, 2)) == 0 and f((0, 0)) == 0
    assert f((-1, 2)) == INF


def test_support_of_upper_image():
    f = supfun_of_negated_set(UPPER)
    for w in grid_points(2, -2, 2):
        expected = max(-4 * w[1], -6 * w[0] - 6 * w[1]) if w[1] >= -w[0] and w[1] >= 3 * w[0] else INF
        assert f(w) == expected, w


def test_support_of_origin_is_zero():
    f = supfun_of_negated_set(Polyhedron.point((0, 0, 0)))
    assert f((3, -1, 2)) == 0


def test_support_of_empty_set():
    with pytest.raises(EmptySetError):
        supfun_of_negated_set(Polyhedron.empty(2))


def test_polyfn_eval_points():
    f = supfun_of_negated_set(UPPER)
    assert polyfn_eval(f, (0, 1)) == -4
    assert polyfn_eval(f, (0, 0)) == 0
    assert polyfn_eval(f, (1, 0)) == INF


def test_polyfn_eval_rejects_downward_epigraph():
    bad = PolyFn(Polyhedron.from_h([(0, -1)], [0], 2), 1)
    with pytest.raises(MalformedEpigraphError):
        polyfn_eval(bad, (0,))


def test_restrict_zero_to_orthant():
    f = restrict_domain(linear_fn((0, 0)), QUADRANT)
    assert f((1, 3)) == 0 and f((-1, 3)) == INF


def test_restrict_to_whole_space_changes_nothing():
    f = linear_fn((2, -1))
    assert restrict_domain(f, Polyhedron.universe(2)).same_function(f)


def test_line_free():
    assert is_line_free(Polyhedron.cone([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3))
    assert not is_line_free(Polyhedron.cone([(1, 0), (0, 1), (1, -1), (-1, 1)], 2))


def test_frictionless_cone_contains_line():
    k = Polyhedron.cone([(1, 0), (0, 1), (1, -1), (-1, 1)], 2)
    # both directions of the exchange line are conic combinations of the generators
    assert contains(k, (1, -1)) and contains(k, (-1, 1))


# ---------------------------------------------------------------------------
# randomized properties


def _random_h(rng, d, m):
    A = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(m)]
    r = [rng.randint(-4, 1) for _ in range(m)]
    return A, r


def _satisfies(A, r, x):
    return all(sum(a * b for a, b in zip(row, x)) >= rhs for row, rhs in zip(A, r))


@pytest.mark.parametrize("seed", range(60))
def test_round_trip_h_v_h(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 4)
    A, r = _random_h(rng, d, rng.randint(0, 12))
    p = Polyhedron.from_h(A, r, d)
    q = Polyhedron.from_v(p.vertices, p.rays, d)
    back = Polyhedron.from_h(q.h.A, q.h.r, d)
    for v in p.vertices:
        assert _satisfies(A, r, v)
    for ray in p.rays:
        assert _satisfies(A, [0] * len(A), ray)
    # the regenerated inequalities cut out the same lattice points as the originals
    for x in grid_points(d, -2, 2, F(1) if d > 2 else F(1, 2)):
        assert _satisfies(A, r, x) == back.contains_point(x)


@pytest.mark.parametrize("seed", range(50))
def test_lp_min_matches_vertices_and_float_solver(seed):
    rng = random.Random(100 + seed)
    d = rng.randint(2, 4)
    A, r = _random_h(rng, d, rng.randint(d + 1, 10))
    A += [[int(i == j) for j in range(d)] for i in range(d)] + [[-int(i == j) for j in range(d)] for i in range(d)]
    r += [-5] * d + [-5] * d
    obj = [rng.randint(-3, 3) for _ in range(d)]
    p = Polyhedron.from_h(A, r, d)
    if p.is_empty():
        with pytest.raises(InfeasibleError):
            lp_min(Polyhedron.from_h(A, r, d), obj, method="simplex")
        return
    exact = lp_min(Polyhedron.from_h(A, r, d), obj, method="simplex")
    assert exact.value == lp_min(p, obj, method="vertices").value
    ref = linprog(obj, A_ub=-np.array(A, float), b_ub=-np.array(r, float), bounds=[(None, None)] * d)
    assert ref.status == 0 and abs(ref.fun - float(exact.value)) < 1e-7


@pytest.mark.parametrize("seed", range(50))
def test_contains_agrees_with_generator_decomposition(seed):
    rng = random.Random(200 + seed)
    d = rng.randint(2, 3)
    verts = [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(rng.randint(1, 5))]
    rays = [tuple(rng.randint(-1, 2) for _ in range(d)) for _ in range(rng.randint(0, 2))]
    p = Polyhedron.from_v(verts, rays, d)
    V, R = np.array(verts, float).T, np.array(rays, float).reshape(-1, d).T
    for _ in range(10):
        x = tuple(F(rng.randint(-8, 8), 2) for _ in range(d))
        # x = V lam + R mu with lam in the simplex and mu >= 0
        A_eq = np.vstack([np.hstack([V, R]), np.hstack([np.ones(len(verts)), np.zeros(len(rays))])])
        b_eq = np.array([float(v) for v in x] + [1.0])
        ref = linprog(np.zeros(A_eq.shape[1]), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * A_eq.shape[1])
        assert contains(p, x) == (ref.status == 0), x


@pytest.mark.parametrize("seed", range(50))
def test_intersect_and_sum_are_monotone(seed):
    rng = random.Random(300 + seed)
    d = rng.randint(2, 3)
    A, r = _random_h(rng, d, rng.randint(1, 6))
    big = Polyhedron.from_h(A, r, d)
    small = Polyhedron.from_h(A + [[rng.randint(-2, 2) for _ in range(d)]], r + [rng.randint(-3, 0)], d)
    other = Polyhedron.from_h(*_random_h(rng, d, 3), d)
    assert intersect(small, other).issubset(intersect(big, other))
    cone = Polyhedron.cone([tuple(int(i == j) for j in range(d)) for i in range(d)], d)
    if not small.is_empty():
        assert minkowski_sum_cone(small, cone).issubset(minkowski_sum_cone(big, cone))


@pytest.mark.parametrize("seed", range(50))
def test_sum_with_cone_absorbs_cone(seed):
    rng = random.Random(400 + seed)
    d = rng.randint(2, 3)
    p = Polyhedron.from_v([tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(3)])
    cone = Polyhedron.cone([tuple(rng.randint(-1, 2) for _ in range(d)) for _ in range(d)], d)
    once = minkowski_sum_cone(p, cone)
    assert minkowski_sum_cone(once, cone) == once


@pytest.mark.parametrize("seed", range(50))
def test_support_function_is_positively_homogeneous(seed):
    rng = random.Random(500 + seed)
    d = rng.randint(2, 3)
    p = Polyhedron.from_v(
        [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(3)],
        [tuple(int(i == j) for j in range(d)) for i in range(d)],
        d,
    )
    f = supfun_of_negated_set(p)
    assert f.is_positively_homogeneous()
    for _ in range(5):
        x = tuple(F(rng.randint(0, 6)) for _ in range(d))
        lam = F(rng.randint(1, 9), rng.randint(1, 9))
        assert f(tuple(lam * v for v in x)) == lam * f(x)
