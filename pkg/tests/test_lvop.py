import random
from fractions import Fraction as F

import pytest

from golden import DSTAR0_VERTICES, match_sets
from polyhedge.dual import lower_image_section
from polyhedge.geometry import INF, Polyhedron, contains, polyfn_eval, supfun_of_negated_set
from polyhedge.lvop import (
    LineInConeError,
    LvopError,
    LvopProblem,
    coupling_phi,
    default_weight,
    dual_data,
    interior_check,
    lower_image,
    lower_image_via_support,
    shp_step_problem,
    support_from_lower_image,
    upper_image,
)
from polyhedge.primal import run_primal
from randmodels import frictionless, one_step, random_lvop, random_market, random_payoff

SMALL_UPPER = Polyhedron.from_h([(F(-1, 3), 1), (-1, 1), (F(1, 3), 1)], [4, 0, 4], 2)
SMALL_LOWER = Polyhedron.from_h([(1, 0), (-1, 0), (0, -1), (6, -1)], [-1, F(-1, 3), -4, -6], 2)


def test_small_lvop_upper_image(small_lvop):
    up = upper_image(small_lvop)
    assert up == SMALL_UPPER
    assert set(up.vertices) == {(0, 4), (6, 6)}


def test_small_lvop_lower_image(small_lvop):
    assert lower_image(small_lvop) == SMALL_LOWER


def test_small_lvop_lower_image_via_support(small_lvop):
    assert lower_image_via_support(small_lvop) == SMALL_LOWER


def test_small_lvop_support_formula(small_lvop):
    z = supfun_of_negated_set(upper_image(small_lvop))
    for w1 in range(-4, 5):
        w = (F(w1, 2), F(1))
        if w[1] >= -w[0] and w[1] >= 3 * w[0]:
            assert z(w) == max(-4 * w[1], -6 * w[0] - 6 * w[1])
        else:
            assert z(w) == INF


def test_identity_on_origin_gives_orthant():
    orth = Polyhedron.cone([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3)
    eye = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    box = [r for i in range(3) for r in ([int(k == i) for k in range(3)], [-int(k == i) for k in range(3)])]
    p = LvopProblem(eye, box, [0] * 6, orth, (1, 1, 1))
    assert upper_image(p) == orth


@pytest.mark.parametrize("seed", range(10))
def test_upper_image_maps_generators(seed):
    rng = random.Random(seed)
    p = random_lvop(rng, q=2)
    S = p.feasible_set()

    def apply(x):
        return tuple(sum(a * b for a, b in zip(row, x)) for row in p.P)

    expected = Polyhedron.from_v([apply(v) for v in S.vertices], [apply(r) for r in S.rays] + list(p.C.rays), 2)
    assert upper_image(p) == expected


def test_infeasible_dual_gives_empty_lower_image():
    # no constraints at all: the image is everything and no weight supports it
    p = LvopProblem([[1, 0], [0, 1]], [], [], Polyhedron.cone([(1, 0), (0, 1)], 2), (1, 1))
    assert dual_data(p).T.is_empty()
    assert lower_image(p).is_empty()


def test_dual_points_satisfy_weight_equation(small_lvop):
    dd = dual_data(small_lvop)
    for v in dd.T.vertices:
        u, w = v[: small_lvop.m], v[small_lvop.m:]
        assert all(x >= 0 for x in u)
        assert sum(a * b for a, b in zip(small_lvop.c, w)) == 1


def test_line_in_cone_is_rejected_by_support_route():
    halfplane = Polyhedron.from_h([(1, 1)], [0], 2)
    p = LvopProblem([[1, 0], [0, 1]], [[1, 0], [0, 1]], [0, 0], halfplane, (1, 1))
    with pytest.raises(LineInConeError):
        lower_image_via_support(p)
    # the direct route still works
    assert not lower_image(p).is_empty()


def test_problem_validation():
    orth = Polyhedron.cone([(1, 0), (0, 1)], 2)
    with pytest.raises(LvopError):
        LvopProblem([[1, 0], [0, 1]], [[1, 0]], [0], orth, (1, 2))
    with pytest.raises(LvopError):
        LvopProblem([[1, 0], [0, 1]], [[1, 0]], [0], orth, (-1, 1))
    with pytest.raises(LvopError):
        LvopProblem([[1, 0], [0, 1]], [[1, 0]], [0, 1], orth, (1, 1))


def test_interior_check():
    orth = Polyhedron.cone([(1, 0), (0, 1)], 2)
    assert interior_check((1, 1), orth)
    assert not interior_check((0, 1), orth)
    assert not interior_check((1, 1), Polyhedron.cone([(1, 1)], 2))


def test_phi_at_origin():
    assert coupling_phi((0, 0), (0, 0), (0, 1)) == 0
    assert coupling_phi((0, 0, 0), (0, 0, 0), (0, 0, 1)) == 0


def test_phi_tight_pair(small_lvop):
    assert coupling_phi((0, 4), (F(-1, 3), 4), small_lvop.c) == 0


@pytest.mark.parametrize("seed", range(10))
def test_phi_nonnegative_on_small_lvop(small_lvop, seed):
    rng = random.Random(seed)
    up, low = upper_image(small_lvop), lower_image(small_lvop)

    def sample(p, n):
        lam = [F(rng.randint(0, 5)) for _ in p.vertices]
        lam = [x / sum(lam) if sum(lam) else F(1, len(lam)) for x in lam]
        pt = [sum(l * v[i] for l, v in zip(lam, p.vertices)) for i in range(n)]
        for r in p.rays:
            mu = F(rng.randint(0, 4))
            pt = [a + mu * b for a, b in zip(pt, r)]
        return tuple(pt)

    for _ in range(10):
        y, w = sample(up, 2), sample(low, 2)
        assert contains(up, y) and contains(low, w)
        assert coupling_phi(y, w, small_lvop.c) >= 0


def test_support_recovered_from_lower_image(small_lvop):
    low = lower_image(small_lvop)
    assert support_from_lower_image(low, small_lvop.c, (0, 1)) == -4
    assert support_from_lower_image(low, small_lvop.c, (0, 0)) == 0
    assert support_from_lower_image(low, small_lvop.c, (1, 0)) == INF


def test_default_weight_for_lattice_root(km):
    c = default_weight(km.cone((0, 1, 1)))
    assert c[-1] == 1 and interior_check(c, km.cone((0, 1, 1)))
    assert abs(float(c[0]) - 47.29) < 0.01 and abs(float(c[1]) - 52.50) < 0.01


def test_shp_step_at_lattice_root(km, primal_mid, dual_mid):
    root = km.lattice.root
    p = shp_step_problem(km, root, primal_mid.W[root], c=(0, 0, 1))
    assert upper_image(p) == primal_mid.Z0
    low = lower_image(p)
    assert match_sets(low.vertices, DSTAR0_VERTICES, 1e-3)
    assert low == lower_image_section(dual_mid, (0, 0, 1))


def test_shp_step_rejects_frictionless_node():
    model = one_step({(0,): frictionless(2), (1, 0): frictionless(2)})
    with pytest.raises(LineInConeError, match="liquidation"):
        shp_step_problem(model, (0,), Polyhedron.point((0, 0)))


@pytest.mark.parametrize("seed", range(60))
def test_lower_image_routes_agree(seed):
    rng = random.Random(1000 + seed)
    p = random_lvop(rng, bounded=seed % 4 != 0)
    assert p.q <= 3 and p.d <= 4 and p.m <= 8
    low = lower_image(p)
    assert low == lower_image_via_support(p)


@pytest.mark.parametrize("seed", range(50))
def test_support_round_trip(seed):
    rng = random.Random(2000 + seed)
    p = random_lvop(rng, bounded=seed % 4 != 0)
    low = lower_image(p)
    z = supfun_of_negated_set(upper_image(p))
    for _ in range(8):
        w = tuple(F(rng.randint(-4, 6), rng.randint(1, 3)) for _ in range(p.q))
        if sum(a * b for a, b in zip(p.c, w)) <= 0:
            continue
        assert support_from_lower_image(low, p.c, w) == polyfn_eval(z, w), w


@pytest.mark.parametrize("seed", range(50))
def test_weak_duality_on_vertices(seed):
    rng = random.Random(3000 + seed)
    p = random_lvop(rng, bounded=True)
    up, low = upper_image(p), lower_image(p)
    for y in up.vertices:
        for w in low.vertices:
            assert coupling_phi(y, w, p.c) >= 0


@pytest.mark.parametrize("seed", range(50))
def test_shp_steps_reproduce_primal_sets(seed):
    rng = random.Random(seed)
    model = random_market(rng, rng.randint(2, 3), rng.randint(1, 2))
    h = run_primal(model, random_payoff(rng, model))
    for mu, w_set in h.W.items():
        p = shp_step_problem(model, mu, w_set)
        assert upper_image(p) == h.Z[mu]
