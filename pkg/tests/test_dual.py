import random
from fractions import Fraction as F

import pytest

from golden import ASK, DSTAR0_VERTICES, match_sets
from polyhedge.dual import dual_ask_price, lower_image_section, run_dual, slice_price
from polyhedge.geometry import (
    INF,
    InfeasibleError,
    Polyhedron,
    contains,
    epigraph_section,
    linear_fn,
    restrict_domain,
    supfun_of_negated_set,
)
from polyhedge.market import Payoff
from polyhedge.primal import ask_price, run_primal
from randmodels import random_market, random_payoff, rising_stock_market

BOND = (0, 0, 1)


@pytest.mark.parametrize("i", [1, 2, 3])
def test_lattice_dual_price_matches_primal(dual_ask, primal_ask, i):
    p = dual_ask_price(dual_ask, i)
    assert p == ask_price(primal_ask, i)
    assert abs(float(p) - ASK[i]) <= 5e-4


def test_mid_rule_section_has_listed_vertices(dual_mid):
    sec = lower_image_section(dual_mid, BOND)
    assert match_sets(sec.vertices, DSTAR0_VERTICES, 1e-3)
    assert sec.rays == ((0, 0, -1),)
    top = max(v[2] for v in sec.vertices)
    assert abs(float(top) - 7.418) <= 5e-4


def test_section_maximum_is_bond_price(dual_ask, primal_ask):
    sec = lower_image_section(dual_ask, BOND)
    assert max(v[2] for v in sec.vertices) == ask_price(primal_ask, 3)
    assert len(sec.vertices) == 10


def test_zero_payoff_terminal_function(km):
    s = run_dual(km, Payoff.constant(km, (0, 0, 0)))
    mu = km.lattice.terminal[0]
    for ray in km.dual_cone(mu).rays:
        assert s.Z[mu](ray) == 0
    assert s.Z[mu]((1, -1, 0)) == INF
    assert dual_ask_price(s, 3) == 0


def test_terminal_function_is_linear_on_dual_cone(km, dual_ask, xi_ask):
    mu = next(m for m in km.lattice.terminal if xi_ask[m] == (1, -1, 0))
    f = dual_ask.Z[mu]
    kp = km.dual_cone(mu)
    for ray in kp.rays:
        assert f(ray) == -ray[0] + ray[1]
    inside = tuple(sum(r[i] for r in kp.rays) for i in range(3))
    assert f(inside) == -inside[0] + inside[1]
    assert f((1, 0, 0)) == INF


def test_terminal_function_matches_restriction(km, dual_ask, xi_ask):
    mu = km.lattice.terminal[5]
    expected = restrict_domain(linear_fn(tuple(-v for v in xi_ask[mu])), km.dual_cone(mu))
    assert dual_ask.Z[mu].same_function(expected)


def test_slice_missing_the_hyperplane():
    f = restrict_domain(linear_fn((0, 0)), Polyhedron.cone([(0, 1)], 2))
    with pytest.raises(InfeasibleError):
        slice_price(f, 0)


def test_arbitrage_leaves_no_price_slice():
    # without consistent prices the domain of Z0 shrinks to the origin
    model = rising_stock_market()
    s = run_dual(model, Payoff.constant(model, (0, 0)))
    assert s.Z0.epi.is_cone() and all(not any(r[:-1]) for r in s.Z0.epi.rays)
    with pytest.raises(InfeasibleError):
        dual_ask_price(s, 1)


def test_section_of_zero_function():
    sec = epigraph_section(supfun_of_negated_set(Polyhedron.point((0, 0))), (0, 1))
    assert sec == Polyhedron.from_h([(0, -1)], [0], 2)


def test_lattice_functions_are_homogeneous_and_restricted(km, dual_mid):
    for mu in km.lattice.all_nodes():
        f = dual_mid.Z[mu]
        assert f.is_positively_homogeneous()
        for ray in f.epi.rays:
            if any(ray[:-1]):
                assert contains(km.dual_cone(mu), ray[:-1])


@pytest.mark.parametrize("seed", range(50))
def test_primal_and_dual_functions_coincide(seed):
    rng = random.Random(seed)
    model = random_market(rng, rng.randint(2, 3), rng.randint(1, 3))
    xi = random_payoff(rng, model)
    h, s = run_primal(model, xi), run_dual(model, xi)
    for mu in model.lattice.all_nodes():
        assert supfun_of_negated_set(h.Z[mu]).same_function(s.Z[mu]), mu
        if mu in h.W:
            assert supfun_of_negated_set(h.W[mu]).same_function(s.W[mu]), mu
    for i in range(1, model.d + 1):
        assert dual_ask_price(s, i) == ask_price(h, i)


@pytest.mark.parametrize("seed", range(50))
def test_random_functions_are_homogeneous_on_dual_cones(seed):
    rng = random.Random(seed)
    model = random_market(rng, rng.randint(2, 3), rng.randint(1, 3))
    s = run_dual(model, random_payoff(rng, model))
    for mu in model.lattice.all_nodes():
        f = s.Z[mu]
        kp = model.dual_cone(mu)
        for ray in kp.rays:
            lam = F(rng.randint(1, 7), rng.randint(1, 7))
            assert f(tuple(lam * v for v in ray)) == lam * f(ray)
        for ray in f.epi.rays:
            if any(ray[:-1]):
                assert contains(kp, ray[:-1])
