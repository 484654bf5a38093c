"""Backward recursion over support functions, the dual counterpart of ``primal``.

``Z[mu]`` is the support function of ``-Z_mu`` (the negated superhedging
set), kept as a positively homogeneous ``PolyFn``.  Functions are convex
hulls of their successors, restricted to the dual solvency cone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .geometry import (
    InfeasibleError,
    Polyhedron,
    PolyFn,
    epigraph_section,
    intersect,
    linear_fn,
    lp_min,
    polyfn_hull,
    restrict_domain,
)
from .market import MarketModel, ModelError, Node, Payoff
from .parallel import parallel_map
from .primal import ArbitrageError


@dataclass(frozen=True)
class SupportFns:
    model: MarketModel
    payoff: Payoff
    Z: Mapping[Node, PolyFn]
    W: Mapping[Node, PolyFn]

    @property
    def Z0(self) -> PolyFn:
        return self.Z[self.model.lattice.root]

    def terminal_linear(self, mu: Node) -> PolyFn:
        """``x -> -x.xi(mu)`` on the whole space."""
        return linear_fn([-v for v in self.payoff[mu]])


def _terminal(args):
    x, kplus = args
    return restrict_domain(linear_fn([-v for v in x]), kplus)


def _step(args):
    fs, kplus = args
    w = polyfn_hull(fs)
    return w, restrict_domain(w, kplus)


def run_dual(model: MarketModel, xi: Payoff) -> SupportFns:
    xi.check(model)
    lat = model.lattice
    Z: dict[Node, PolyFn] = {}
    W: dict[Node, PolyFn] = {}
    term = lat.terminal
    for mu, f in zip(term, parallel_map(_terminal, [(xi[mu], model.dual_cone(mu)) for mu in term])):
        Z[mu] = f
    for t in range(lat.horizon - 1, -1, -1):
        level = lat.nodes[t]
        jobs = [([Z[nu] for nu in lat.succ(mu)], model.dual_cone(mu)) for mu in level]
        for mu, (w, z) in zip(level, parallel_map(_step, jobs)):
            W[mu] = w
            Z[mu] = z
    return SupportFns(model, xi, Z, W)


def dual_ask_price(s: SupportFns, i: int) -> Fraction:
    """``-min{Z_0(x) : x_i = 1}`` for a 1-based asset index ``i``."""
    d = s.model.d
    if not 1 <= i <= d:
        raise ModelError(f"asset index {i} outside 1..{d}")
    return slice_price(s.Z0, i - 1)


def slice_price(f: PolyFn, idx: int) -> Fraction:
    """``-min{f(x) : x_idx = 1}`` computed as an LP over the epigraph."""
    n = f.dim + 1
    row = tuple(Fraction(int(k == idx)) for k in range(n))
    plane = Polyhedron.from_h([row, tuple(-v for v in row)], [1, -1], n)
    sl = intersect(f.epi, plane)
    if sl.is_empty():
        raise InfeasibleError("the domain misses the hyperplane x_i = 1")
    res = lp_min(sl, _last(n))
    if not res.bounded:
        raise ArbitrageError("ask price unbounded below: the model admits arbitrage")
    return -res.value


def _last(n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(k == n - 1)) for k in range(n))


def lower_image_section(s: SupportFns, c: Sequence) -> Polyhedron:
    """``{(w_1..w_{q-1}, y) : y <= -Z_0(w), c.w = 1}``."""
    return epigraph_section(s.Z0, c)
