"""Backward recursion for the sets of superhedging portfolios."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .geometry import Polyhedron, intersect_all, minkowski_sum_cone, translate
from .market import MarketModel, ModelError, Node, Payoff
from .parallel import parallel_map


class ArbitrageError(ArithmeticError):
    """A price is unbounded below, which only happens when the model admits arbitrage."""


@dataclass(frozen=True)
class HedgeSets:
    """``Z[mu]``: portfolios at node mu from which the payoff can be superhedged.

    ``W[mu]`` (non-terminal nodes only) is the intersection of the successor
    Z sets, i.e. the portfolios that may be carried out of node mu.
    """

    model: MarketModel
    payoff: Payoff
    Z: Mapping[Node, Polyhedron]
    W: Mapping[Node, Polyhedron]

    @property
    def Z0(self) -> Polyhedron:
        return self.Z[self.model.lattice.root]


def _terminal(args):
    x, k = args
    return translate(k, x)


def _step(args):
    succ_sets, k, shortcut = args
    w = succ_sets[0] if shortcut else intersect_all(succ_sets)
    return w, minkowski_sum_cone(w, k)


def run_primal(model: MarketModel, xi: Payoff) -> HedgeSets:
    xi.check(model)
    lat = model.lattice
    Z: dict[Node, Polyhedron] = {}
    W: dict[Node, Polyhedron] = {}
    term = lat.terminal
    for mu, z in zip(term, parallel_map(_terminal, [(xi[mu], model.cone(mu)) for mu in term])):
        Z[mu] = z
    for t in range(lat.horizon - 1, -1, -1):
        level = lat.nodes[t]
        jobs = []
        for mu in level:
            succ = [Z[nu] for nu in lat.succ(mu)]
            jobs.append((succ, model.cone(mu), _all_identical(succ)))
        for mu, (w, z) in zip(level, parallel_map(_step, jobs)):
            W[mu] = w
            Z[mu] = z
    return HedgeSets(model, xi, Z, W)


def _all_identical(sets: list[Polyhedron]) -> bool:
    # degenerate successors: identical H-representations make the intersection trivial
    first = sets[0]
    return all(s is first or (s.has_h and s.h == first.h) for s in sets[1:])


def ask_price(h: HedgeSets, i: int) -> Fraction:
    """``min{x : x e^i in Z_0}``; ``i`` is a 1-based asset index."""
    d = h.model.d
    if not 1 <= i <= d:
        raise ModelError(f"asset index {i} outside 1..{d}")
    return line_min(h.Z0, i - 1)


def line_min(z: Polyhedron, idx: int) -> Fraction:
    """Smallest x with x e^idx in z (0-based index)."""
    lo = None
    for row, rhs in zip(z.h.A, z.h.r):
        a = row[idx]
        if a > 0:
            v = rhs / a
            if lo is None or v > lo:
                lo = v
    hi = None
    for row, rhs in zip(z.h.A, z.h.r):
        a = row[idx]
        if a == 0 and rhs > 0:
            raise ArbitrageError("no multiple of the numeraire superhedges")
        if a < 0:
            v = rhs / a
            if hi is None or v < hi:
                hi = v
    if lo is None:
        raise ArbitrageError("ask price unbounded below: the model admits arbitrage")
    if hi is not None and hi < lo:
        raise ArbitrageError("no multiple of the numeraire superhedges")
    return lo


def bid_price(model: MarketModel, xi: Payoff, i: int) -> Fraction:
    return -ask_price(run_primal(model, -xi), i)
