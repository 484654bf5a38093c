"""Superhedging strategies along a given path of the lattice."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geometry import (
    Polyhedron,
    Vector,
    contains,
    intersect,
    lex_min,
    negate,
    translate,
    vec,
)
from .market import MarketModel, ModelError, Node, Payoff
from .primal import HedgeSets

SELECTION_RULES = ("min-trade", "lexicographic-vertex")


class NotSuperhedgingError(ValueError):
    """The portfolio does not superhedge the payoff from this node."""


class StrategyCheckError(AssertionError):
    pass


@dataclass(frozen=True)
class PathSpec:
    nodes: tuple[Node, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(tuple(mu) for mu in self.nodes))

    def check(self, model: MarketModel) -> None:
        lat = model.lattice
        if len(self.nodes) != lat.horizon + 1:
            raise ModelError(f"a path needs {lat.horizon + 1} nodes, got {len(self.nodes)}")
        if self.nodes[0] != lat.root:
            raise ModelError("a path must start at the root")
        for a, b in zip(self.nodes, self.nodes[1:]):
            if b not in lat.succ(a):
                raise ModelError(f"{b} is not a successor of {a}")

    @classmethod
    def from_indices(cls, pairs: Sequence[Sequence[int]]) -> "PathSpec":
        """Lattice path from per-time index tuples, e.g. ``[(1, 1), (2, 1), ...]``."""
        return cls(tuple((t,) + tuple(p) for t, p in enumerate(pairs)))


@dataclass(frozen=True)
class Strategy:
    path: PathSpec
    portfolios: tuple[Vector, ...]
    rebalance_sets: tuple[Polyhedron, ...]
    surplus: Vector


def rebalance_set(y: Sequence, node: Node, h: HedgeSets) -> Polyhedron:
    """``(y - K) ∩ W`` at a non-terminal node: the portfolios reachable from ``y`` that still superhedge."""
    y = vec(y)
    if node not in h.W:
        raise ModelError(f"{node} is terminal: there is nothing to rebalance into")
    if not contains(h.Z[node], y):
        raise NotSuperhedgingError(f"{_fmt(y)} is not a superhedging endowment at node {node}")
    reach = translate(negate(h.model.cone(node)), y)
    return intersect(reach, h.W[node])


def select_rebalance(rset: Polyhedron, y: Sequence, rule: str = "min-trade") -> Vector:
    """Keep ``y`` when allowed; otherwise pick a point of ``rset``.

    ``min-trade`` takes the point nearest to ``y`` in the 1-norm, breaking ties
    by the lexicographically smallest point.  ``lexicographic-vertex`` takes
    the lexicographically smallest point of ``rset``.
    """
    y = vec(y)
    if rset.is_empty():
        raise ValueError("empty rebalance set")
    if contains(rset, y):
        return y
    d = rset.dim
    unit = [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
    if rule == "lexicographic-vertex":
        return lex_min(rset, unit)
    if rule != "min-trade":
        raise ValueError(f"unknown selection rule {rule!r}")
    # variables (z, s) with z in rset and s >= |z - y|
    zero = (Fraction(0),) * d
    A = [tuple(row) + zero for row in rset.h.A]
    r = list(rset.h.r)
    for i in range(d):
        e = unit[i]
        A.append(tuple(-v for v in e) + e)  # s_i - z_i >= -y_i
        r.append(-y[i])
        A.append(e + e)  # s_i + z_i >= y_i
        r.append(y[i])
    lifted = Polyhedron.from_h(A, r, 2 * d)
    objectives = [zero + (Fraction(1),) * d] + [e + zero for e in unit]
    return lex_min(lifted, objectives)[:d]


def run_strategy(
    model: MarketModel,
    xi: Payoff,
    y0: Sequence,
    path: PathSpec,
    h: HedgeSets,
    rule: str = "min-trade",
) -> Strategy:
    path.check(model)
    y = vec(y0)
    ys, rsets = [y], []
    for node in path.nodes[:-1]:
        rset = rebalance_set(y, node, h)
        y = select_rebalance(rset, y, rule)
        rsets.append(rset)
        ys.append(y)
    last = path.nodes[-1]
    surplus = tuple(a - b for a, b in zip(y, xi[last]))
    st = Strategy(path, tuple(ys), tuple(rsets), surplus)
    verify_strategy(model, st)
    return st


def verify_strategy(model: MarketModel, st: Strategy) -> None:
    """Self-financing at every step and a solvent terminal surplus, checked exactly."""
    for t, node in enumerate(st.path.nodes[:-1]):
        step = tuple(a - b for a, b in zip(st.portfolios[t], st.portfolios[t + 1]))
        if not contains(model.cone(node), step):
            raise StrategyCheckError(f"step {t} at {node} is not self-financing")
    if not contains(model.cone(st.path.nodes[-1]), st.surplus):
        raise StrategyCheckError("terminal surplus is not solvent")


def _fmt(y: Sequence[Fraction]) -> str:
    return "(" + ", ".join(f"{float(v):.6g}" for v in y) + ")"
