"""Ask prices as the value of a linear program over consistent node masses.

On the event tree, a mass vector ``n(k)`` in the dual solvency cone is
attached to every atom, masses flow (``n(k)`` equals the sum over its
children) and the numeraire mass at the root is 1.  The maximum of
``sum xi . n`` over terminal atoms is the ask price.  Dividing by the
numeraire coordinate recovers a measure and a price process.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geometry import lp
from .market import MarketModel, ModelError, Payoff, PathTree, cone_lp_columns
from .primal import ArbitrageError


@dataclass(frozen=True)
class RnSolution:
    model: MarketModel
    asset: int  # 1-based numeraire index
    value: Fraction
    tree: PathTree
    masses: tuple[tuple[Fraction, ...], ...]  # per atom

    @property
    def degenerate(self) -> tuple[int, ...]:
        """Atoms where the numeraire mass vanishes."""
        i = self.asset - 1
        return tuple(k for k, n in enumerate(self.masses) if n[i] == 0)


@dataclass(frozen=True)
class PricingPair:
    measure: dict[int, Fraction]  # atom -> probability of reaching it
    prices: dict[int, tuple[Fraction, ...]]  # atom -> price vector, numeraire entry 1
    degenerate: tuple[int, ...]

    def expectation(self, tree: PathTree, xi: Payoff) -> Fraction:
        total = Fraction(0)
        for k in tree.leaves():
            if k in self.measure:
                x = xi[tree.node[k]]
                total += self.measure[k] * sum(a * b for a, b in zip(x, self.prices[k]))
        return total


def rn_price(model: MarketModel, xi: Payoff, i: int) -> tuple[Fraction, RnSolution]:
    xi.check(model)
    d = model.d
    if not 1 <= i <= d:
        raise ModelError(f"asset index {i} outside 1..{d}")
    tree = model.lattice.path_tree()
    gens, offset, nvar = cone_lp_columns(model, tree)
    inner = [k for k in range(len(tree)) if tree.children[k]]
    row_of = {k: j * d for j, k in enumerate(inner)}
    norm_row = len(inner) * d
    nrow = norm_row + 1
    cols, obj = [], []
    for k in range(len(tree)):
        leaf = not tree.children[k]
        x = xi[tree.node[k]] if leaf else None
        par = tree.parent[k]
        for g in gens[k]:
            col = {}
            for a in range(d):
                if g[a]:
                    if k in row_of:
                        col[row_of[k] + a] = g[a]
                    if par >= 0:
                        col[row_of[par] + a] = -g[a]
            if k == 0 and g[i - 1]:
                col[norm_row] = g[i - 1]
            cols.append(col)
            obj.append(sum((a * b for a, b in zip(x, g)), Fraction(0)) if leaf else Fraction(0))
    rhs = [Fraction(0)] * nrow
    rhs[norm_row] = Fraction(1)
    try:
        sol = lp.solve_standard(obj, cols, rhs, columns=True)
    except lp.UnboundedError:
        raise ArbitrageError("price LP unbounded: the model admits arbitrage") from None
    except lp.InfeasibleError:
        raise ArbitrageError("no consistent node masses with unit numeraire at the root") from None
    masses = []
    for k in range(len(tree)):
        n = [Fraction(0)] * d
        for j, g in enumerate(gens[k]):
            lam = sol.x[offset[k] + j]
            if lam:
                for a in range(d):
                    n[a] += lam * g[a]
        masses.append(tuple(n))
    return sol.value, RnSolution(model, i, sol.value, tree, tuple(masses))


def extract_pair(sol: RnSolution) -> PricingPair:
    """Measure ``Q(k) = n^i(k)`` and prices ``S(k) = n(k) / n^i(k)`` wherever ``n^i(k) > 0``."""
    i = sol.asset - 1
    measure, prices = {}, {}
    for k, n in enumerate(sol.masses):
        if n[i] > 0:
            measure[k] = n[i]
            prices[k] = tuple(v / n[i] for v in n)
    return PricingPair(measure, prices, sol.degenerate)
