"""Currency markets with proportional transaction costs on a finite lattice.

Nodes are tuples whose first entry is the time step.  A lattice may
recombine (a node can have several predecessors); the underlying event tree
is the tree of paths through the lattice.  Solvency cones and payoffs only
depend on the lattice node, so the superhedging sets of all tree atoms that
map to the same lattice node coincide, and the primal and dual constructions
run on the lattice directly.  Anything that needs a genuine probability
space (risk-neutral pricing, consistent pricing pairs) expands the path tree
with :meth:`EventLattice.path_tree`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Context, Decimal, localcontext
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Mapping, Sequence

from .geometry import Polyhedron, canonical, contains, dual_cone, lp, vec

Node = tuple
Matrix = tuple[tuple[Fraction, ...], ...]


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class EventLattice:
    horizon: int
    nodes: tuple[tuple[Node, ...], ...]
    successors: Mapping[Node, tuple[Node, ...]]
    weights: Mapping[Node, Fraction] | None = None

    def __post_init__(self):
        if len(self.nodes) != self.horizon + 1:
            raise ModelError("need one node list per time step 0..T")
        if len(self.nodes[0]) != 1:
            raise ModelError("time 0 must have a single root node")
        for t, level in enumerate(self.nodes):
            for mu in level:
                if mu[0] != t:
                    raise ModelError(f"node {mu} listed at time {t}")
        for t in range(self.horizon):
            nxt = set(self.nodes[t + 1])
            for mu in self.nodes[t]:
                succ = self.successors.get(mu, ())
                if not succ:
                    raise ModelError(f"non-terminal node {mu} has no successor")
                if not set(succ) <= nxt:
                    raise ModelError(f"successor of {mu} is not a time-{t + 1} node")
        for t in range(1, self.horizon + 1):
            hit = {nu for mu in self.nodes[t - 1] for nu in self.successors[mu]}
            missing = set(self.nodes[t]) - hit
            if missing:
                raise ModelError(f"nodes without predecessor: {sorted(missing)}")
        if self.weights is not None:
            for level in self.nodes:
                for mu in level:
                    if self.weights.get(mu, 0) <= 0:
                        raise ModelError(f"weight of {mu} must be strictly positive")

    @property
    def root(self) -> Node:
        return self.nodes[0][0]

    @property
    def terminal(self) -> tuple[Node, ...]:
        return self.nodes[self.horizon]

    def succ(self, mu: Node) -> tuple[Node, ...]:
        return self.successors.get(mu, ())

    def all_nodes(self) -> list[Node]:
        return [mu for level in self.nodes for mu in level]

    def path_tree(self) -> "PathTree":
        return PathTree.expand(self)


@dataclass(frozen=True)
class PathTree:
    """The event tree of a lattice: atom ``k`` sits at lattice node ``node[k]``.

    Atoms are numbered in breadth-first order, so ``parent[k] < k``.
    Successor probabilities default to uniform.
    """

    node: tuple[Node, ...]
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    time: tuple[int, ...]
    prob: tuple[Fraction, ...]

    @classmethod
    def expand(cls, lat: EventLattice) -> "PathTree":
        node, parent, time, prob = [lat.root], [-1], [0], [Fraction(1)]
        children: list[list[int]] = [[]]
        frontier = [0]
        for t in range(lat.horizon):
            nxt = []
            for k in frontier:
                succ = lat.succ(node[k])
                for nu in succ:
                    idx = len(node)
                    node.append(nu)
                    parent.append(k)
                    time.append(t + 1)
                    prob.append(prob[k] / len(succ))
                    children.append([])
                    children[k].append(idx)
                    nxt.append(idx)
            frontier = nxt
        return cls(tuple(node), tuple(parent), tuple(tuple(c) for c in children), tuple(time), tuple(prob))

    def __len__(self):
        return len(self.node)

    def leaves(self) -> list[int]:
        return [k for k in range(len(self.node)) if not self.children[k]]


def check_exchange_matrix(m: Sequence[Sequence]) -> Matrix:
    m = tuple(vec(row) for row in m)
    d = len(m)
    for j, row in enumerate(m):
        if len(row) != d:
            raise ModelError("exchange matrix must be square")
        if row[j] != 1:
            raise ModelError("diagonal exchange rates must equal 1")
        if any(v <= 0 for v in row):
            raise ModelError("exchange rates must be strictly positive")
    return m


def solvency_cone(m: Sequence[Sequence]) -> Polyhedron:
    """Cone generated by e^1..e^d and pi^{jk} e^j - e^k."""
    m = check_exchange_matrix(m)
    d = len(m)
    gens = []
    for j in range(d):
        gens.append(tuple(Fraction(int(i == j)) for i in range(d)))
    for j in range(d):
        for k in range(d):
            if j != k:
                gens.append(tuple(m[j][k] * (i == j) - (i == k) for i in range(d)))
    return canonical(Polyhedron.cone(gens, d))


@dataclass(frozen=True)
class TradePlan:
    """``beta[j][k]``: units of asset k received by exchanging asset j.

    ``surplus`` is what is left over (disposed of) after the exchanges; it is
    zero whenever the target can be reached exactly.
    """

    beta: Matrix
    surplus: tuple[Fraction, ...]

    def result(self, x: Sequence, m: Sequence[Sequence]) -> tuple[Fraction, ...]:
        d = len(x)
        return tuple(
            Fraction(x[k])
            + sum(self.beta[j][k] for j in range(d))
            - sum(self.beta[k][j] * m[k][j] for j in range(d))
            for k in range(d)
        )


def exchange_decompose(x: Sequence, y: Sequence, m: Sequence[Sequence]) -> TradePlan | None:
    """Exchanges turning ``x`` into ``y`` at rates ``m``, or None if impossible.

    Among feasible plans the one with the least disposed surplus is returned,
    so the exchange identity holds exactly (zero surplus) whenever it can.
    """
    m = check_exchange_matrix(m)
    x, y = vec(x), vec(y)
    d = len(m)
    if len(x) != d or len(y) != d:
        raise ModelError("portfolio length does not match the exchange matrix")
    pairs = [(j, k) for j in range(d) for k in range(d) if j != k]
    # variables: beta_{jk} for pairs, then surplus_k
    cols = []
    obj = []
    for j, k in pairs:
        col = {k: Fraction(1)}
        col[j] = col.get(j, Fraction(0)) - m[j][k]
        cols.append(col)
        obj.append(Fraction(0))
    for k in range(d):
        cols.append({k: Fraction(-1)})
        obj.append(Fraction(-1))
    rhs = [y[k] - x[k] for k in range(d)]
    try:
        sol = lp.solve_standard(obj, cols, rhs, columns=True)
    except lp.InfeasibleError:
        return None
    beta = [[Fraction(0)] * d for _ in range(d)]
    for (j, k), v in zip(pairs, sol.x):
        beta[j][k] = v
    surplus = tuple(sol.x[len(pairs):])
    return TradePlan(tuple(tuple(r) for r in beta), surplus)


@dataclass(frozen=True)
class MarketModel:
    lattice: EventLattice
    rates: Mapping[Node, Matrix]
    info: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        ds = {len(m) for m in self.rates.values()}
        if len(ds) != 1:
            raise ModelError("all exchange matrices must have the same size")
        for mu in self.lattice.all_nodes():
            if mu not in self.rates:
                raise ModelError(f"no exchange matrix at node {mu}")
            check_exchange_matrix(self.rates[mu])

    @property
    def d(self) -> int:
        return len(next(iter(self.rates.values())))

    @property
    def horizon(self) -> int:
        return self.lattice.horizon

    @cached_property
    def _cones(self) -> dict[Node, Polyhedron]:
        cache: dict[Matrix, Polyhedron] = {}
        out = {}
        for mu in self.lattice.all_nodes():
            m = self.rates[mu]
            if m not in cache:
                cache[m] = solvency_cone(m)
            out[mu] = cache[m]
        return out

    @cached_property
    def _dual_cones(self) -> dict[Node, Polyhedron]:
        cache: dict[int, Polyhedron] = {}
        out = {}
        for mu, k in self._cones.items():
            if id(k) not in cache:
                cache[id(k)] = dual_cone(k)
            out[mu] = cache[id(k)]
        return out

    def cone(self, mu: Node) -> Polyhedron:
        return self._cones[mu]

    def dual_cone(self, mu: Node) -> Polyhedron:
        return self._dual_cones[mu]


@dataclass(frozen=True)
class Payoff:
    values: Mapping[Node, tuple[Fraction, ...]]

    def __getitem__(self, mu: Node) -> tuple[Fraction, ...]:
        return self.values[mu]

    def __neg__(self) -> "Payoff":
        return Payoff({mu: tuple(-v for v in x) for mu, x in self.values.items()})

    def check(self, model: MarketModel) -> None:
        for mu in model.lattice.terminal:
            if mu not in self.values:
                raise ModelError(f"payoff undefined at terminal node {mu}")
            if len(self.values[mu]) != model.d:
                raise ModelError(f"payoff at {mu} has the wrong length")

    @classmethod
    def constant(cls, model: MarketModel, x: Sequence) -> "Payoff":
        x = vec(x)
        return cls({mu: x for mu in model.lattice.terminal})


# ---------------------------------------------------------------------------
# Korn-Mueller two-stock model with a bond


def to_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (via its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, Decimal):
        return Fraction(x)
    return Fraction(str(x).strip())


def round_sig(x: Decimal, digits: int) -> Fraction:
    ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    return Fraction(ctx.plus(x))


@dataclass(frozen=True)
class KornMullerParams:
    S1_0: Fraction
    S2_0: Fraction
    sigma1: Fraction
    sigma2: Fraction
    rho: Fraction
    r: Fraction
    tau: Fraction
    T: int
    k1: Fraction
    k2: Fraction
    k3: Fraction
    digits: int = 12

    def __post_init__(self):
        for name in ("S1_0", "S2_0", "sigma1", "sigma2", "r", "tau", "rho", "k1", "k2", "k3"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.S1_0 <= 0 or self.S2_0 <= 0:
            raise ModelError("initial prices must be positive")
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise ModelError("volatilities must be positive")
        if abs(self.rho) > 1:
            raise ModelError("correlation must lie in [-1, 1]")
        if self.tau <= 0 or int(self.T) != self.T or self.T < 1:
            raise ModelError("need tau > 0 and an integer number of steps T >= 1")
        for k in (self.k1, self.k2, self.k3):
            if not 0 <= k < 1:
                raise ModelError("spreads must lie in [0, 1)")
        if self.digits < 1:
            raise ModelError("digits must be positive")

    @property
    def delta(self) -> Fraction:
        return self.tau / self.T

    @classmethod
    def reference_example(cls, digits: int = 12) -> "KornMullerParams":
        return cls(
            S1_0=Fraction(45), S2_0=Fraction(50), sigma1=Fraction("0.15"), sigma2=Fraction("0.2"),
            rho=Fraction("0.2"), r=Fraction("0.05"), tau=Fraction(1), T=4,
            k1=Fraction("0.02"), k2=Fraction("0.04"), k3=Fraction("0.01"), digits=digits,
        )


def _dec(x: Fraction) -> Decimal:
    return Decimal(x.numerator) / Decimal(x.denominator)


def korn_muller_prices(p: KornMullerParams, t: int, j1: int, j2: int) -> tuple[Fraction, Fraction]:
    """Stock prices S^1_t(j1, j2), S^2_t(j1, j2), rounded to ``p.digits`` significant digits."""
    with localcontext() as ctx:
        ctx.prec = 60
        dt = _dec(p.delta)
        sq = dt.sqrt()
        s1, s2, r, rho = _dec(p.sigma1), _dec(p.sigma2), _dec(p.r), _dec(p.rho)
        e1 = (r - s1 * s1 / 2) * t * dt + (2 * j1 - t - 2) * s1 * sq
        e2 = (r - s2 * s2 / 2) * t * dt + ((2 * j1 - t - 2) * rho + (2 * j2 - t - 2) * (1 - rho * rho).sqrt()) * s2 * sq
        S1 = _dec(p.S1_0) * e1.exp()
        S2 = _dec(p.S2_0) * e2.exp()
    return round_sig(S1, p.digits), round_sig(S2, p.digits)


def build_korn_muller(p: KornMullerParams) -> MarketModel:
    T = p.T
    nodes = tuple(
        tuple((t, j1, j2) for j1 in range(1, t + 2) for j2 in range(1, t + 2)) for t in range(T + 1)
    )
    succ = {}
    for t in range(T):
        for (_, j1, j2) in nodes[t]:
            succ[(t, j1, j2)] = (
                (t + 1, j1, j2), (t + 1, j1 + 1, j2), (t + 1, j1, j2 + 1), (t + 1, j1 + 1, j2 + 1),
            )
    lat = EventLattice(T, nodes, succ)
    one_plus = 1 + p.r * p.delta
    rates: dict[Node, Matrix] = {}
    prices: dict[Node, dict[str, Fraction]] = {}
    for t in range(T + 1):
        B = one_plus ** -(T - t)
        for mu in nodes[t]:
            _, j1, j2 = mu
            S1, S2 = korn_muller_prices(p, t, j1, j2)
            S1b, S1a = (1 - p.k1) * S1, (1 + p.k1) * S1
            S2b, S2a = (1 - p.k2) * S2, (1 + p.k2) * S2
            Bb, Ba = (1 - p.k3) * B, (1 + p.k3) * B
            rates[mu] = (
                (Fraction(1), S2a / S1b, Ba / S1b),
                (S1a / S2b, Fraction(1), Ba / S2b),
                (S1a / Bb, S2a / Bb, Fraction(1)),
            )
            prices[mu] = {"S1": S1, "S2": S2, "B": B, "S1b": S1b, "S1a": S1a,
                          "S2b": S2b, "S2a": S2a, "Bb": Bb, "Ba": Ba}
    return MarketModel(lat, rates, info={"kind": "korn_muller", "params": p, "prices": prices})


EXERCISE_RULES = {"ask": ("S1a", "S2a"), "mid": ("S1", "S2")}


def exchange_option_payoff(model: MarketModel, rule: str = "ask") -> Payoff:
    """Physically delivered exchange option paying (1, -1, 0) when stock 1 is worth more.

    ``rule="ask"`` compares ask prices, ``S^{1a}_T >= S^{2a}_T``; ``rule="mid"``
    compares the mid prices ``S^1_T >= S^2_T``.
    """
    if model.d != 3:
        raise ModelError("the exchange option needs a three-asset model")
    prices = model.info.get("prices")
    if prices is None:
        raise ModelError("the exchange option needs stock prices (a Korn-Mueller model)")
    if rule not in EXERCISE_RULES:
        raise ModelError(f"unknown exercise rule {rule!r}")
    a, b = EXERCISE_RULES[rule]
    one, zero = Fraction(1), Fraction(0)
    vals = {}
    for mu in model.lattice.terminal:
        pr = prices[mu]
        vals[mu] = (one, -one, zero) if pr[a] >= pr[b] else (zero, zero, zero)
    return Payoff(vals)


# ---------------------------------------------------------------------------
# consistent pricing pairs


@dataclass(frozen=True)
class ConsistencyResult:
    exists: bool
    slack: Fraction
    masses: tuple[tuple[Fraction, ...], ...] | None = None  # per path-tree atom
    measure: tuple[Fraction, ...] | None = None  # per path-tree atom
    prices: tuple[tuple[Fraction, ...], ...] | None = None
    tree: PathTree | None = None


def cone_lp_columns(model: MarketModel, tree: PathTree):
    """Variables ``lambda[k, g] >= 0`` with ``n(k) = sum_g lambda[k, g] g`` over K^+ rays.

    Rays are scaled to coordinate sum 1, which keeps the floating point warm
    start well conditioned.  Returns (rays per atom, column offset per atom,
    number of variables).
    """
    gens, offset = [], []
    pos = 0
    scaled: dict[int, list] = {}
    for k, mu in enumerate(tree.node):
        kp = model.dual_cone(mu)
        if id(kp) not in scaled:
            scaled[id(kp)] = [tuple(v / sum(r) for v in r) for r in kp.rays]
        g = scaled[id(kp)]
        gens.append(g)
        offset.append(pos)
        pos += len(g)
    return gens, offset, pos


def check_consistent_pair(model: MarketModel) -> ConsistencyResult:
    """Decide whether a strictly consistent pricing pair exists.

    Solves, on the path tree, ``max eps`` over node masses ``n(k) in K^+``
    with ``n(k) = sum of children``, total root mass 1 and
    ``sum_j n_j(w) >= eps`` at every terminal atom.  Since ``K^+`` lies in the
    nonnegative orthant this forces ``n(w) != 0``; a pair exists iff the
    optimal ``eps`` is positive.
    """
    tree = model.lattice.path_tree()
    d = model.d
    gens, offset, nvar = cone_lp_columns(model, tree)
    leaves = tree.leaves()
    # rows: flow (d per inner atom), normalization, one per leaf
    inner = [k for k in range(len(tree)) if tree.children[k]]
    row_of = {}
    nrow = 0
    for k in inner:
        row_of[k] = nrow
        nrow += d
    norm_row = nrow
    nrow += 1
    leaf_row = {w: nrow + i for i, w in enumerate(leaves)}
    nrow += len(leaves)
    cols = []
    for k in range(len(tree)):
        for g in gens[k]:
            col = {}
            if k in row_of:
                for i in range(d):
                    if g[i]:
                        col[row_of[k] + i] = g[i]
            par = tree.parent[k]
            if par >= 0:
                for i in range(d):
                    if g[i]:
                        col[row_of[par] + i] = col.get(row_of[par] + i, 0) - g[i]
            if k == 0:
                col[norm_row] = sum(g)
            if k in leaf_row:
                col[leaf_row[k]] = sum(g)
            cols.append(col)
    # eps split into eps+ and eps-; leaf slacks
    obj = [Fraction(0)] * nvar
    for sgn in (1, -1):
        cols.append({leaf_row[w]: Fraction(-sgn) for w in leaves})
        obj.append(Fraction(sgn))
    for w in leaves:
        cols.append({leaf_row[w]: Fraction(-1)})
        obj.append(Fraction(0))
    rhs = [Fraction(0)] * nrow
    rhs[norm_row] = Fraction(1)
    try:
        sol = lp.solve_standard(obj, cols, rhs, columns=True)
    except lp.InfeasibleError:
        return ConsistencyResult(False, Fraction(0))
    eps = sol.x[nvar] - sol.x[nvar + 1]
    if eps <= 0:
        return ConsistencyResult(False, eps)
    masses = []
    for k in range(len(tree)):
        n = [Fraction(0)] * d
        for g_idx, g in enumerate(gens[k]):
            lam = sol.x[offset[k] + g_idx]
            if lam:
                for i in range(d):
                    n[i] += lam * g[i]
        masses.append(tuple(n))
    # Q(k) proportional to the total mass; S = n / Q is a martingale
    total = [sum(n) for n in masses]
    measure = tuple(total)
    prices = tuple(tuple(v / total[k] for v in masses[k]) for k in range(len(tree)))
    return ConsistencyResult(True, eps, tuple(masses), measure, prices, tree)


def verify_consistent_pair(model: MarketModel, res: ConsistencyResult) -> bool:
    """Direct check of the pair: Q > 0 a probability, S martingale, S in K^+ minus 0."""
    tree = res.tree
    Q, S = res.measure, res.prices
    if Q[0] != 1 or any(q <= 0 for q in Q):
        return False
    for k in range(len(tree)):
        mu = tree.node[k]
        if not any(S[k]) or not contains(model.dual_cone(mu), S[k]):
            return False
        ch = tree.children[k]
        if ch:
            if sum(Q[c] for c in ch) != Q[k]:
                return False
            for i in range(model.d):
                if sum(Q[c] * S[c][i] for c in ch) != Q[k] * S[k][i]:
                    return False
    return True
