"""Linear vector optimization: upper and lower images and the passage between them.

A problem minimizes ``P x`` over ``S = {x : B x >= b}`` with respect to the
order induced by a polyhedral cone ``C``.  Its upper image is ``P[S] + C``.
The dual problem lives on ``T`` (pairs ``(u, w)``) and its lower image is
``D*[T] - cone{e_q}``.  When ``C`` contains no lines, the lower image is a
section of the epigraph of the support function of ``-(P[S] + C)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geometry import (
    INF,
    EmptySetError,
    HPoly,
    Polyhedron,
    Vector,
    affine_image,
    canonical,
    dual_cone,
    epigraph_section,
    is_line_free,
    minkowski_sum_cone,
    supfun_of_negated_set,
    vec,
)
from .geometry.polyhedron import canonical_from_h
from .market import MarketModel, Node

Matrix = tuple[Vector, ...]


class LvopError(ValueError):
    pass


class LineInConeError(LvopError):
    """The ordering cone contains a line, so the support function route does not apply."""


def _matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(vec(r) for r in rows)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def interior_check(c: Sequence[Fraction], C: Polyhedron) -> bool:
    """True iff ``c`` lies in the interior of the cone ``C``.

    ``c`` is interior iff ``c.z > 0`` for every nonzero ``z`` in the dual cone,
    which needs the dual cone to be pointed and every extreme ray to pass.
    """
    cp = dual_cone(C)
    if not is_line_free(cp):
        return False
    return all(_dot(c, z) > 0 for z in cp.rays)


def default_weight(C: Polyhedron) -> Vector:
    """A weight in the interior of ``C`` with last entry 1.

    Tries the sum of the dual cone's extreme rays (each scaled to unit 1-norm),
    then the same sum over the rays of ``C`` itself.
    """
    for rays in (dual_cone(C).rays, C.rays):
        total = [Fraction(0)] * C.dim
        for ray in rays:
            n = sum(abs(v) for v in ray)
            for i, v in enumerate(ray):
                total[i] += v / n
        if total[-1] > 0:
            c = tuple(v / total[-1] for v in total)
            if interior_check(c, C):
                return c
    raise LvopError("no default weight found: pass c explicitly")


@dataclass(frozen=True)
class LvopProblem:
    P: Matrix
    B: Matrix
    b: Vector
    C: Polyhedron
    c: Vector

    def __post_init__(self):
        object.__setattr__(self, "P", _matrix(self.P))
        object.__setattr__(self, "B", _matrix(self.B))
        object.__setattr__(self, "b", vec(self.b))
        object.__setattr__(self, "c", vec(self.c))
        q, d = self.q, self.d
        if any(len(r) != d for r in self.P) or any(len(r) != d for r in self.B):
            raise LvopError("P and B must have d columns")
        if len(self.b) != len(self.B):
            raise LvopError("b must have one entry per row of B")
        if self.C.dim != q or len(self.c) != q:
            raise LvopError("C and c must live in R^q")
        if self.c[-1] != 1:
            raise LvopError("the weight vector needs c_q = 1")
        if not interior_check(self.c, self.C):
            raise LvopError("c must lie in the interior of C (and C must have interior)")

    @property
    def q(self) -> int:
        return len(self.P)

    @property
    def d(self) -> int:
        return len(self.P[0]) if self.P else 0

    @property
    def m(self) -> int:
        return len(self.B)

    def feasible_set(self) -> Polyhedron:
        return Polyhedron.from_h(self.B, self.b, self.d)


def upper_image(p: LvopProblem) -> Polyhedron:
    """``P[S] + C``."""
    S = p.feasible_set()
    if S.is_empty():
        return Polyhedron.empty(p.q)
    return minkowski_sum_cone(affine_image(S, p.P), p.C)


@dataclass(frozen=True)
class DualData:
    """Feasible set ``T`` of the dual problem in ``R^(m+q)`` and the map ``D*``."""

    problem: LvopProblem
    T: Polyhedron

    def objective(self, uw: Sequence[Fraction]) -> Vector:
        m, q = self.problem.m, self.problem.q
        u, w = uw[:m], uw[m:]
        return tuple(w[: q - 1]) + (_dot(self.problem.b, u),)


def dual_data(p: LvopProblem) -> DualData:
    m, q, d = p.m, p.q, p.d
    n = m + q
    zero = Fraction(0)
    A, r = [], []
    for i in range(m):  # u >= 0
        A.append(tuple(Fraction(int(k == i)) for k in range(n)))
        r.append(zero)
    for j in range(d):  # B^T u - P^T w = 0
        row = tuple(p.B[i][j] for i in range(m)) + tuple(-p.P[k][j] for k in range(q))
        A += [row, tuple(-v for v in row)]
        r += [zero, zero]
    crow = (zero,) * m + p.c  # c.w = 1
    A += [crow, tuple(-v for v in crow)]
    r += [Fraction(1), Fraction(-1)]
    for z in p.C.rays:  # w in C^+
        A.append((zero,) * m + z)
        r.append(zero)
    return DualData(p, canonical_from_h(HPoly(tuple(A), tuple(r), n)))


def lower_image(p: LvopProblem) -> Polyhedron:
    """``D*[T] - cone{e_q}``, by mapping the generators of ``T``."""
    dd = dual_data(p)
    q = p.q
    if dd.T.is_empty():
        return Polyhedron.empty(q)
    verts = [dd.objective(v) for v in dd.T.vertices]
    down = (Fraction(0),) * (q - 1) + (Fraction(-1),)
    m = p.m
    rays = [tuple(r[m:m + q - 1]) + (_dot(p.b, r[:m]),) for r in dd.T.rays]
    rays.append(down)
    return canonical(Polyhedron.from_v(verts, rays, q))


def lower_image_via_support(p: LvopProblem) -> Polyhedron:
    """``{w : -w_q >= Z(w_1..w_{q-1}, 1 - sum_{i<q} c_i w_i)}`` with ``Z`` the support function of ``-P``."""
    if not is_line_free(p.C):
        raise LineInConeError("the ordering cone contains a line")
    up = upper_image(p)
    if up.is_empty():
        raise EmptySetError("the upper image is empty")
    return epigraph_section(supfun_of_negated_set(up), p.c)


def coupling_phi(y: Sequence, w: Sequence, c: Sequence) -> Fraction:
    y, w, c = vec(y), vec(w), vec(c)
    if not len(y) == len(w) == len(c):
        raise LvopError("y, w and c must have the same length")
    q = len(y)
    head = _dot(y[: q - 1], w[: q - 1])
    return head + y[-1] * (1 - _dot(c[: q - 1], w[: q - 1])) - w[-1]


def support_from_lower_image(dstar: Polyhedron, c: Sequence, w: Sequence) -> Fraction | float:
    """Recover the support function of ``-P`` at ``w`` from the lower image."""
    c, w = vec(c), vec(w)
    s = _dot(c, w)
    if s <= 0:
        return Fraction(0) if not any(w) else INF
    x = tuple(v / s for v in w[:-1])
    top = _fiber_max(dstar, x)
    if top is None:
        return INF
    if top == INF:
        return -INF
    return -s * top


def _fiber_max(p: Polyhedron, x: Sequence[Fraction]):
    """``sup{y : (x, y) in p}``; None when the fiber is empty."""
    if p.is_empty():
        return None
    lo, hi = None, None
    for row, rhs in zip(p.h.A, p.h.r):
        s = rhs - _dot(row[:-1], x)
        a = row[-1]
        if a == 0:
            if s > 0:
                return None
        elif a > 0:
            v = s / a
            lo = v if lo is None or v > lo else lo
        else:
            v = s / a
            hi = v if hi is None or v < hi else hi
    if hi is None:
        return INF
    if lo is not None and lo > hi:
        return None
    return hi


def shp_step_problem(model: MarketModel, node: Node, w_set: Polyhedron, c: Sequence | None = None) -> LvopProblem:
    """One backward step as a vector optimization problem: ``P = I``, ``S = w_set``, ``C`` the solvency cone."""
    K = model.cone(node)
    if not is_line_free(K):
        raise LineInConeError(
            "solvency cone at this node contains a line; reducing it first "
            "(a liquidation map) is not implemented"
        )
    d = model.d
    eye = tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))
    if c is None:
        c = default_weight(K)
    return LvopProblem(eye, w_set.h.A, w_set.h.r, K, vec(c))
