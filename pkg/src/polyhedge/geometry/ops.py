"""Set and function operations on exact polyhedra."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import lp
from ._dd import integerize
from .polyhedron import (
    DimensionError,
    HPoly,
    Polyhedron,
    VPoly,
    Vector,
    _check_dims,
    canonical_from_h,
    canonical_from_v,
    vec,
)

Scalar = Fraction
INF = math.inf

ZERO = Fraction(0)


class EmptySetError(ValueError):
    pass


class MalformedEpigraphError(ValueError):
    pass


# ---------------------------------------------------------------------------
# sets


def intersect(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    _check_dims(p, q)
    h = HPoly(p.h.A + q.h.A, p.h.r + q.h.r, p.dim)
    return canonical_from_h(h)


def intersect_all(ps: Sequence[Polyhedron]) -> Polyhedron:
    """Left-to-right pairwise intersection with redundancy removal at each step."""
    if not ps:
        raise ValueError("nothing to intersect")
    acc = ps[0]
    for q in ps[1:]:
        acc = intersect(acc, q)
    if len(ps) == 1:
        acc = canonical_from_h(acc.h)
    return acc


def minkowski_sum_cone(p: Polyhedron, c: Polyhedron) -> Polyhedron:
    _check_dims(p, c)
    if p.is_empty():
        raise EmptySetError("Minkowski sum with an empty polyhedron")
    if not c.is_cone():
        raise ValueError("second argument must be a cone")
    return canonical_from_v(VPoly(p.vertices, p.rays + c.rays, p.dim))


def translate(p: Polyhedron, x: Sequence) -> Polyhedron:
    x = vec(x)
    if len(x) != p.dim:
        raise DimensionError("translation vector has the wrong length")
    verts = tuple(tuple(a + b for a, b in zip(v, x)) for v in p.vertices)
    return canonical_from_v(VPoly(verts, p.rays, p.dim))


def negate(p: Polyhedron) -> Polyhedron:
    verts = tuple(tuple(-a for a in v) for v in p.vertices)
    rays = tuple(tuple(-a for a in r) for r in p.rays)
    return canonical_from_v(VPoly(verts, rays, p.dim))


def convex_hull_union(ps: Sequence[Polyhedron]) -> Polyhedron:
    """Closed convex hull of a finite union: conv of all vertices + cone of all rays."""
    if not ps:
        raise ValueError("convex hull of an empty family")
    _check_dims(*ps)
    verts: list[Vector] = []
    rays: list[Vector] = []
    for p in ps:
        if p.is_empty():
            continue
        verts.extend(p.vertices)
        rays.extend(p.rays)
    return canonical_from_v(VPoly(tuple(verts), tuple(rays), ps[0].dim))


def project(p: Polyhedron, keep: Sequence[int]) -> Polyhedron:
    """Orthogonal projection onto the coordinates ``keep`` (in that order)."""
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(not 0 <= k < p.dim for k in keep):
        raise DimensionError(f"invalid coordinate list {keep} for dimension {p.dim}")
    if p.is_empty():
        return Polyhedron.empty(len(keep))
    verts = tuple(tuple(v[k] for k in keep) for v in p.vertices)
    rays = tuple(tuple(r[k] for k in keep) for r in p.rays)
    return canonical_from_v(VPoly(verts, rays, len(keep)))


def affine_image(p: Polyhedron, M: Sequence[Sequence], shift: Sequence | None = None) -> Polyhedron:
    """Image ``{M x + shift : x in p}``."""
    M = [vec(row) for row in M]
    q = len(M)
    shift = vec(shift) if shift is not None else (ZERO,) * q
    if p.is_empty():
        return Polyhedron.empty(q)

    def apply(x, s):
        return tuple(sum(a * b for a, b in zip(row, x)) + s_i for row, s_i in zip(M, s))

    verts = tuple(apply(v, shift) for v in p.vertices)
    rays = tuple(apply(r, (ZERO,) * q) for r in p.rays)
    return canonical_from_v(VPoly(verts, rays, q))


def contains(p: Polyhedron, x: Sequence) -> bool:
    return p.contains_point(vec(x))


def dual_cone(c: Polyhedron) -> Polyhedron:
    """``{x : x.y >= 0 for all y in c}`` for a cone ``c``."""
    if not c.is_cone():
        raise ValueError("dual_cone expects a cone")
    return canonical_from_h(HPoly(c.rays, (ZERO,) * len(c.rays), c.dim))


def is_line_free(c: Polyhedron) -> bool:
    """True iff ``c`` contains no line, i.e. ``c & -c == {0}``."""
    # the lineality space is the null space of the H-rep rows
    return _rank(c.h.A, c.dim) == c.dim


def _rank(rows: Iterable[Sequence[Fraction]], n: int) -> int:
    pivots: list[tuple[int, list[Fraction]]] = []
    for row in rows:
        v = list(row)
        for col, prow in pivots:
            if v[col]:
                f = v[col] / prow[col]
                v = [a - f * b for a, b in zip(v, prow)]
        nz = next((i for i, a in enumerate(v) if a), None)
        if nz is not None:
            pivots.append((nz, v))
    return len(pivots)


# ---------------------------------------------------------------------------
# linear programming over a polyhedron


@dataclass(frozen=True)
class LPResult:
    value: Fraction | float
    point: Vector | None = None
    ray: Vector | None = None

    @property
    def bounded(self) -> bool:
        return self.value != -INF


def lp_min(p: Polyhedron, objective: Sequence, *, method: str = "auto") -> LPResult:
    """Minimize ``objective.x`` over ``p`` exactly.

    Uses the V-representation when it is available (or ``method="vertices"``),
    otherwise the rational simplex on the H-representation.  Raises
    :class:`lp.InfeasibleError` on an empty polyhedron.
    """
    obj = vec(objective)
    if len(obj) != p.dim:
        raise DimensionError("objective has the wrong length")
    if method == "auto":
        method = "vertices" if p.has_v else "simplex"
    if method == "vertices":
        if p.is_empty():
            raise lp.InfeasibleError("minimizing over the empty set")
        for r in p.rays:
            if sum(a * b for a, b in zip(obj, r)) < 0:
                return LPResult(-INF, ray=r)
        best = min(p.vertices, key=lambda v: (sum(a * b for a, b in zip(obj, v)), v))
        return LPResult(sum((a * b for a, b in zip(obj, best)), ZERO), point=best)
    if method != "simplex":
        raise ValueError(f"unknown method {method!r}")
    try:
        sol = lp.solve_general(obj, A_ge=p.h.A, b_ge=p.h.r, maximize=False)
    except lp.UnboundedError as exc:
        ray = _ray_from_split(exc.ray, p.dim) if exc.ray is not None else None
        return LPResult(-INF, ray=ray)
    return LPResult(sol.value, point=tuple(sol.x))


def _ray_from_split(ray: Sequence[Fraction], d: int) -> Vector:
    r = tuple(ray[2 * j] - ray[2 * j + 1] for j in range(d))
    iv = integerize(r) if any(r) else r
    return tuple(Fraction(x) for x in iv)


def lp_max(p: Polyhedron, objective: Sequence, **kw) -> LPResult:
    res = lp_min(p, [-Fraction(a) for a in objective], **kw)
    return LPResult(-res.value if res.bounded else INF, res.point, res.ray)


def lex_min(p: Polyhedron, objectives: Sequence[Sequence]) -> Vector:
    """Point of ``p`` minimizing the objectives lexicographically."""
    q = p
    for obj in objectives:
        res = lp_min(q, obj)
        if not res.bounded:
            raise lp.UnboundedError("lexicographic objective unbounded")
        obj = vec(obj)
        q = intersect(q, Polyhedron.from_h([obj, [-a for a in obj]], [res.value, -res.value], p.dim))
    return min(q.vertices)


# ---------------------------------------------------------------------------
# polyhedral convex functions


@dataclass(frozen=True)
class PolyFn:
    """A polyhedral convex function stored as its epigraph in R^(dim+1).

    The last coordinate of the epigraph is the function value.  An empty
    epigraph is the function that is identically +inf.
    """

    epi: Polyhedron
    dim: int

    def __post_init__(self):
        if self.epi.dim != self.dim + 1:
            raise DimensionError("epigraph must live in dimension dim + 1")

    def __call__(self, x: Sequence) -> Fraction | float:
        return polyfn_eval(self, x)

    def same_function(self, other: "PolyFn") -> bool:
        return self.dim == other.dim and self.epi.same_set(other.epi)

    def is_positively_homogeneous(self) -> bool:
        return self.epi.is_empty() or self.epi.is_cone()


def _upward(dim: int) -> Vector:
    return tuple(Fraction(0) for _ in range(dim)) + (Fraction(1),)


def polyfn_eval(f: PolyFn, x: Sequence) -> Fraction | float:
    x = vec(x)
    if len(x) != f.dim:
        raise DimensionError("evaluation point has the wrong length")
    if f.epi.is_empty():
        return INF
    rows = list(zip(f.epi.h.A, f.epi.h.r))
    if any(row[-1] < 0 for row, _ in rows):
        raise MalformedEpigraphError("epigraph recession cone lacks the upward direction")
    lower = None
    for row, rhs in rows:
        s = rhs - sum((a * b for a, b in zip(row[:-1], x)), ZERO)
        if row[-1] == 0:
            if s > 0:
                return INF
        else:
            val = s / row[-1]
            if lower is None or val > lower:
                lower = val
    if lower is None:
        return -INF
    return lower


def linear_fn(a: Sequence) -> PolyFn:
    """``x -> a.x`` on the whole space."""
    a = vec(a)
    d = len(a)
    return PolyFn(canonical_from_h(HPoly((tuple(-v for v in a) + (Fraction(1),),), (ZERO,), d + 1)), d)


def supfun_of_negated_set(p: Polyhedron) -> PolyFn:
    """``x -> sup{-x.z : z in p}``, the support function of ``-p``."""
    if p.is_empty():
        raise EmptySetError("support function of the empty set")
    d = p.dim
    rows = [tuple(v) + (Fraction(1),) for v in p.vertices]  # y + v.x >= 0
    rows += [tuple(r) + (ZERO,) for r in p.rays]  # r.x >= 0
    return PolyFn(canonical_from_h(HPoly(tuple(rows), (ZERO,) * len(rows), d + 1)), d)


def restrict_domain(f: PolyFn, c: Polyhedron) -> PolyFn:
    """``f`` on ``c``, +inf elsewhere (epigraph intersected with ``c x R``)."""
    if c.dim != f.dim:
        raise DimensionError("cone and function domain differ in dimension")
    lifted = HPoly(tuple(tuple(row) + (ZERO,) for row in c.h.A), c.h.r, f.dim + 1)
    return PolyFn(canonical_from_h(HPoly(f.epi.h.A + lifted.A, f.epi.h.r + lifted.r, f.dim + 1)), f.dim)


def polyfn_hull(fs: Sequence[PolyFn]) -> PolyFn:
    """Convex hull of finitely many positively homogeneous functions.

    For positively homogeneous functions the epigraphs are cones and the
    hull's epigraph is their Minkowski sum.
    """
    if not fs:
        raise ValueError("hull of an empty family")
    dims = {f.dim for f in fs}
    if len(dims) != 1:
        raise DimensionError("functions on different spaces")
    for f in fs:
        if not f.is_positively_homogeneous():
            raise ValueError("polyfn_hull expects positively homogeneous functions")
    return PolyFn(convex_hull_union([f.epi for f in fs]), fs[0].dim)


def epigraph_section(f: PolyFn, c: Sequence) -> Polyhedron:
    """``{(w_1..w_{q-1}, y) : (w, -y) in epi f, c.w = 1}`` with ``c_q = 1``."""
    c = vec(c)
    q = f.dim
    if len(c) != q or c[-1] != 1:
        raise ValueError("weight vector must have length q and last entry 1")
    # w_q = 1 - sum_{i<q} c_i w_i; the epigraph value coordinate is -y
    A, r = [], []
    for row, rhs in zip(f.epi.h.A, f.epi.h.r):
        a, aq, ay = row[: q - 1], row[q - 1], row[q]
        new = tuple(ai - aq * ci for ai, ci in zip(a, c[: q - 1])) + (-ay,)
        A.append(new)
        r.append(rhs - aq)
    return canonical_from_h(HPoly(tuple(A), tuple(r), q))
