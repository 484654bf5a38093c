"""Exact convex polyhedra over the rationals.

A :class:`Polyhedron` carries an H-representation ``{x : A x >= r}``, a
V-representation ``conv(V) + cone(R)``, or both.  Conversions use the integer
double description method in :mod:`polyhedge.geometry._dd`; every set
operation finishes with a full round trip so both representations come out
irredundant and in a deterministic order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._dd import dd_cone, dot, integerize, primitive

Vector = tuple[Fraction, ...]


class DimensionError(ValueError):
    pass


def vec(values: Iterable) -> Vector:
    return tuple(Fraction(x) for x in values)


def _unit(i: int, n: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


@dataclass(frozen=True)
class HPoly:
    """``{x in R^dim : A x >= r}``.  Zero rows means the whole space."""

    A: tuple[Vector, ...]
    r: Vector
    dim: int

    def __post_init__(self):
        if len(self.A) != len(self.r):
            raise DimensionError("A and r have different row counts")
        for row in self.A:
            if len(row) != self.dim:
                raise DimensionError(f"row of length {len(row)} in dimension {self.dim}")


@dataclass(frozen=True)
class VPoly:
    """``conv(vertices) + cone(rays)``; empty iff there are no vertices."""

    vertices: tuple[Vector, ...]
    rays: tuple[Vector, ...]
    dim: int

    def __post_init__(self):
        for v in self.vertices + self.rays:
            if len(v) != self.dim:
                raise DimensionError(f"generator of length {len(v)} in dimension {self.dim}")


def _canon_ray(r: Sequence) -> Vector | None:
    iv = integerize(r)
    if not any(iv):
        return None
    return tuple(Fraction(x) for x in iv)


def _h_to_v(h: HPoly) -> VPoly:
    n = h.dim
    rows = [integerize(tuple(a) + (-b,)) for a, b in zip(h.A, h.r)]
    rows = sorted(set(rows))
    rows.insert(0, _unit(n, n + 1))  # homogenizing coordinate t >= 0
    lin, rays = dd_cone(rows, n + 1)
    gens = list(rays)
    for l in lin:
        gens.append(l)
        gens.append(tuple(-x for x in l))
    vertices, directions = set(), set()
    for g in gens:
        t = g[n]
        if t > 0:
            vertices.add(tuple(Fraction(x, t) for x in g[:n]))
        elif t == 0:
            directions.add(primitive(g[:n]))
    if not vertices:
        return VPoly((), (), n)
    rays_out = tuple(sorted(tuple(Fraction(x) for x in d) for d in directions if any(d)))
    return VPoly(tuple(sorted(vertices)), rays_out, n)


def _v_to_h(v: VPoly) -> HPoly:
    n = v.dim
    if not v.vertices:
        return HPoly((tuple(Fraction(0) for _ in range(n)),), (Fraction(1),), n)
    gens = {integerize(tuple(x) + (1,)) for x in v.vertices}
    gens |= {integerize(tuple(r) + (0,)) for r in v.rays if any(r)}
    lin, rays = dd_cone(sorted(gens), n + 1)
    normals = list(rays)
    for l in lin:
        normals.append(l)
        normals.append(tuple(-x for x in l))
    rows = set()
    for g in normals:
        a, s = g[:n], g[n]
        if not any(a):
            continue  # only the trivial 0 >= -s with s >= 0 can appear here
        rows.add(primitive(g))
    rows = sorted(rows)
    A = tuple(tuple(Fraction(x) for x in g[:n]) for g in rows)
    r = tuple(Fraction(-g[n]) for g in rows)
    return HPoly(A, r, n)


class Polyhedron:
    """A convex polyhedron with lazily completed representations.

    Instances are immutable values; the missing representation is computed
    on first access and cached.
    """

    __slots__ = ("dim", "_h", "_v")

    def __init__(self, dim: int, h: HPoly | None = None, v: VPoly | None = None):
        if h is None and v is None:
            raise ValueError("a polyhedron needs at least one representation")
        for rep in (h, v):
            if rep is not None and rep.dim != dim:
                raise DimensionError(f"representation of dimension {rep.dim}, expected {dim}")
        self.dim = dim
        self._h = h
        self._v = v

    # construction -----------------------------------------------------

    @classmethod
    def from_h(cls, A: Iterable[Iterable], r: Iterable, dim: int | None = None) -> "Polyhedron":
        A = tuple(vec(row) for row in A)
        r = vec(r)
        if dim is None:
            if not A:
                raise ValueError("dimension required for an empty constraint list")
            dim = len(A[0])
        return cls(dim, h=HPoly(A, r, dim))

    @classmethod
    def from_v(cls, vertices: Iterable[Iterable], rays: Iterable[Iterable] = (), dim: int | None = None) -> "Polyhedron":
        vertices = tuple(vec(x) for x in vertices)
        rays = tuple(vec(x) for x in rays)
        if dim is None:
            if vertices:
                dim = len(vertices[0])
            elif rays:
                dim = len(rays[0])
            else:
                raise ValueError("dimension required for an empty generator list")
        return cls(dim, v=VPoly(vertices, rays, dim))

    @classmethod
    def cone(cls, rays: Iterable[Iterable], dim: int | None = None) -> "Polyhedron":
        rays = [vec(x) for x in rays]
        if dim is None:
            dim = len(rays[0])
        return cls.from_v([(0,) * dim], rays, dim)

    @classmethod
    def empty(cls, dim: int) -> "Polyhedron":
        return cls(dim, h=_v_to_h(VPoly((), (), dim)), v=VPoly((), (), dim))

    @classmethod
    def universe(cls, dim: int) -> "Polyhedron":
        return cls.from_h((), (), dim)

    @classmethod
    def point(cls, x: Iterable) -> "Polyhedron":
        return cls.from_v([x])

    # representations --------------------------------------------------

    @property
    def h(self) -> HPoly:
        if self._h is None:
            self._h = _v_to_h(self._v)
        return self._h

    @property
    def v(self) -> VPoly:
        if self._v is None:
            self._v = _h_to_v(self._h)
        return self._v

    @property
    def vertices(self) -> tuple[Vector, ...]:
        return self.v.vertices

    @property
    def rays(self) -> tuple[Vector, ...]:
        return self.v.rays

    @property
    def has_h(self) -> bool:
        return self._h is not None

    @property
    def has_v(self) -> bool:
        return self._v is not None

    def is_empty(self) -> bool:
        return not self.v.vertices

    def is_bounded(self) -> bool:
        return not self.v.rays

    def is_cone(self) -> bool:
        zero = tuple(Fraction(0) for _ in range(self.dim))
        return self.v.vertices == (zero,)

    # comparisons -------------------------------------------------------

    def contains_point(self, x: Sequence) -> bool:
        if len(x) != self.dim:
            raise DimensionError(f"point of length {len(x)} in dimension {self.dim}")
        return all(sum(a * xi for a, xi in zip(row, x)) >= b for row, b in zip(self.h.A, self.h.r))

    def contains_direction(self, d: Sequence) -> bool:
        """True iff ``d`` lies in the recession cone (assuming nonempty)."""
        return all(sum(a * di for a, di in zip(row, d)) >= 0 for row in self.h.A)

    def issubset(self, other: "Polyhedron") -> bool:
        _check_dims(self, other)
        if self.is_empty():
            return True
        if other.is_empty():
            return False
        return all(other.contains_point(x) for x in self.vertices) and all(
            other.contains_direction(r) for r in self.rays
        )

    def same_set(self, other: "Polyhedron") -> bool:
        return self.issubset(other) and other.issubset(self)

    def __eq__(self, other):
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return self.dim == other.dim and self.same_set(other)

    __hash__ = None

    def __repr__(self):
        if self.has_v:
            return f"Polyhedron(dim={self.dim}, vertices={len(self.v.vertices)}, rays={len(self.v.rays)})"
        return f"Polyhedron(dim={self.dim}, inequalities={len(self.h.A)})"


def _check_dims(*ps: Polyhedron) -> None:
    dims = {p.dim for p in ps}
    if len(dims) > 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")


def canonical_from_h(h: HPoly) -> Polyhedron:
    v = _h_to_v(h)
    return Polyhedron(h.dim, h=_v_to_h(v), v=v)


def canonical_from_v(v: VPoly) -> Polyhedron:
    h = _v_to_h(v)
    return Polyhedron(v.dim, h=h, v=_h_to_v(h))


def dd_convert(p: Polyhedron) -> Polyhedron:
    """Both representations, irredundant and canonically ordered."""
    if p.has_h and p.has_v:
        return p
    if p.has_h:
        return canonical_from_h(p.h)
    return canonical_from_v(p.v)


def canonical(p: Polyhedron) -> Polyhedron:
    """Full round trip from whichever representation is present."""
    if p.has_h:
        return canonical_from_h(p.h)
    return canonical_from_v(p.v)
