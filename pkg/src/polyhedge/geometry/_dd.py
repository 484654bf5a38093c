"""Integer double description method for homogeneous cones.

Everything in here works on tuples of Python ints.  Callers scale rational
data to primitive integer vectors first; the combination step
``(a.p) q - (a.q) p`` stays integral and is reduced by its gcd, so no
fractions ever appear inside the inner loop.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

IntVec = tuple[int, ...]


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def primitive(v: Iterable[int]) -> IntVec:
    v = tuple(v)
    g = 0
    for x in v:
        g = gcd(g, x)
    if g <= 1:
        return v
    return tuple(x // g for x in v)


def integerize(v: Iterable[Fraction | int]) -> IntVec:
    """Positive multiple of a rational vector that is a primitive integer vector."""
    v = [Fraction(x) for x in v]
    m = 1
    for x in v:
        m = lcm(m, x.denominator)
    return primitive(int(x * m) for x in v)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def dd_cone(rows: Sequence[IntVec], n: int) -> tuple[list[IntVec], list[IntVec]]:
    """Generators of the cone ``{y in R^n : a.y >= 0 for every row a}``.

    Returns ``(lineality, rays)``: a basis of the lineality space and the
    extreme rays of the pointed part, each as a primitive integer vector.
    Rows are inserted in the order given.
    """
    lin: list[IntVec] = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    rays: list[IntVec] = []
    zs: list[int] = []  # bitset of processed rows tight at each ray
    done = 0

    for idx, a in enumerate(rows):
        bit = 1 << idx
        pivot = None
        for k, l in enumerate(lin):
            s = dot(a, l)
            if s != 0:
                pivot = k
                break

        if pivot is not None:
            l0 = lin[pivot]
            s0 = dot(a, l0)
            if s0 < 0:
                l0 = tuple(-x for x in l0)
                s0 = -s0
            new_lin = []
            for k, l in enumerate(lin):
                if k == pivot:
                    continue
                s = dot(a, l)
                if s:
                    l = primitive(s0 * x - s * y for x, y in zip(l, l0))
                new_lin.append(l)
            new_rays = []
            for r, z in zip(rays, zs):
                s = dot(a, r)
                if s:
                    r = primitive(s0 * x - s * y for x, y in zip(r, l0))
                new_rays.append(r)
            lin = new_lin
            rays = new_rays + [l0]
            zs = [z | bit for z in zs] + [done]
            done |= bit
            continue

        vals = [dot(a, r) for r in rays]
        pos = [i for i, s in enumerate(vals) if s > 0]
        neg = [i for i, s in enumerate(vals) if s < 0]
        if not neg:
            zs = [z | bit if vals[i] == 0 else z for i, z in enumerate(zs)]
            done |= bit
            continue

        # Adjacent pairs need at least (pointed dimension - 2) common tight rows.
        need = n - len(lin) - 2
        created: list[IntVec] = []
        created_z: list[int] = []
        for i in pos:
            zi = zs[i]
            for j in neg:
                common = zi & zs[j]
                if _popcount(common) < need:
                    continue
                adjacent = True
                for k, zk in enumerate(zs):
                    if k != i and k != j and common & zk == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                p, q = rays[i], rays[j]
                sp, sq = vals[i], vals[j]
                created.append(primitive(sp * y - sq * x for x, y in zip(p, q)))
                created_z.append(common | bit)

        keep = [i for i, s in enumerate(vals) if s >= 0]
        rays = [rays[i] for i in keep] + created
        zs = [zs[i] | bit if vals[i] == 0 else zs[i] for i in keep] + created_z
        done |= bit

    return lin, rays
