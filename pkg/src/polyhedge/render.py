"""Lossless and human-readable renderings of rationals, polyhedra and functions."""

from __future__ import annotations

import math
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .geometry import Polyhedron, PolyFn


def rat(x: Fraction) -> str:
    """``"p/q"`` (or ``"p"`` for integers); parses back with ``Fraction``."""
    return str(Fraction(x))


def dec(x: Fraction, digits: int = 3) -> str:
    """Decimal rendering with ``digits`` places, rounding half to even."""
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = max(50, digits + 30)
        d = Decimal(x.numerator) / Decimal(x.denominator)
        out = d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN)
    if out.is_zero():
        out = abs(out)
    return f"{out:f}"


def vec_rat(v: Sequence[Fraction]) -> list[str]:
    return [rat(a) for a in v]


def vec_dec(v: Sequence[Fraction], digits: int) -> list[str]:
    return [dec(a, digits) for a in v]


def scalar(x: Fraction, digits: int) -> dict:
    return {"exact": rat(x), "decimal": dec(x, digits)}


def polyhedron(p: Polyhedron, digits: int) -> dict:
    """Both representations, each list in sorted order."""
    verts = sorted(p.vertices)
    rays = sorted(p.rays)
    rows = sorted(zip(p.h.A, p.h.r))
    return {
        "dim": p.dim,
        "vertices": [vec_rat(v) for v in verts],
        "rays": [vec_rat(r) for r in rays],
        "vertices_decimal": [vec_dec(v, digits) for v in verts],
        "inequalities": {"A": [vec_rat(a) for a, _ in rows], "r": [rat(b) for _, b in rows]},
    }


def parse_polyhedron(d: dict) -> Polyhedron:
    return Polyhedron.from_v(
        [[Fraction(a) for a in v] for v in d["vertices"]],
        [[Fraction(a) for a in r] for r in d["rays"]],
        d["dim"],
    )


def polyfn(f: PolyFn, digits: int) -> dict:
    return {"dim": f.dim, "epigraph": polyhedron(f.epi, digits)}


# ---------------------------------------------------------------------------
# OFF export of three-dimensional boundaries


def off(p: Polyhedron, pad: Fraction = Fraction(1)) -> str:
    """Boundary of a 3-D polyhedron as an OFF mesh.

    Unbounded sets are clipped to the bounding box of their vertices grown by
    ``pad`` in every direction and along every ray.
    """
    if p.dim != 3:
        raise ValueError("OFF export needs a three-dimensional set")
    if p.is_empty():
        return "OFF\n0 0 0\n"
    box = _clip_box(p, Fraction(pad))
    q = Polyhedron.from_h(list(p.h.A) + box[0], list(p.h.r) + box[1], 3)
    verts = sorted(q.vertices)
    faces = []
    for a, b in sorted(zip(q.h.A, q.h.r)):
        on = [k for k, v in enumerate(verts) if sum(x * y for x, y in zip(a, v)) == b]
        if len(on) >= 3:
            faces.append(_cyclic(on, verts, a))
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    lines += [" ".join(f"{float(x):.12g}" for x in v) for v in verts]
    lines += [" ".join(str(i) for i in [len(f)] + f) for f in faces]
    return "\n".join(lines) + "\n"


def _clip_box(p: Polyhedron, pad: Fraction):
    pts = list(p.vertices)
    for v in p.vertices:
        for r in p.rays:
            scale = max(abs(x) for x in r)
            pts.append(tuple(a + pad * b / scale for a, b in zip(v, r)))
    A, r = [], []
    for i in range(3):
        lo = min(v[i] for v in pts) - pad
        hi = max(v[i] for v in pts) + pad
        e = tuple(Fraction(int(k == i)) for k in range(3))
        A += [e, tuple(-x for x in e)]
        r += [lo, -hi]
    return A, r


def _cyclic(idx: list[int], verts, normal) -> list[int]:
    """Order facet vertices counter-clockwise around the outward normal."""
    pts = [[float(x) for x in verts[k]] for k in idx]
    cx = [sum(p[i] for p in pts) / len(pts) for i in range(3)]
    n = [-float(x) for x in normal]  # rows point inward
    # a basis (u, w) of the facet plane
    ref = [1.0, 0.0, 0.0] if abs(n[0]) < 0.9 * max(abs(x) for x in n) else [0.0, 1.0, 0.0]
    u = _cross(n, ref)
    w = _cross(n, u)
    ang = [math.atan2(_dot3(_sub(p, cx), w), _dot3(_sub(p, cx), u)) for p in pts]
    return [k for _, k in sorted(zip(ang, idx))]


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def _dot3(a, b):
    return sum(x * y for x, y in zip(a, b))


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]
