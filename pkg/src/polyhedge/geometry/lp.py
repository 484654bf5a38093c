"""Exact linear programming over the rationals.

The workhorse is a revised simplex method on the standard form
``max c.x  s.t.  A x = b, x >= 0``.  Every basis solve is an exact sparse
Gauss-Jordan elimination over ``gmpy2.mpq`` rationals (converted back to
:class:`fractions.Fraction` on the way out).  Pricing is
Dantzig's rule, switching to Bland's rule after any degenerate pivot, which
rules out cycling.

For larger problems a floating point solve (HiGHS via highspy) is used
to *guess* a starting basis.  The guess is only a warm start: the basis is
rebuilt and re-solved exactly, and the exact simplex continues from it (or
restarts from phase one when the guess is not primal feasible).  Reported
values never depend on floating point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

logger = logging.getLogger(__name__)

ZERO = mpq(0)
ONE = mpq(1)

# problems with more nonzeros than this get a floating point warm start
WARM_START_NNZ = 200


class LPError(ArithmeticError):
    pass


class InfeasibleError(LPError):
    """The feasible region is empty."""


class UnboundedError(LPError):
    """The objective is unbounded over the feasible region.

    ``ray`` is an improving direction of the standard-form variables.
    """

    def __init__(self, message: str, ray: Sequence[Fraction] | None = None):
        super().__init__(message)
        self.ray = ray


@dataclass
class LPSolution:
    value: Fraction
    x: list[Fraction]
    basis: list[int] = field(default_factory=list)
    iterations: int = 0


SparseCol = dict[int, Fraction]


def _solve(cols: Sequence[Mapping[int, Fraction]], rhs: Sequence[Fraction], m: int) -> list[Fraction]:
    """Solve ``B z = rhs`` where column k of the m x m matrix B is ``cols[k]``."""
    rows: list[dict[int, Fraction]] = [dict() for _ in range(m)]
    col_rows: list[set[int]] = [set() for _ in range(m)]
    for k, col in enumerate(cols):
        for i, val in col.items():
            if val:
                rows[i][k] = mpq(val)
                col_rows[k].add(i)
    b = [mpq(v) for v in rhs]
    assigned: dict[int, int] = {}  # column -> pivot row
    used_rows: set[int] = set()
    remaining = set(range(m))
    while remaining:
        # pick the column with fewest free candidate rows (cheap Markowitz)
        k = min(remaining, key=lambda c: (len(col_rows[c] - used_rows), c))
        remaining.discard(k)
        cands = col_rows[k] - used_rows
        if not cands:
            raise LPError("singular basis")
        i = min(cands, key=lambda r: (len(rows[r]), r))
        used_rows.add(i)
        assigned[k] = i
        prow = rows[i]
        piv = prow[k]
        for j in list(col_rows[k]):
            if j == i:
                continue
            row = rows[j]
            f = row[k] / piv
            for c, val in prow.items():
                nv = row.get(c, ZERO) - f * val
                if nv:
                    if c not in row:
                        col_rows[c].add(j)
                    row[c] = nv
                else:
                    if c in row:
                        del row[c]
                        col_rows[c].discard(j)
            b[j] -= f * b[i]
    return [b[assigned[k]] / rows[assigned[k]][k] for k in range(m)]


def _dotcol(y: Sequence[Fraction], col: Mapping[int, Fraction]) -> Fraction:
    return sum((y[i] * v for i, v in col.items()), ZERO)


def _simplex(cols: list[SparseCol], c: list[Fraction], b: list[Fraction], basis: list[int],
             m: int, allowed: int | None = None) -> tuple[list[int], list[Fraction], int]:
    """Primal simplex from a feasible basis; returns (basis, x_B, iterations).

    Only columns with index < ``allowed`` may enter.  The others must sit at
    zero; while basic they leave at the first pivot that would move them.
    """
    n = len(cols) if allowed is None else allowed
    it = 0
    bland = False
    while True:
        B = [cols[j] for j in basis]
        xB = _solve(B, b, m)
        rowsB = [dict() for _ in range(m)]
        for k, j in enumerate(basis):
            for i, v in cols[j].items():
                rowsB[i][k] = v
        y = _solve(rowsB, [c[j] for j in basis], m)
        inb = set(basis)
        enter = None
        best = ZERO
        for j in range(n):
            if j in inb:
                continue
            rc = c[j] - _dotcol(y, cols[j])
            if rc > 0:
                if bland:
                    enter = j
                    break
                if rc > best:
                    best, enter = rc, j
        if enter is None:
            return basis, xB, it
        d = _solve(B, [cols[enter].get(i, ZERO) for i in range(m)], m)
        leave = None
        ratio = None
        for k in range(m):
            if basis[k] >= n and d[k]:
                if ratio is None or ratio > 0 or basis[k] < basis[leave]:
                    ratio, leave = ZERO, k
            elif d[k] > 0:
                q = xB[k] / d[k]
                if ratio is None or q < ratio or (q == ratio and basis[k] < basis[leave]):
                    ratio, leave = q, k
        if leave is None:
            ray = {enter: ONE}
            for k, j in enumerate(basis):
                if d[k]:
                    ray[j] = -d[k]
            raise UnboundedError("objective unbounded", [_f(ray.get(j, ZERO)) for j in range(len(cols))])
        bland = ratio == 0
        basis = basis[:leave] + [enter] + basis[leave + 1:]
        it += 1


def _float_guess(cols, c, b, m) -> tuple[list[int], list[int]] | None:
    """Basic columns and basic rows of HiGHS's optimal basis, or None if HiGHS is unavailable or fails."""
    try:
        import highspy
        import numpy as np
    except ImportError:  # pragma: no cover
        return None
    n = len(cols)
    starts, index, value = [0], [], []
    for col in cols:
        for i, v in sorted(col.items()):
            index.append(i)
            value.append(float(v))
        starts.append(len(index))
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    inf = highspy.kHighsInf
    h.passModel(_highs_model(highspy, np, n, m, c, b, starts, index, value, inf))
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        return None
    basis = h.getBasis()
    basic = highspy.HighsBasisStatus.kBasic
    return ([j for j in range(n) if basis.col_status[j] == basic],
            [i for i in range(m) if basis.row_status[i] == basic])


def _highs_model(highspy, np, n, m, c, b, starts, index, value, inf):
    lp_ = highspy.HighsLp()
    lp_.num_col_ = n
    lp_.num_row_ = m
    lp_.sense_ = highspy.ObjSense.kMaximize
    lp_.col_cost_ = np.array([float(v) for v in c])
    lp_.col_lower_ = np.zeros(n)
    lp_.col_upper_ = np.full(n, inf)
    lp_.row_lower_ = np.array([float(v) for v in b])
    lp_.row_upper_ = np.array([float(v) for v in b])
    lp_.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp_.a_matrix_.start_ = np.array(starts, dtype=np.int32)
    lp_.a_matrix_.index_ = np.array(index, dtype=np.int32)
    lp_.a_matrix_.value_ = np.array(value)
    model = highspy.HighsModel()
    model.lp_ = lp_
    return model


def _certify(cols, c, b, m, basic_cols, basic_rows) -> "LPSolution | None":
    """Run the exact simplex from HiGHS's basis as it stands.

    Basic rows become unit columns pinned at zero.  Returns None when that
    basis is not exactly feasible, so the caller can fall back.
    """
    n = len(cols)
    if len(basic_cols) + len(basic_rows) != m:
        return None
    allc = cols + [{i: ONE} for i in basic_rows]
    basis = basic_cols + list(range(n, n + len(basic_rows)))
    try:
        xB = _solve([allc[j] for j in basis], b, m)
    except LPError:
        return None
    if any((v != 0) if j >= n else (v < 0) for j, v in zip(basis, xB)):
        return None
    basis, xB, it = _simplex(allc, c + [ZERO] * len(basic_rows), b, basis, m, allowed=n)
    return _pack(c, basis, xB, n, it)


def _complete_basis(cols: list[SparseCol], preferred: list[int], m: int) -> list[int] | None:
    """Extend independent columns from ``preferred`` (then all others) to m columns."""
    pivots: list[tuple[int, dict[int, Fraction]]] = []
    chosen: list[int] = []
    seen = set()
    for j in preferred + list(range(len(cols))):
        if j in seen:
            continue
        seen.add(j)
        v = dict(cols[j])
        for prow, pvec in pivots:
            f = v.get(prow)
            if f:
                f = f / pvec[prow]
                for i, val in pvec.items():
                    nv = v.get(i, ZERO) - f * val
                    if nv:
                        v[i] = nv
                    else:
                        v.pop(i, None)
        if not v:
            continue
        prow = min(v, key=lambda i: (v[i] == 0, i))
        pivots.append((prow, v))
        chosen.append(j)
        if len(chosen) == m:
            return chosen
    return None


def _repair(cols: list[SparseCol], b: list[Fraction], basis: list[int], m: int) -> tuple[list[int], int]:
    """Turn a nonsingular but slightly infeasible basis into a feasible one.

    Each basic column with a negative value is replaced by its negation as an
    artificial column; minimizing those artificials from there is a phase one
    that starts next to the optimum.  Raises InfeasibleError when it fails.
    """
    n = len(cols)
    xB = _solve([cols[j] for j in basis], b, m)
    neg = [k for k in range(m) if xB[k] < 0]
    if not neg:
        return basis, 0
    allc = list(cols)
    start = list(basis)
    for k in neg:
        start[k] = len(allc)
        allc.append({i: -v for i, v in cols[basis[k]].items()})
    c1 = [ZERO] * n + [-ONE] * len(neg)
    basis, xB, it = _simplex(allc, c1, b, start, m)
    if any(xB[k] for k, j in enumerate(basis) if j >= n):
        raise InfeasibleError("no feasible point")
    # all artificials are at zero; the real columns have rank m, so each can be pivoted out
    while True:
        pos = next((k for k, j in enumerate(basis) if j >= n), None)
        if pos is None:
            return basis, it
        rowsB = [dict() for _ in range(m)]
        for k, j in enumerate(basis):
            for i, v in allc[j].items():
                rowsB[i][k] = v
        rho = _solve(rowsB, [ONE if k == pos else ZERO for k in range(m)], m)
        inb = set(basis)
        basis[pos] = next(j for j in range(n) if j not in inb and _dotcol(rho, cols[j]) != 0)


def solve_standard(c: Sequence, A: Sequence[Mapping[int, Fraction]] | Sequence[Sequence], b: Sequence,
                   *, columns: bool = False, warm_start: bool | None = None) -> LPSolution:
    """Maximize ``c.x`` subject to ``A x = b``, ``x >= 0`` exactly.

    ``A`` is a dense list of rows, or, with ``columns=True``, a list of sparse
    columns ``{row_index: value}``.  Raises :class:`InfeasibleError` or
    :class:`UnboundedError`.
    """
    c = [_q(v) for v in c]
    b = [_q(v) for v in b]
    m = len(b)
    n = len(c)
    if columns:
        cols = [{i: _q(v) for i, v in col.items() if v} for col in A]
    else:
        cols = [dict() for _ in range(n)]
        for i, row in enumerate(A):
            for j, v in enumerate(row):
                if v:
                    cols[j][i] = _q(v)
    if len(cols) != n:
        raise ValueError("objective and constraint matrix disagree on the number of variables")
    if m == 0:
        if any(v > 0 for v in c):
            j = next(j for j, v in enumerate(c) if v > 0)
            raise UnboundedError("objective unbounded", [Fraction(int(k == j)) for k in range(n)])
        return LPSolution(Fraction(0), [Fraction(0)] * n)

    nnz = sum(len(col) for col in cols)
    if warm_start is None:
        warm_start = nnz > WARM_START_NNZ
    if warm_start:
        guess = _float_guess(cols, c, b, m)
        if guess is not None:
            sol = _certify(cols, c, b, m, *guess)
            if sol is not None:
                return sol
        basis = _complete_basis(cols, guess[0], m) if guess is not None else None
        if basis is not None:
            basis, it0 = _repair(cols, b, basis, m)
            basis, xB, it = _simplex(cols, c, b, basis, m)
            return _pack(c, basis, xB, n, it0 + it)
        logger.debug("no warm start basis; falling back to phase one")

    # phase one with one artificial per row
    flip = [v < 0 for v in b]
    b1 = [-v if f else v for v, f in zip(b, flip)]
    cols1 = [{i: (-v if flip[i] else v) for i, v in col.items()} for col in cols]
    art = [{i: ONE} for i in range(m)]
    allc = cols1 + art
    c1 = [ZERO] * n + [-ONE] * m
    basis = list(range(n, n + m))
    basis, xB, it1 = _simplex(allc, c1, b1, basis, m)
    infeas = sum((xB[k] for k, j in enumerate(basis) if j >= n), ZERO)
    if infeas > 0:
        raise InfeasibleError("no feasible point")

    # drive zero-level artificials out of the basis; drop redundant rows
    rows_kept = list(range(m))
    while True:
        pos = next((k for k, j in enumerate(basis) if j >= n), None)
        if pos is None:
            break
        mm = len(rows_kept)
        rowsB = [dict() for _ in range(mm)]
        for k, j in enumerate(basis):
            for i, v in allc[j].items():
                rowsB[i][k] = v
        e = [ONE if k == pos else ZERO for k in range(mm)]
        rho = _solve(rowsB, e, mm)
        inb = set(basis)
        repl = next((j for j in range(n) if j not in inb and _dotcol(rho, allc[j]) != 0), None)
        if repl is not None:
            basis[pos] = repl
            continue
        # row is redundant: remove it, renumber
        drop = allc[basis[pos]]
        (ri,) = drop.keys()
        keep_idx = [i for i in range(mm) if i != ri]
        remap = {old: new for new, old in enumerate(keep_idx)}
        allc = [{remap[i]: v for i, v in col.items() if i != ri} for col in allc]
        b1 = [b1[i] for i in keep_idx]
        rows_kept = [rows_kept[i] for i in keep_idx]
        basis = basis[:pos] + basis[pos + 1:]
    mm = len(rows_kept)
    cols2 = allc[:n]
    if mm == 0:
        if any(v > 0 for v in c):
            j = next(j for j, v in enumerate(c) if v > 0)
            raise UnboundedError("objective unbounded", [Fraction(int(k == j)) for k in range(n)])
        return LPSolution(Fraction(0), [Fraction(0)] * n, [], it1)
    basis, xB, it2 = _simplex(cols2, c, b1, basis, mm)
    return _pack(c, basis, xB, n, it1 + it2)


def _pack(c, basis, xB, n, it) -> LPSolution:
    x = [ZERO] * n
    for k, j in enumerate(basis):
        if j < n:
            x[j] = xB[k]
    value = sum((c[j] * x[j] for j in range(n)), ZERO)
    return LPSolution(_f(value), [_f(v) for v in x], list(basis), it)


def _q(v) -> mpq:
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


def _f(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def solve_general(c: Sequence, *, A_ge: Sequence[Sequence] = (), b_ge: Sequence = (),
                  A_eq: Sequence[Sequence] = (), b_eq: Sequence = (), free: bool = True,
                  maximize: bool = False) -> LPSolution:
    """Optimize ``c.x`` subject to ``A_ge x >= b_ge`` and ``A_eq x = b_eq``.

    Variables are free unless ``free=False`` (then ``x >= 0``).  The returned
    ``x`` is in the original variables; the value is in the requested sense.
    """
    c = [Fraction(v) for v in c]
    nv = len(c)
    sign = ONE if maximize else -ONE
    cols: list[dict[int, Fraction]] = []
    obj: list[Fraction] = []
    rows_ge = [[Fraction(v) for v in r] for r in A_ge]
    rows_eq = [[Fraction(v) for v in r] for r in A_eq]
    m = len(rows_ge) + len(rows_eq)
    allrows = rows_eq + rows_ge
    rhs = [Fraction(v) for v in b_eq] + [Fraction(v) for v in b_ge]
    for j in range(nv):
        col = {i: row[j] for i, row in enumerate(allrows) if row[j]}
        cols.append(col)
        obj.append(sign * c[j])
        if free:
            cols.append({i: -v for i, v in col.items()})
            obj.append(-sign * c[j])
    for k in range(len(rows_ge)):
        cols.append({len(rows_eq) + k: -ONE})
        obj.append(ZERO)
    sol = solve_standard(obj, cols, rhs, columns=True)
    step = 2 if free else 1
    x = []
    for j in range(nv):
        v = sol.x[step * j]
        if free:
            v -= sol.x[step * j + 1]
        x.append(v)
    value = sum((c[j] * x[j] for j in range(nv)), ZERO)
    return LPSolution(value, x, sol.basis, sol.iterations)
