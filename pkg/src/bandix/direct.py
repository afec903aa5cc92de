"""Direct band solvers: banded LU (NPDM), its sparsity-aware variant
(MNPDM), the Thomas method (NTDM), and the penta-to-tri reduction.

No pivoting anywhere: row exchanges would destroy the band, so an
exactly zero pivot is an error path and the exact solvers are the
documented fallback.  Executed-operation totals are exact affine
functions of the dimension (and, for MNPDM, of the input's outer
sparsity):

* NPDM   19N - 29
* MNPDM  13N - 15 + 7 per structurally nonzero sub2 entry
* NTDM    9N -  7
* pd_to_td  7 ops per eliminated outer entry (9 when the pivot row
  still carries a sup2 entry), bounded by 18 + 16K
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np

from ._elim import (mnpdm_sweep, penta_backward, penta_factor, penta_forward,
                    raise_zero_pivot, tri_factor_recip, tri_solve_recip)
from .core import (BandFactors, CounterBox, OpCounter, PentaMatrix,
                   SolveReport, TriMatrix, as_vector, inf_norm, is_zero,
                   residual, to_float)
from .errors import DimensionMismatch, ReductionPivotZero
from .iterative import backward_sub, forward_sub


def _to_list(seq):
    return seq.tolist() if isinstance(seq, np.ndarray) else list(seq)


def _check_rhs(n, b):
    if len(b) != n:
        raise DimensionMismatch(f"rhs length {len(b)}, expected {n}")


def lu_penta(a: PentaMatrix, counter: CounterBox | None = None) -> BandFactors:
    """Doolittle factorisation restricted to the band: 10N-17 ops.

    L is unit lower (offsets -1, -2), U upper (offsets 0, +1, +2); a
    contiguous band produces no fill, so L @ U reconstructs A exactly.
    Raises ZeroPivot(i) when a pivot comes out exactly zero.
    """
    c, d, e, f, g = (_to_list(x) for x in a.diagonals())
    n = a.n
    mu, l1, l2, phi, psi = penta_factor(c, d, e, f, g, raise_zero_pivot)
    if counter is not None:
        counter.add(muls=4 * n - 7, subs=4 * n - 7, divs=2 * n - 3)
    zero = Fraction(0) if a.exact else 0.0
    return BandFactors(
        n,
        as_vector(l1[1:], a.exact),
        as_vector(l2[2:], a.exact),
        as_vector(mu, a.exact),
        as_vector([v if v is not None else zero for v in phi[:n - 1]], a.exact),
        as_vector([v if v is not None else zero for v in psi[:n - 2]], a.exact),
        a.exact,
    )


def _finish_report(a, x, b, box, t_start):
    wall = time.perf_counter() - t_start
    res_inf = to_float(inf_norm(residual(a, x, b)))
    return SolveReport(x=x, iterations=0, residual_inf=res_inf,
                       ops=box.counter, wall_seconds=wall)


def solve_npdm(a: PentaMatrix, b) -> SolveReport:
    """Pentadiagonal solve via banded LU plus substitutions: 19N-29 ops."""
    _check_rhs(a.n, b)
    t0 = time.perf_counter()
    box = CounterBox()
    factors = lu_penta(a, box)
    y = forward_sub(factors, b, box)
    x = backward_sub(factors, y, box)
    return _finish_report(a, x, b, box, t0)


def solve_mnpdm(a: PentaMatrix, b) -> SolveReport:
    """Sparsity-aware pentadiagonal solve: 13N-15 + 7*nz(sub2) ops.

    Identical solution contract to solve_npdm; rows whose sub2 entry is
    structurally zero skip all multiplier work tied to that entry.  The
    superdiagonal sweep is branch-free, so only sub2 sparsity changes
    the count (the benchmark's sparse-outer family places its K outer
    nonzeros there).
    """
    _check_rhs(a.n, b)
    t0 = time.perf_counter()
    n = a.n
    c, d, e, f, g = (_to_list(v) for v in a.diagonals())
    x, nz = mnpdm_sweep(c, d, e, f, g, _to_list(b), raise_zero_pivot)
    box = CounterBox()
    box.add(muls=7 * n - 8 + 4 * nz, subs=5 * n - 7 + 3 * nz, divs=n)
    return _finish_report(a, as_vector(x, a.exact), b, box, t0)


def solve_ntdm(t: TriMatrix, b) -> SolveReport:
    """Thomas solve with reciprocal-normalised pivots: 9N-7 ops."""
    _check_rhs(t.n, b)
    t0 = time.perf_counter()
    n = t.n
    d, e, f = (_to_list(v) for v in t.diagonals())
    _, rec, low = tri_factor_recip(d, e, f, raise_zero_pivot)
    x = tri_solve_recip(rec, low, f, _to_list(b))
    box = CounterBox()
    box.add(muls=5 * n - 4, subs=3 * n - 3, divs=n)
    return _finish_report(t, as_vector(x, t.exact), b, box, t0)


def pd_to_td(a: PentaMatrix, b):
    """Gaussian reduction of a pentadiagonal system to a tridiagonal one.

    Nonzero sub2 entries are eliminated in ascending row order against
    the neighbouring row above, then nonzero sup2 entries in descending
    order against the row below; each elimination touches only rows that
    are already in their final shape, so the counter never exceeds
    18 + 16K.  Returns (TriMatrix, new_rhs, OpCounter).

    Raises ReductionPivotZero(i) when the required neighbour pivot is
    exactly zero (fall back to solve_npdm or the exact solver).
    """
    _check_rhs(a.n, b)
    c, d, e, f, g = (_to_list(v) for v in a.diagonals())
    rhs = _to_list(b)
    n = a.n
    zero = Fraction(0) if a.exact else 0.0
    box = CounterBox()
    for i in range(2, n):
        ci = c[i - 2]
        if is_zero(ci):
            continue
        pivot = d[i - 2]
        if is_zero(pivot):
            raise ReductionPivotZero(i)
        m = ci / pivot
        d[i - 1] = d[i - 1] - m * e[i - 1]
        e[i] = e[i] - m * f[i - 1]
        box.add(divs=1, muls=2, subs=2)
        gi_above = g[i - 1] if i - 1 <= n - 3 else zero
        if not is_zero(gi_above):
            f[i] = f[i] - m * gi_above
            box.add(muls=1, subs=1)
        rhs[i] = rhs[i] - m * rhs[i - 1]
        box.add(muls=1, subs=1)
        c[i - 2] = zero
    for i in range(n - 3, -1, -1):
        gi = g[i]
        if is_zero(gi):
            continue
        pivot = f[i + 1]
        if is_zero(pivot):
            raise ReductionPivotZero(i)
        m = gi / pivot
        e[i] = e[i] - m * d[i]
        f[i] = f[i] - m * e[i + 1]
        rhs[i] = rhs[i] - m * rhs[i + 1]
        box.add(divs=1, muls=3, subs=3)
        g[i] = zero
    reduced = TriMatrix.from_diagonals(d, e, f, exact=a.exact)
    return reduced, as_vector(rhs, a.exact), box.counter


def solve_pd2td_ntdm(a: PentaMatrix, b) -> SolveReport:
    """Reduce to tridiagonal, then solve with the Thomas method."""
    t0 = time.perf_counter()
    reduced, rhs, reduction_ops = pd_to_td(a, b)
    report = solve_ntdm(reduced, rhs)
    wall = time.perf_counter() - t0
    res_inf = to_float(inf_norm(residual(a, report.x, b)))
    return SolveReport(x=report.x, iterations=0, residual_inf=res_inf,
                       ops=reduction_ops.merged(report.ops), wall_seconds=wall)
