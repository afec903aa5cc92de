"""Generic band-elimination sweeps shared by the direct and exact solvers.

Every routine here works on plain Python sequences of scalars (floats,
Fractions, or rational functions) so each algorithm exists exactly once;
callers choose the container and the zero-pivot policy.  ``fix(i, value)``
is invoked whenever a pivot is exactly zero: the direct solvers raise,
the exact solvers substitute the indeterminate.

Executed-operation counts per routine (verified by a tracing-scalar
recount in the tests):

* penta_factor:            muls 4N-7, subs 4N-7, divs 2N-3
* penta_forward:           muls 2N-3, subs 2N-3
* penta_backward:          muls 2N-3, subs 2N-3, divs N
* tri_factor_recip:        muls 2N-2, subs  N-1, divs N
* tri_solve_recip:         muls 3N-2, subs 2N-2
* mnpdm_sweep:             13N-15 total, plus 7 per nonzero sub2 entry
"""

from __future__ import annotations

from .core import is_zero
from .errors import ZeroPivot


def raise_zero_pivot(index, value):
    raise ZeroPivot(index)


def penta_factor(c, d, e, f, g, fix):
    """Doolittle factorisation restricted to the pentadiagonal band.

    Returns row-aligned lists (mu, l1, l2, phi, psi); l1[0], l2[0..1]
    and the trailing phi/psi slots stay None (structurally absent).
    """
    n = len(e)
    mu = [None] * n
    l1 = [None] * n
    l2 = [None] * n
    phi = [None] * n
    psi = [None] * n
    mu[0] = e[0] if not is_zero(e[0]) else fix(0, e[0])
    phi[0] = f[0]
    psi[0] = g[0]
    l1[1] = d[0] / mu[0]
    m1 = e[1] - l1[1] * phi[0]
    mu[1] = m1 if not is_zero(m1) else fix(1, m1)
    phi[1] = f[1] - l1[1] * psi[0]
    if n >= 4:
        psi[1] = g[1]
    for i in range(2, n):
        li2 = c[i - 2] / mu[i - 2]
        li1 = (d[i - 1] - li2 * phi[i - 2]) / mu[i - 1]
        mi = e[i] - li2 * psi[i - 2] - li1 * phi[i - 1]
        l2[i] = li2
        l1[i] = li1
        mu[i] = mi if not is_zero(mi) else fix(i, mi)
        if i <= n - 2:
            phi[i] = f[i] - li1 * psi[i - 1]
        if i <= n - 3:
            psi[i] = g[i]
    return mu, l1, l2, phi, psi


def penta_forward(l1, l2, rhs):
    """Unit-lower solve L y = rhs with two subdiagonals."""
    n = len(rhs)
    y = [None] * n
    y[0] = rhs[0]
    y[1] = rhs[1] - l1[1] * y[0]
    for i in range(2, n):
        y[i] = rhs[i] - l1[i] * y[i - 1] - l2[i] * y[i - 2]
    return y


def penta_backward(mu, phi, psi, y):
    """Upper solve U x = y with pivots mu and two superdiagonals."""
    n = len(y)
    x = [None] * n
    for i in range(n):
        if is_zero(mu[i]):
            raise ZeroPivot(i)
    x[n - 1] = y[n - 1] / mu[n - 1]
    x[n - 2] = (y[n - 2] - phi[n - 2] * x[n - 1]) / mu[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (y[i] - phi[i] * x[i + 1] - psi[i] * x[i + 2]) / mu[i]
    return x


def tri_factor_recip(d, e, f, fix):
    """Thomas factor sweep with reciprocal-normalised pivots.

    Each pivot is divided by up to twice (next multiplier, back
    substitution); computing the reciprocal once and multiplying trades
    those divisions for cheaper multiplications.
    """
    n = len(e)
    mu = [None] * n
    rec = [None] * n
    low = [None] * n
    mu[0] = e[0] if not is_zero(e[0]) else fix(0, e[0])
    rec[0] = 1 / mu[0]
    for i in range(1, n):
        li = d[i - 1] * rec[i - 1]
        mi = e[i] - li * f[i - 1]
        low[i] = li
        mu[i] = mi if not is_zero(mi) else fix(i, mi)
        rec[i] = 1 / mu[i]
    return mu, rec, low


def tri_solve_recip(rec, low, f, b):
    n = len(b)
    y = [None] * n
    y[0] = b[0]
    for i in range(1, n):
        y[i] = b[i] - low[i] * y[i - 1]
    x = [None] * n
    x[n - 1] = y[n - 1] * rec[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (y[i] - f[i] * x[i + 1]) * rec[i]
    return x


def mnpdm_sweep(c, d, e, f, g, b, fix):
    """Sparsity-aware pentadiagonal solve.

    Reciprocal-normalised Doolittle elimination that skips every
    multiplier term tied to a structurally zero sub2 entry; the upper
    diagonals are swept branch-free (zero sup2 entries are multiplied
    as stored), so the executed-op total is 13N-15 + 7 per nonzero sub2
    entry regardless of sup2 content.

    Returns (x, nonzero_sub2_rows).
    """
    n = len(e)
    rec = [None] * n
    l1 = [None] * n
    l2 = [None] * n
    phi = [None] * n
    psi = [None] * n
    nz = 0
    m0 = e[0] if not is_zero(e[0]) else fix(0, e[0])
    rec[0] = 1 / m0
    phi[0] = f[0]
    psi[0] = g[0]
    l1[1] = d[0] * rec[0]
    m1 = e[1] - l1[1] * phi[0]
    if is_zero(m1):
        m1 = fix(1, m1)
    rec[1] = 1 / m1
    phi[1] = f[1] - l1[1] * psi[0]
    if n >= 4:
        psi[1] = g[1]
    for i in range(2, n):
        ci = c[i - 2]
        if is_zero(ci):
            li2 = None
            ti = d[i - 1]
        else:
            nz += 1
            li2 = ci * rec[i - 2]
            ti = d[i - 1] - li2 * phi[i - 2]
        li1 = ti * rec[i - 1]
        mi = e[i] - li1 * phi[i - 1]
        if li2 is not None:
            mi = mi - li2 * psi[i - 2]
        if is_zero(mi):
            mi = fix(i, mi)
        l2[i] = li2
        l1[i] = li1
        rec[i] = 1 / mi
        if i <= n - 2:
            phi[i] = f[i] - li1 * psi[i - 1]
        if i <= n - 3:
            psi[i] = g[i]
    y = [None] * n
    y[0] = b[0]
    y[1] = b[1] - l1[1] * y[0]
    for i in range(2, n):
        yi = b[i] - l1[i] * y[i - 1]
        if l2[i] is not None:
            yi = yi - l2[i] * y[i - 2]
        y[i] = yi
    x = [None] * n
    x[n - 1] = y[n - 1] * rec[n - 1]
    x[n - 2] = (y[n - 2] - phi[n - 2] * x[n - 1]) * rec[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (y[i] - phi[i] * x[i + 1] - psi[i] * x[i + 2]) * rec[i]
    return x, nz
