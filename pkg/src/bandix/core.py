"""Band-matrix value types, the scalar field, and the instrumented kernels.

Matrices are stored as their diagonals only (5 arrays for pentadiagonal,
3 for tridiagonal); nothing in this module ever materialises an N x N
grid.  Two scalar modes share every algorithm:

* float mode  -- diagonals held as read-only ``numpy.float64`` arrays,
* exact mode  -- diagonals held as tuples of ``fractions.Fraction``
  (solvers may temporarily widen entries to rational functions in one
  indeterminate, see :mod:`bandix.exact`).

Solver code is written once against the scalar protocol
(``+ - * /``, ``abs``, comparison, and :func:`is_zero`); mode only
selects the container.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, InvalidInput

Scalar = Union[float, Fraction]
VectorLike = Sequence


def is_zero(x) -> bool:
    """Exact (structural) zero test, valid for every scalar mode."""
    return x == 0


def to_float(x) -> float:
    """Lossy conversion to a 64-bit float, for reporting only."""
    return float(x)


def to_exact(x) -> Fraction:
    """Lossless binary-float (or int) to rational conversion."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _freeze(values, exact: bool):
    if exact:
        return tuple(to_exact(v) for v in values)
    arr = np.asarray(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def _detect_exact(*diagonal_groups) -> bool:
    for group in diagonal_groups:
        for v in group:
            if isinstance(v, Fraction):
                return True
    return False


def as_vector(values, exact: bool):
    """Normalise a sequence into the storage used by the given mode."""
    return _freeze(values, exact)


@dataclass(frozen=True)
class OpCounter:
    """Scalar-operation tally for one solve.

    One increment per floating/rational add, sub, mul or div executed in
    the solver routine proper (factorisation plus substitutions for the
    direct methods, the iteration loop body for SIP).  Norms and report
    assembly are never counted.  Routines whose operation pattern is
    unconditional record their counts in closed form; routines that skip
    structurally-zero work count as they go.  Both styles are verified
    against a tracing-scalar recount in the test suite.
    """

    adds: int = 0
    subs: int = 0
    muls: int = 0
    divs: int = 0

    @property
    def total(self) -> int:
        return self.adds + self.subs + self.muls + self.divs

    def plus(self, adds=0, subs=0, muls=0, divs=0) -> "OpCounter":
        if min(adds, subs, muls, divs) < 0:
            raise ValueError("op counts cannot decrease")
        return OpCounter(self.adds + adds, self.subs + subs,
                         self.muls + muls, self.divs + divs)

    def merged(self, other: "OpCounter") -> "OpCounter":
        return self.plus(other.adds, other.subs, other.muls, other.divs)

    def as_dict(self) -> dict:
        return {"adds": self.adds, "subs": self.subs, "muls": self.muls,
                "divs": self.divs, "total": self.total}


class CounterBox:
    """Mutable holder threading an OpCounter through one solve."""

    __slots__ = ("counter",)

    def __init__(self):
        self.counter = OpCounter()

    def add(self, adds=0, subs=0, muls=0, divs=0):
        self.counter = self.counter.plus(adds, subs, muls, divs)


@dataclass(frozen=True)
class PentaMatrix:
    """Pentadiagonal matrix stored as five diagonals (offsets -2..+2).

    Array lengths are n-2, n-1, n, n-1, n-2; entries off the five
    diagonals are not representable.  n >= 3.
    """

    n: int
    sub2: Sequence
    sub1: Sequence
    main: Sequence
    sup1: Sequence
    sup2: Sequence
    exact: bool = field(default=False)

    @staticmethod
    def from_diagonals(sub2, sub1, main, sup1, sup2, exact=None) -> "PentaMatrix":
        n = len(main)
        if exact is None:
            exact = _detect_exact(sub2, sub1, main, sup1, sup2)
        return PentaMatrix(
            n,
            _freeze(sub2, exact), _freeze(sub1, exact), _freeze(main, exact),
            _freeze(sup1, exact), _freeze(sup2, exact),
            exact,
        )

    def __post_init__(self):
        if self.n < 3:
            raise InvalidInput(f"pentadiagonal semantics need n >= 3, got {self.n}")
        expected = (self.n - 2, self.n - 1, self.n, self.n - 1, self.n - 2)
        got = tuple(len(d) for d in
                    (self.sub2, self.sub1, self.main, self.sup1, self.sup2))
        if got != expected:
            raise InvalidInput(f"diagonal lengths {got} do not match n={self.n}")

    def diagonals(self):
        return self.sub2, self.sub1, self.main, self.sup1, self.sup2

    def to_dense(self) -> np.ndarray:
        """Dense copy, for oracles and small reports only."""
        a = np.zeros((self.n, self.n))
        for off, diag in zip((-2, -1, 0, 1, 2), self.diagonals()):
            for idx, v in enumerate(diag):
                i = idx - min(off, 0)
                a[i, i + off] = to_float(v)
        return a


@dataclass(frozen=True)
class TriMatrix:
    """Tridiagonal matrix stored as three diagonals (offsets -1..+1), n >= 2."""

    n: int
    sub1: Sequence
    main: Sequence
    sup1: Sequence
    exact: bool = field(default=False)

    @staticmethod
    def from_diagonals(sub1, main, sup1, exact=None) -> "TriMatrix":
        n = len(main)
        if exact is None:
            exact = _detect_exact(sub1, main, sup1)
        return TriMatrix(n, _freeze(sub1, exact), _freeze(main, exact),
                         _freeze(sup1, exact), exact)

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInput(f"tridiagonal semantics need n >= 2, got {self.n}")
        expected = (self.n - 1, self.n, self.n - 1)
        got = (len(self.sub1), len(self.main), len(self.sup1))
        if got != expected:
            raise InvalidInput(f"diagonal lengths {got} do not match n={self.n}")

    def diagonals(self):
        return self.sub1, self.main, self.sup1

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for off, diag in zip((-1, 0, 1), self.diagonals()):
            for idx, v in enumerate(diag):
                i = idx - min(off, 0)
                a[i, i + off] = to_float(v)
        return a


BandMatrix = Union[PentaMatrix, TriMatrix]


@dataclass(frozen=True)
class BandFactors:
    """Banded LU (or ILU(0)) factors.

    L is unit lower triangular; only its two subdiagonals are stored.
    U holds the pivots on ``u_main`` plus two superdiagonals.  The
    factorisation is usable only while every pivot is nonzero.
    """

    n: int
    l_sub1: Sequence
    l_sub2: Sequence
    u_main: Sequence
    u_sup1: Sequence
    u_sup2: Sequence
    exact: bool = field(default=False)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solve: iterations is 0 for the direct methods."""

    x: Sequence
    iterations: int
    residual_inf: float
    ops: OpCounter
    wall_seconds: float
    history: tuple = ()


def _check_length(n, v, what="vector"):
    if len(v) != n:
        raise DimensionMismatch(f"{what} has length {len(v)}, expected {n}")


def penta_matvec(a: PentaMatrix, x, counter: CounterBox | None = None):
    """Row-fused A @ x for pentadiagonal A: 5N-6 muls and 4N-6 adds."""
    n = a.n
    _check_length(n, x)
    if counter is not None:
        counter.add(muls=5 * n - 6, adds=4 * n - 6)
    if not a.exact:
        x = np.asarray(x, dtype=np.float64)
        out = a.main * x
        out[1:] += a.sub1 * x[:-1]
        out[:-1] += a.sup1 * x[1:]
        out[2:] += a.sub2 * x[:-2]
        out[:-2] += a.sup2 * x[2:]
        return out
    c, d, e, f, g = a.diagonals()
    out = []
    for i in range(n):
        acc = e[i] * x[i]
        if i >= 1:
            acc = acc + d[i - 1] * x[i - 1]
        if i >= 2:
            acc = acc + c[i - 2] * x[i - 2]
        if i <= n - 2:
            acc = acc + f[i] * x[i + 1]
        if i <= n - 3:
            acc = acc + g[i] * x[i + 2]
        out.append(acc)
    return tuple(out)


def tri_matvec(t: TriMatrix, x, counter: CounterBox | None = None):
    """Row-fused T @ x for tridiagonal T: 3N-2 muls and 2N-2 adds."""
    n = t.n
    _check_length(n, x)
    if counter is not None:
        counter.add(muls=3 * n - 2, adds=2 * n - 2)
    if not t.exact:
        x = np.asarray(x, dtype=np.float64)
        out = t.main * x
        out[1:] += t.sub1 * x[:-1]
        out[:-1] += t.sup1 * x[1:]
        return out
    d, e, f = t.diagonals()
    out = []
    for i in range(n):
        acc = e[i] * x[i]
        if i >= 1:
            acc = acc + d[i - 1] * x[i - 1]
        if i <= n - 2:
            acc = acc + f[i] * x[i + 1]
        out.append(acc)
    return tuple(out)


def matvec(a: BandMatrix, x, counter: CounterBox | None = None):
    if isinstance(a, PentaMatrix):
        return penta_matvec(a, x, counter)
    return tri_matvec(a, x, counter)


def inf_norm(v) -> float | Fraction:
    """Maximum absolute entry; the empty vector has norm 0."""
    if len(v) == 0:
        return 0
    if isinstance(v, np.ndarray):
        return float(np.max(np.abs(v)))
    return max(abs(e) for e in v)


def residual(a: BandMatrix, x, b, counter: CounterBox | None = None):
    """b - A @ x, entrywise."""
    _check_length(a.n, x)
    _check_length(a.n, b, "rhs")
    ax = matvec(a, x, counter)
    if counter is not None:
        counter.add(subs=a.n)
    if isinstance(ax, np.ndarray):
        return np.asarray(b, dtype=np.float64) - ax
    return tuple(bi - axi for bi, axi in zip(b, ax))


def outer_nonzero_count(a: PentaMatrix) -> int:
    """Rows with a structurally nonzero sub2 entry plus rows with a
    structurally nonzero sup2 entry (the sparsity parameter K).

    Always recomputed from the stored diagonals; "nonzero" is the exact
    zero test on the input data, never a magnitude threshold.
    """
    if not a.exact:
        return int(np.count_nonzero(a.sub2)) + int(np.count_nonzero(a.sup2))
    return sum(1 for v in a.sub2 if not is_zero(v)) + \
        sum(1 for v in a.sup2 if not is_zero(v))
