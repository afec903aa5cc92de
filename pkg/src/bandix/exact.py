"""Exact-arithmetic solvers: rational elimination with indeterminate pivots.

The direct band eliminations require every pivot to be nonzero.  The
exact counterparts lift that restriction to plain nonsingularity: when a
pivot comes out exactly zero, it is replaced by the indeterminate ``t``,
elimination continues over univariate rational functions in ``t`` with
rational coefficients, and the solution entries are evaluated in the
limit ``t -> 0`` (which exists whenever the matrix is nonsingular).  One
shared indeterminate suffices for any number of substituted pivots.

Inputs must already be exact; convert floats losslessly with
:func:`bandix.core.to_exact` so rounding error is never laundered into
an "exact" answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._elim import penta_factor, tri_factor_recip, tri_solve_recip
from .core import CounterBox, PentaMatrix, TriMatrix
from .errors import InvalidInput, SingularMatrix

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _ptrim(coeffs):
    i = len(coeffs)
    while i > 1 and coeffs[i - 1] == 0:
        i -= 1
    return tuple(coeffs[:i])


def _padd(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    return _ptrim(out)


def _pneg(p):
    return tuple(-c for c in p)


def _pmul(p, q):
    if p == (_ZERO,) or q == (_ZERO,):
        return (_ZERO,)
    out = [_ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _ptrim(out)


def _pdivmod(p, q):
    rem = list(p)
    quot = [_ZERO] * max(len(p) - len(q) + 1, 1)
    dq = len(q) - 1
    lead = q[-1]
    for k in range(len(p) - len(q), -1, -1):
        c = rem[k + dq] / lead
        quot[k] = c
        if c != 0:
            for j, b in enumerate(q):
                rem[k + j] -= c * b
    return _ptrim(quot), _ptrim(rem)


def _pgcd(p, q):
    a, b = _ptrim(p), _ptrim(q)
    while b != (_ZERO,):
        _, r = _pdivmod(a, b)
        a, b = b, r
    if a == (_ZERO,):
        return (_ONE,)
    lead = a[-1]
    return tuple(c / lead for c in a)


class RatFunc:
    """Univariate rational function p(t)/q(t) over exact rationals.

    Kept canonical after every operation: gcd-reduced with a monic
    denominator.  Plain rationals are the degree-zero case; mixed
    arithmetic with ``int`` and ``Fraction`` coerces automatically.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=(_ONE,), _canonical=False):
        if not isinstance(num, tuple):
            num = tuple(Fraction(c) for c in num)
        if not isinstance(den, tuple):
            den = tuple(Fraction(c) for c in den)
        if _canonical:
            self.num, self.den = num, den
            return
        den = _ptrim(den)
        num = _ptrim(num)
        if den == (_ZERO,):
            raise ZeroDivisionError("rational function with zero denominator")
        if num == (_ZERO,):
            self.num, self.den = (_ZERO,), (_ONE,)
            return
        g = _pgcd(num, den)
        if g != (_ONE,):
            num, _ = _pdivmod(num, g)
            den, _ = _pdivmod(den, g)
        lead = den[-1]
        if lead != 1:
            num = tuple(c / lead for c in num)
            den = tuple(c / lead for c in den)
        self.num, self.den = num, den

    @staticmethod
    def _coerce(value):
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, (int, Fraction)):
            return RatFunc((Fraction(value),), (_ONE,), _canonical=True)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFunc(_padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
                       _pmul(self.den, o.den))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFunc(_padd(_pmul(self.num, o.den), _pneg(_pmul(o.num, self.den))),
                       _pmul(self.den, o.den))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFunc(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num == (_ZERO,):
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(_pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o.__truediv__(self)

    def __neg__(self):
        return RatFunc(_pneg(self.num), self.den, _canonical=True)

    def __abs__(self):
        if self.num[-1] < 0:
            return -self
        return self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return self.num != (_ZERO,)

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"

    def is_constant(self) -> bool:
        return len(self.num) == 1 and len(self.den) == 1

    def at_zero(self) -> Fraction:
        """Value (= limit, by canonicity) at t = 0."""
        if self.den[0] == 0:
            raise SingularMatrix("rational function has a pole at t = 0")
        return self.num[0] / self.den[0]


#: the shared pivot indeterminate t
T = RatFunc((_ZERO, _ONE), (_ONE,), _canonical=True)


def lift_limit(value) -> Fraction:
    if isinstance(value, RatFunc):
        return value.at_zero()
    return Fraction(value)


@dataclass(frozen=True)
class ExactSolveResult:
    """Exact solution plus the number of zero pivots replaced by t."""

    x: tuple
    pivot_substitutions: int


class _Substituter:
    """Pivot policy: swap exact zeros for the indeterminate t."""

    def __init__(self):
        self.count = 0

    def __call__(self, index, value):
        self.count += 1
        return T


def _require_exact(matrix):
    if not matrix.exact:
        raise InvalidInput(
            "exact solvers take rational input; convert floats explicitly "
            "with bandix.core.to_exact")


def _penta_substitute_solve(mu, l1, l2, phi, psi, b):
    n = len(mu)
    y = [None] * n
    y[0] = b[0]
    y[1] = b[1] - l1[1] * y[0]
    for i in range(2, n):
        y[i] = b[i] - l1[i] * y[i - 1] - l2[i] * y[i - 2]
    x = [None] * n
    x[n - 1] = y[n - 1] / mu[n - 1]
    x[n - 2] = (y[n - 2] - phi[n - 2] * x[n - 1]) / mu[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (y[i] - phi[i] * x[i + 1] - psi[i] * x[i + 2]) / mu[i]
    return x


def exact_det_band(a, counter: CounterBox | None = None) -> Fraction:
    """Exact determinant of a band matrix in O(N) scalar operations.

    Band elimination with indeterminate-pivot substitution; the
    determinant is the product of the pivots, evaluated at t -> 0.
    Zero is a valid return (and the nonsingularity test is det != 0).
    """
    _require_exact(a)
    fix = _Substituter()
    n = a.n
    if isinstance(a, PentaMatrix):
        mu, _, _, _, _ = penta_factor(*a.diagonals(), fix)
        if counter is not None:
            counter.add(muls=4 * n - 7 + (n - 1), subs=4 * n - 7, divs=2 * n - 3)
    else:
        mu, _, _ = tri_factor_recip(*a.diagonals(), fix)
        if counter is not None:
            counter.add(muls=2 * n - 2 + (n - 1), subs=n - 1, divs=n)
    det = mu[0]
    for p in mu[1:]:
        det = det * p
    return lift_limit(det)


def exact_solve_spdm(a: PentaMatrix, b) -> ExactSolveResult:
    """Symbolic pentadiagonal solve: exact answer, nonsingularity only.

    Raises SingularMatrix when the exact determinant is zero; otherwise
    the returned residual is exactly the zero vector.
    """
    _require_exact(a)
    if a.n != len(b):
        raise InvalidInput(f"rhs length {len(b)} does not match n={a.n}")
    if exact_det_band(a) == 0:
        raise SingularMatrix("pentadiagonal matrix has zero determinant")
    fix = _Substituter()
    mu, l1, l2, phi, psi = penta_factor(*a.diagonals(), fix)
    rhs = [Fraction(v) if not isinstance(v, Fraction) else v for v in b]
    x = _penta_substitute_solve(mu, l1, l2, phi, psi, rhs)
    return ExactSolveResult(tuple(lift_limit(v) for v in x), fix.count)


def exact_solve_stdm(t: TriMatrix, b) -> ExactSolveResult:
    """Symbolic tridiagonal solve; contract as for exact_solve_spdm."""
    _require_exact(t)
    if t.n != len(b):
        raise InvalidInput(f"rhs length {len(b)} does not match n={t.n}")
    if exact_det_band(t) == 0:
        raise SingularMatrix("tridiagonal matrix has zero determinant")
    fix = _Substituter()
    mu, rec, low = tri_factor_recip(*t.diagonals(), fix)
    rhs = [Fraction(v) if not isinstance(v, Fraction) else v for v in b]
    x = tri_solve_recip(rec, low, t.sup1, rhs)
    return ExactSolveResult(tuple(lift_limit(v) for v in x), fix.count)
