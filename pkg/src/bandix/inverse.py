"""Iterative inversion of the triangular factors and the SIP variant
that replaces the substitutions with multiplication by those inverses.

The recurrence X <- X (2I - M X) squares the residual I - M X each
step, so for a triangular M with the reciprocal-diagonal initial guess
the residual is nilpotent and the dense iteration terminates exactly
within ceil(log2 N) + 2 sweeps.

Two realisations:

* dense  -- N x N arrays; memory-bound, refused above a configurable cap;
* banded -- every product truncated to a fixed set of diagonals
  (w + 1 arrays of length about N), so storage stays O(w N).  A
  truncated inverse generally cannot push the true residual below the
  tolerance; the iteration then reports stagnation and the SIP outer
  loop owns final accuracy.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import (CounterBox, PentaMatrix, SolveReport, as_vector, inf_norm,
                   to_float)
from .errors import (DenseCapExceeded, DimensionMismatch, Diverged,
                     InvalidInput, MaxIterationsExceeded, Stagnated,
                     ZeroDiagonal)
from .iterative import (SipConfig, _sweep_apply, _vec_add, _vec_sub,
                        defect_matrix, ilu0_penta)

DenseMatrix = np.ndarray

_STAGNATION_WINDOW = 3
_STAGNATION_FACTOR = 0.99


@dataclass(frozen=True)
class BandedApproxInverse:
    """Triangular band approximation to an inverse: offsets 0..w on one side."""

    n: int
    side: str               # "lower" or "upper"
    diags: tuple            # diags[j] has length n - j, offset -j or +j
    w: int

    def matvec(self, v, counter: CounterBox | None = None):
        v = np.asarray(v, dtype=np.float64)
        out = self.diags[0] * v
        if counter is not None:
            muls = sum(self.n - j for j in range(self.w + 1))
            counter.add(muls=muls, adds=muls - self.n)
        for j in range(1, self.w + 1):
            if self.side == "lower":
                out[j:] += self.diags[j] * v[:self.n - j]
            else:
                out[:self.n - j] += self.diags[j] * v[j:]
        return out


@dataclass(frozen=True)
class InversionReport:
    inverse: object
    iterations: int
    residual_inf: float
    residual_history: tuple = ()


def dense_lower_factor(factors) -> np.ndarray:
    """Unit-lower L as a dense array (test/dense-mode support only)."""
    n = factors.n
    m = np.eye(n)
    m[np.arange(1, n), np.arange(n - 1)] = np.asarray(factors.l_sub1)
    m[np.arange(2, n), np.arange(n - 2)] = np.asarray(factors.l_sub2)
    return m


def dense_upper_factor(factors) -> np.ndarray:
    n = factors.n
    m = np.zeros((n, n))
    m[np.arange(n), np.arange(n)] = np.asarray(factors.u_main)
    m[np.arange(n - 1), np.arange(1, n)] = np.asarray(factors.u_sup1)
    m[np.arange(n - 2), np.arange(2, n)] = np.asarray(factors.u_sup2)
    return m


def _matrix_inf_norm(m: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(m), axis=1))) if m.size else 0.0


def hb_invert_dense(m: DenseMatrix, tol: float = 1e-12,
                    max_iter: int = 200) -> InversionReport:
    """Quadratically convergent inversion X <- X (2I - M X).

    The initial guess is the reciprocal of the diagonal; iteration stops
    when the induced infinity norm of I - M X drops below tol.
    """
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise InvalidInput("dense inversion needs a square matrix")
    diag = np.diagonal(m)
    zero_rows = np.nonzero(diag == 0.0)[0]
    if zero_rows.size:
        raise ZeroDiagonal(int(zero_rows[0]))
    x = np.diag(1.0 / diag)
    eye = np.eye(n)
    history = []
    for iteration in range(max_iter + 1):
        p = m @ x
        r_norm = _matrix_inf_norm(eye - p)
        history.append(r_norm)
        if r_norm < tol:
            return InversionReport(x, iteration, r_norm, tuple(history))
        x = x @ (2.0 * eye - p)
    raise MaxIterationsExceeded(x, history[-1], max_iter)


def _band_mul_tri(a_diags, b_diags, n, w_out, side):
    """Product of two same-side triangular band matrices, truncated to
    offsets 0..w_out.  O(w^2 N) and never allocates an N x N array."""
    p = len(a_diags) - 1
    q = len(b_diags) - 1
    out = []
    for r in range(w_out + 1):
        res = np.zeros(n - r)
        for j in range(max(0, r - q), min(p, r) + 1):
            l = r - j
            if side == "lower":
                res += a_diags[j][l:l + (n - r)] * b_diags[l][:n - r]
            else:
                res += a_diags[j][:n - r] * b_diags[l][j:j + (n - r)]
        out.append(res)
    return out


def _band_residual_norm(p_diags) -> float:
    r = float(np.max(np.abs(1.0 - p_diags[0])))
    for d in p_diags[1:]:
        if d.size:
            r = max(r, float(np.max(np.abs(d))))
    return r


def hb_invert_banded(factors, side: str, w: int = 2, tol: float = 1e-12,
                     max_iter: int = 200) -> InversionReport:
    """Band-truncated Hotelling-Bodewig sweep for one triangular factor.

    Every product is truncated to the stored offsets 0..w, so auxiliary
    storage is O(w N).  Termination: band-restricted residual below tol,
    or Stagnated (improvement under 1% across 3 iterations while still
    above tol; the exception carries the best approximation found).
    """
    if w < 2:
        raise InvalidInput("banded inversion needs bandwidth w >= 2")
    n = factors.n
    if side == "lower":
        m_diags = (np.ones(n), np.asarray(factors.l_sub1, dtype=np.float64),
                   np.asarray(factors.l_sub2, dtype=np.float64))
        x0 = np.ones(n)
    elif side == "upper":
        diag = np.asarray(factors.u_main, dtype=np.float64)
        zero_rows = np.nonzero(diag == 0.0)[0]
        if zero_rows.size:
            raise ZeroDiagonal(int(zero_rows[0]))
        m_diags = (diag, np.asarray(factors.u_sup1, dtype=np.float64),
                   np.asarray(factors.u_sup2, dtype=np.float64))
        x0 = 1.0 / diag
    else:
        raise InvalidInput(f"unknown side {side!r}")
    x = [x0] + [np.zeros(n - j) for j in range(1, w + 1)]
    history = []
    best = None
    for iteration in range(max_iter + 1):
        p = _band_mul_tri(m_diags, x, n, w, side)
        r_norm = _band_residual_norm(p)
        history.append(r_norm)
        report = InversionReport(
            BandedApproxInverse(n, side, tuple(x), w), iteration, r_norm,
            tuple(history))
        if best is None or r_norm < best.residual_inf:
            best = report
        if r_norm < tol:
            return report
        if (len(history) > _STAGNATION_WINDOW
                and r_norm > _STAGNATION_FACTOR
                * history[-1 - _STAGNATION_WINDOW]):
            raise Stagnated(best)
        s = [-d for d in p]
        s[0] = 2.0 + s[0]
        x = _band_mul_tri(x, s, n, w, side)
    raise MaxIterationsExceeded(best.inverse, history[-1], max_iter)


def _dense_apply(inv: np.ndarray, v, counter: CounterBox | None = None):
    if counter is not None:
        n = inv.shape[0]
        counter.add(muls=n * n, adds=n * (n - 1))
    return inv @ np.asarray(v, dtype=np.float64)


def sip_hb_solve(a: PentaMatrix, b, cfg: SipConfig | None = None,
                 mode: str = "dense", hb_bandwidth: int | None = None,
                 dense_cap: int = 8000,
                 record_history: bool = False) -> SolveReport:
    """SIP with the triangular substitutions replaced by multiplication
    with precomputed (approximate) inverses of the ILU(0) factors.

    Dense mode refuses n above dense_cap (the full inverses are N x N).
    Banded mode stores O(w N): with hb_bandwidth=None the band is
    widened (from 2, doubling) until the truncated inversion itself
    reaches the tolerance, which keeps the outer loop's fixed point at
    the true solution; an explicit bandwidth is honoured as given, in
    which case a stagnated approximation is accepted and the outer loop
    may legitimately fail to reach the tolerance.
    """
    cfg = cfg or SipConfig()
    if a.exact:
        raise InvalidInput("sip_hb_solve operates on float matrices")
    if len(b) != a.n:
        raise DimensionMismatch(f"rhs length {len(b)}, expected {a.n}")
    if mode not in ("dense", "banded"):
        raise InvalidInput(f"unknown mode {mode!r}")
    t_start = time.perf_counter()
    factors = ilu0_penta(a)
    defect = defect_matrix(factors, a).matrix

    if mode == "dense":
        if a.n > dense_cap:
            raise DenseCapExceeded(a.n, dense_cap)
        l_inv = hb_invert_dense(dense_lower_factor(factors), cfg.tolerance).inverse
        u_inv = hb_invert_dense(dense_upper_factor(factors), cfg.tolerance).inverse

        def apply_l(v, box):
            return _dense_apply(l_inv, v, box)

        def apply_u(v, box):
            return _dense_apply(u_inv, v, box)
    else:
        def _banded_inverse(side):
            if hb_bandwidth is not None:
                # fixed bandwidth: accept a stagnated approximation and
                # let the outer loop try to make up the difference
                try:
                    return hb_invert_banded(factors, side, hb_bandwidth,
                                            cfg.tolerance).inverse
                except Stagnated as stalled:
                    return stalled.report.inverse
            # auto mode: widen the band until the truncated iteration
            # genuinely reaches the tolerance, so the composite map has
            # the true solution as its fixed point
            w = 2
            while True:
                try:
                    return hb_invert_banded(factors, side, w,
                                            cfg.tolerance).inverse
                except Stagnated as stalled:
                    if w >= a.n - 1:
                        return stalled.report.inverse
                    w = min(2 * w, a.n - 1)

        l_inv = _banded_inverse("lower")
        u_inv = _banded_inverse("upper")

        def apply_l(v, box):
            return l_inv.matvec(v, box)

        def apply_u(v, box):
            return u_inv.matvec(v, box)

    x = (np.asarray(cfg.initial_guess, dtype=np.float64)
         if cfg.initial_guess is not None else np.zeros(a.n))
    res = _vec_sub(b, _sweep_apply(a, x))
    r_norm = to_float(inf_norm(res))
    r_initial = r_norm

    box = CounterBox()
    history = []
    k = 0
    best_x, best_norm = x, r_norm
    while r_norm >= cfg.tolerance:
        if k >= cfg.max_iterations:
            raise MaxIterationsExceeded(best_x, best_norm, k)
        new_rhs = _vec_add(_sweep_apply(defect, x, box), b, box)
        y = apply_l(new_rhs, box)
        x = apply_u(y, box)
        res = _vec_sub(b, _sweep_apply(a, x, box), box)
        r_norm = to_float(inf_norm(res))
        k += 1
        if record_history:
            history.append((k, r_norm))
        if r_norm < best_norm:
            best_x, best_norm = x, r_norm
        if r_initial > 0 and r_norm > 1e6 * r_initial:
            raise Diverged(r_norm, k)
    wall = time.perf_counter() - t_start
    return SolveReport(x=as_vector(x, False), iterations=k,
                       residual_inf=r_norm, ops=box.counter,
                       wall_seconds=wall, history=tuple(history))
