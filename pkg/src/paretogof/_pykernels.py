"""Pure numpy implementation of the hot Stein-Laplace kernels.

Mirrors ``_ckernels.pyx`` function for function; used when the compiled
extension is unavailable or ``PARETOGOF_PURE_PYTHON=1`` is set.  Every
function takes a 2-D float64 array with one sample per row and returns one
statistic per row.
"""
from __future__ import annotations

import math

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_LOG4 = 2.0 * math.log(2.0)
S_TOL = 1e-10
LOGT_TOL = 1e-9
# log-t search window: [T_LOW / max(x), T_HIGH]
T_LOW = 1e-4
T_HIGH = 60.0


def _alphas(X):
    sum_log = np.log(X).sum(axis=1)
    with np.errstate(divide="ignore"):
        return X.shape[1] / sum_log


def ds1_batch(X):
    X = np.asarray(X, dtype=float)
    a = _alphas(X)
    return (a + 1.0) * np.mean(np.log(X) / X, axis=1) - np.mean(1.0 / X, axis=1)


def ds3_batch(X):
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    a = _alphas(X)
    out = np.empty(X.shape[0])
    for r, x in enumerate(X):
        L = np.log1p(x)
        S = x[:, None] + x[None, :]
        lS = np.log(S)
        num = S * lS - (x * L)[:, None] - (x * L)[None, :] - L[:, None] - L[None, :] + _LOG4
        sa = np.sum(num / np.outer(x, x))
        sb = np.sum((lS - L[None, :]) / x[:, None])
        sd = np.sum(1.0 / S)
        ap1 = a[r] + 1.0
        out[r] = (ap1 * ap1 * sa - 2.0 * ap1 * sb + sd) / (n * n)
    return out


def _d_values_t(t, x, coef, eps):
    """Departure D at t >= 0 (t = inf gives 0); the t -> 0 limit once t * max(x) < eps."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = x.size
    out = np.zeros(t.shape)
    finite = np.isfinite(t)
    near = finite & (t * x.max() < eps)
    out[near] = coef * np.sum((x - 1.0) / x) - 1.0
    mid = finite & ~near
    tt = t[mid]
    if tt.size:
        em1 = np.expm1(-np.outer(tt, x - 1.0))          # s**(x-1) - 1
        ss = np.exp(-tt)[:, None]
        stein = np.sum(-(ss * em1) / x, axis=1) / tt     # sum (s - s**x)/(x * t)
        lap = np.sum(ss * (1.0 + em1), axis=1) / n       # mean s**x
        out[mid] = coef * stein - lap
    return out


def _d_values(s, x, coef, eps):
    """Departure D(s) = coef * sum(phi/(a+1)) - mean(s**x) for an array of s."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    with np.errstate(divide="ignore"):
        t = np.where(s > 0.0, -np.log(np.where(s > 0.0, s, 1.0)), np.inf)
    return _d_values_t(t, x, coef, eps)


def _golden_max(f, lo, hi, iters, tol=S_TOL):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    best = max(fc, fd)
    for _ in range(iters):
        if hi - lo < tol:
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
        best = max(best, fc, fd)
    return best


def ds2_batch(X, grid_points=256, refine_iterations=60, eps=1e-10, log_t=True, top=3):
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    a = _alphas(X)
    out = np.empty(X.shape[0])
    for r, x in enumerate(X):
        coef = (a[r] + 1.0) / n
        if log_t:
            z0, z1, tol = math.log(T_LOW / x.max()), math.log(T_HIGH), LOGT_TOL
            ev = lambda z: np.abs(_d_values_t(np.exp(z), x, coef, eps))
        else:
            z0, z1, tol = 0.0, 1.0, S_TOL
            ev = lambda z: np.abs(_d_values(z, x, coef, eps))
        grid = np.linspace(z0, z1, int(grid_points))
        h = grid[1] - grid[0]
        g = ev(grid)
        best = float(g.max())
        if log_t:
            best = max(best, float(abs(_d_values_t(0.0, x, coef, eps)[0])))
        if refine_iterations > 0:
            f = lambda z: float(ev(z)[0])
            for k in np.argsort(-g, kind="stable")[:top]:
                lo = max(grid[k] - h, z0)
                hi = min(grid[k] + h, z1)
                best = max(best, _golden_max(f, lo, hi, refine_iterations, tol))
        out[r] = best
    return out


def departure_batch(s, X, eps=1e-10):
    """D(s) for every row of X at the points s (shape (rows, len(s)))."""
    X = np.asarray(X, dtype=float)
    a = _alphas(X)
    n = X.shape[1]
    return np.stack([_d_values(s, x, (a[r] + 1.0) / n, eps) for r, x in enumerate(X)])
