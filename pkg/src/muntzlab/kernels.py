"""Hot numerical kernels.

Every polynomial is evaluated in the variable ``u = -ln t`` so that
``t**lam = exp(-lam*u)`` stays representable for exponents up to ~2**1000
and for ``t`` within 1e-300 of 1. Each kernel has a numba version and a
numpy reference (``*_np``); the public names point at whichever backend
:mod:`muntzlab._accel` selected.
"""
import math

import numpy as np

from ._accel import HAVE_NUMBA, njit

_CHUNK = 1 << 14


# --------------------------------------------------------------------------
# numpy reference implementations


def eval_u_np(lams, coefs, u):
    u = np.asarray(u, dtype=float)
    flat = u.ravel()
    out = np.empty(flat.shape[0])
    for s in range(0, flat.shape[0], _CHUNK):
        seg = flat[s:s + _CHUNK]
        out[s:s + _CHUNK] = np.exp(-np.multiply.outer(seg, lams)) @ coefs
    return out.reshape(u.shape)


def log_abs_eval_u_np(lams, coefs, u):
    u = np.asarray(u, dtype=float)
    flat = u.ravel()
    out = np.empty(flat.shape[0])
    loga = np.log(np.abs(coefs))
    sgn = np.sign(coefs)
    for s in range(0, flat.shape[0], _CHUNK):
        seg = flat[s:s + _CHUNK]
        expo = loga[None, :] - np.multiply.outer(seg, lams)
        top = expo.max(axis=1)
        tot = (sgn[None, :] * np.exp(expo - top[:, None])).sum(axis=1)
        with np.errstate(divide="ignore"):
            out[s:s + _CHUNK] = top + np.log(np.abs(tot))
    return out.reshape(u.shape)


def bisect_crossings_np(lams, coefs, lo, hi, level, iters):
    """Roots of ``|F(exp(v))| - level`` bracketed by ``[lo, hi]`` in ``v = ln u``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    glo = np.abs(eval_u_np(lams, coefs, np.exp(lo))) - level
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = np.abs(eval_u_np(lams, coefs, np.exp(mid))) - level
        same = np.sign(gm) == np.sign(glo)
        lo = np.where(same, mid, lo)
        glo = np.where(same, gm, glo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# numba implementations


@njit
def _eval_u_nb(lams, coefs, u):
    n = u.shape[0]
    m = lams.shape[0]
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        ui = u[i]
        for k in range(m):
            x = lams[k] * ui
            if x < 745.2:
                acc += coefs[k] * math.exp(-x)
        out[i] = acc
    return out


@njit
def _log_abs_eval_u_nb(lams, coefs, u):
    n = u.shape[0]
    m = lams.shape[0]
    out = np.empty(n)
    loga = np.empty(m)
    for k in range(m):
        loga[k] = math.log(abs(coefs[k]))
    for i in range(n):
        ui = u[i]
        top = -np.inf
        for k in range(m):
            e = loga[k] - lams[k] * ui
            if e > top:
                top = e
        acc = 0.0
        for k in range(m):
            e = loga[k] - lams[k] * ui - top
            if coefs[k] > 0:
                acc += math.exp(e)
            else:
                acc -= math.exp(e)
        if acc == 0.0:
            out[i] = -np.inf
        else:
            out[i] = top + math.log(abs(acc))
    return out


@njit
def _point_u_nb(lams, coefs, x):
    acc = 0.0
    for k in range(lams.shape[0]):
        y = lams[k] * x
        if y < 745.2:
            acc += coefs[k] * math.exp(-y)
    return acc


@njit
def _bisect_crossings_nb(lams, coefs, lo, hi, level, iters):
    n = lo.shape[0]
    out = np.empty(n)
    for j in range(n):
        a = lo[j]
        b = hi[j]
        ga = abs(_point_u_nb(lams, coefs, math.exp(a))) - level
        for _ in range(iters):
            mid = 0.5 * (a + b)
            gm = abs(_point_u_nb(lams, coefs, math.exp(mid))) - level
            if (gm > 0) == (ga > 0):
                a = mid
                ga = gm
            else:
                b = mid
        out[j] = 0.5 * (a + b)
    return out


def _eval_u_dispatch(lams, coefs, u):
    u = np.asarray(u, dtype=float)
    flat = np.ascontiguousarray(u.ravel())
    res = _eval_u_nb(np.ascontiguousarray(lams, dtype=float),
                     np.ascontiguousarray(coefs, dtype=float), flat)
    return res.reshape(u.shape)


def _log_abs_dispatch(lams, coefs, u):
    u = np.asarray(u, dtype=float)
    flat = np.ascontiguousarray(u.ravel())
    res = _log_abs_eval_u_nb(np.ascontiguousarray(lams, dtype=float),
                             np.ascontiguousarray(coefs, dtype=float), flat)
    return res.reshape(u.shape)


def _bisect_dispatch(lams, coefs, lo, hi, level, iters):
    return _bisect_crossings_nb(np.ascontiguousarray(lams, dtype=float),
                                np.ascontiguousarray(coefs, dtype=float),
                                np.ascontiguousarray(lo, dtype=float),
                                np.ascontiguousarray(hi, dtype=float),
                                float(level), int(iters))


if HAVE_NUMBA:
    eval_u = _eval_u_dispatch
    log_abs_eval_u = _log_abs_dispatch
    bisect_crossings = _bisect_dispatch
else:
    eval_u = eval_u_np
    log_abs_eval_u = log_abs_eval_u_np
    bisect_crossings = bisect_crossings_np
