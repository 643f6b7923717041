"""Adaptive Gauss-Legendre integration in ``v = ln u``, ``u = -ln t``.

In ``v`` the boundary layer of ``t**lam`` at ``t = 1`` (width ~1/lam) and
any power singularity of the weight there both become smooth, so one
composite rule resolves exponents spread over many orders of magnitude.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import AccuracyError

ORDER = 16
_X, _W = leggauss(ORDER)


def panel_nodes(a, b):
    """GL nodes/weights on each panel ``[a_i, b_i]``; arrays of shape (n, ORDER)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return mid[:, None] + half[:, None] * _X[None, :], half[:, None] * _W[None, :]


def integrate_v(func, v_lo: float, v_hi: float, rel_tol: float = 1e-11,
                panel_width: float = 1.0, abs_tol: float = 0.0,
                max_panels: int = 200_000, max_rounds: int = 60):
    """Integrate a vectorized ``func(v)`` over ``[v_lo, v_hi]``.

    Each panel is compared with its two halves; panels whose difference is
    within their width-proportional share of the tolerance are frozen, the
    rest are split. Returns ``(value, error_estimate)``.
    """
    if v_hi <= v_lo:
        return 0.0, 0.0
    span = v_hi - v_lo
    n0 = max(1, int(math.ceil(span / panel_width)))
    edges = np.linspace(v_lo, v_hi, n0 + 1)
    a, b = edges[:-1], edges[1:]
    x, w = panel_nodes(a, b)
    coarse = (func(x.ravel()).reshape(x.shape) * w).sum(axis=1)
    done_val = 0.0
    done_err = 0.0
    for _ in range(max_rounds):
        m = 0.5 * (a + b)
        xl, wl = panel_nodes(a, m)
        xr, wr = panel_nodes(m, b)
        both = func(np.concatenate([xl.ravel(), xr.ravel()]))
        n = a.size * ORDER
        left = (both[:n].reshape(xl.shape) * wl).sum(axis=1)
        right = (both[n:].reshape(xr.shape) * wr).sum(axis=1)
        fine = left + right
        err = np.abs(fine - coarse)
        total = done_val + fine.sum()
        tol = max(rel_tol * abs(total), abs_tol)
        if done_err + err.sum() <= tol:
            return float(total), float(done_err + err.sum())
        accept = err <= tol * (b - a) / span
        done_val += fine[accept].sum()
        done_err += err[accept].sum()
        keep = ~accept
        a, m, b = a[keep], m[keep], b[keep]
        left, right = left[keep], right[keep]
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        coarse = np.concatenate([left, right])
        if a.size > max_panels:
            break
    est = done_val + coarse.sum()
    raise AccuracyError(f"adaptive quadrature stopped at relative error "
                        f"{(done_err + 0.0) / max(abs(est), 1e-300):.3g}",
                        estimate=float(est), error=float(done_err))


def fixed_rule(v_lo: float, v_hi: float, panel_width: float = 0.25):
    """Non-adaptive composite rule, flattened nodes and weights in ``v``."""
    n = max(1, int(math.ceil((v_hi - v_lo) / panel_width)))
    edges = np.linspace(v_lo, v_hi, n + 1)
    x, w = panel_nodes(edges[:-1], edges[1:])
    return x.ravel(), w.ravel()
