"""Müntz polynomials ``sum a_k t^{lam_k}`` with exponents up to ~2**1000."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, UndefinedConstantError, UnknownExponentError
from .exponents import BlockPartition

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class MuntzPolynomial:
    """Immutable term list; like exponents are merged and zero terms dropped."""

    exponents: np.ndarray
    coefs: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.exponents, dtype=float).ravel()
        a = np.asarray(self.coefs, dtype=float).ravel()
        if lam.shape != a.shape:
            raise DomainError("exponents and coefficients differ in length")
        if lam.size and (np.any(lam <= 0) or not np.all(np.isfinite(lam))):
            raise DomainError("exponents must be finite and positive")
        if not np.all(np.isfinite(a)):
            raise DomainError("coefficients must be finite")
        if lam.size:
            order = np.argsort(lam, kind="stable")
            lam, a = lam[order], a[order]
            uniq, start = np.unique(lam, return_index=True)
            if uniq.size != lam.size:
                a = np.add.reduceat(a, start)
                lam = uniq
            keep = a != 0.0
            lam, a = lam[keep], a[keep]
        lam.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "exponents", lam)
        object.__setattr__(self, "coefs", a)

    @classmethod
    def from_terms(cls, terms) -> "MuntzPolynomial":
        terms = list(terms)
        if not terms:
            return cls.zero()
        lam, a = zip(*terms)
        return cls(np.array(lam, dtype=float), np.array(a, dtype=float))

    @classmethod
    def monomial(cls, lam: float, coef: float = 1.0) -> "MuntzPolynomial":
        return cls(np.array([lam]), np.array([coef]))

    @classmethod
    def zero(cls) -> "MuntzPolynomial":
        return cls(np.zeros(0), np.zeros(0))

    @property
    def terms(self) -> list[tuple[float, float]]:
        return list(zip(self.exponents.tolist(), self.coefs.tolist()))

    @property
    def is_zero(self) -> bool:
        return self.exponents.size == 0

    def __len__(self):
        return self.exponents.size

    def __eq__(self, other):
        return (isinstance(other, MuntzPolynomial)
                and np.array_equal(self.exponents, other.exponents)
                and np.array_equal(self.coefs, other.coefs))

    def __hash__(self):
        return hash((self.exponents.tobytes(), self.coefs.tobytes()))

    def __add__(self, other):
        if not isinstance(other, MuntzPolynomial):
            return NotImplemented
        return MuntzPolynomial(np.concatenate([self.exponents, other.exponents]),
                               np.concatenate([self.coefs, other.coefs]))

    def __neg__(self):
        return MuntzPolynomial(self.exponents, -self.coefs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, MuntzPolynomial):
            raise TypeError("products of Müntz polynomials leave the span")
        return MuntzPolynomial(self.exponents, float(c) * self.coefs)

    __rmul__ = __mul__

    def __call__(self, t):
        return evaluate(self, t)

    def at_u(self, u):
        """Values at ``t = exp(-u)``."""
        if self.is_zero:
            return np.zeros(np.shape(u))
        return kernels.eval_u(self.exponents, self.coefs, u)

    def log_abs_at_u(self, u):
        if self.is_zero:
            return np.full(np.shape(u), -np.inf)
        return kernels.log_abs_eval_u(self.exponents, self.coefs, u)

    @property
    def value_at_one(self) -> float:
        return float(math.fsum(self.coefs))

    def to_list(self) -> list[list[float]]:
        return [[lam, a] for lam, a in self.terms]

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, s: str) -> "MuntzPolynomial":
        return cls.from_terms(json.loads(s))


@dataclass(frozen=True)
class BlockPolynomial:
    block_index: int
    poly: MuntzPolynomial


def evaluate(f: MuntzPolynomial, t):
    """``f(t)`` for ``t`` in [0, 1], scalar or array."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)) or np.any(np.isnan(t)):
        raise DomainError("evaluation point outside [0, 1]")
    out = np.zeros(t.shape)
    one = t == 1.0
    inner = (t > 0) & ~one
    if f.is_zero:
        return float(out) if scalar else out
    out[one] = f.value_at_one
    if np.any(inner):
        ti = t[inner]
        u = -np.log(ti)
        near = ti > 0.5
        u[near] = -np.log1p(ti[near] - 1.0)
        out[inner] = f.at_u(u)
    return float(out) if scalar else out


def block_decompose(f: MuntzPolynomial, part: BlockPartition) -> list[BlockPolynomial]:
    """Group the terms of ``f`` by the block of ``part`` holding each exponent."""
    groups: dict[int, list] = {}
    for lam, a in f.terms:
        k = part.block_of_exponent(lam)
        if k < 0:
            raise UnknownExponentError(f"exponent {lam} is not in the partitioned sequence")
        groups.setdefault(k, []).append((lam, a))
    return [BlockPolynomial(k, MuntzPolynomial.from_terms(groups[k])) for k in sorted(groups)]


def _u_range(f: MuntzPolynomial, lo_scale=1e-3, hi_decay=50.0):
    lam = f.exponents
    u_lo = lo_scale / lam[-1]
    u_hi = max(hi_decay / lam[0], 10.0 * u_lo)
    return u_lo, u_hi


def _golden_max(fun, a, b, tol):
    """Maximize a unimodal ``fun`` on ``[a, b]``; returns (x, value)."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def sup_argmax(f: MuntzPolynomial, grid_size: int = 256, n_refine: int = 4,
               tol: float = 1e-12) -> tuple[float, float]:
    """``(max |f|, u*)`` over [0, 1] with ``t* = exp(-u*)``; ``u* = 0`` means t=1.

    Two log-spaced grids in ``u = -ln t``, one covering the boundary layer
    near ``t = 1`` and one the region toward ``t = 0``, each with
    ``grid_size`` points (raised to 8 per e-fold when the exponent span is
    wide). The best few local maxima are refined by golden section in ``ln u``.
    """
    if f.is_zero:
        return 0.0, 0.0
    u_lo, u_hi = _u_range(f)
    mid = min(max(1.0 / math.sqrt(f.exponents[0] * f.exponents[-1]), u_lo * 10), u_hi / 10)
    n1 = max(grid_size, int(8 * math.log(mid / u_lo)))
    n2 = max(grid_size, int(8 * math.log(u_hi / mid)))
    v = np.concatenate([np.linspace(math.log(u_lo), math.log(mid), n1, endpoint=False),
                        np.linspace(math.log(mid), math.log(u_hi), n2)])
    vals = np.abs(f.at_u(np.exp(v)))
    best_val = abs(f.value_at_one)
    best_u = 0.0
    # interior local maxima of the sampled |f|
    cand = [i for i in range(1, v.size - 1) if vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]]
    if vals[0] > vals[1]:
        cand.append(0)
    cand.sort(key=lambda i: -vals[i])
    for i in cand[:n_refine]:
        a = v[max(i - 1, 0)]
        b = v[min(i + 1, v.size - 1)]
        xs, fx = _golden_max(lambda x: abs(float(f.at_u(np.array([math.exp(x)]))[0])), a, b, tol)
        fx = max(fx, vals[i])
        if fx > best_val:
            best_val = fx
            best_u = math.exp(xs) if fx > vals[i] else math.exp(v[i])
    return float(best_val), float(best_u)


def sup_norm(f: MuntzPolynomial, grid_size: int = 256) -> float:
    """``max_{[0,1]} |f|``; exact at ``t = 1`` for monomials."""
    if f.is_zero:
        return 0.0
    if len(f) == 1:
        return abs(float(f.coefs[0]))
    return sup_argmax(f, grid_size)[0]


def pointwise_bound_constant(fk: BlockPolynomial, part: BlockPartition,
                             grid_size: int = 512, x_min: float = 1e-6) -> float:
    """Empirical ``max |f_k(x)| / (x^{(lam+1)/N} ||f_k||_inf)`` over ``[x_min, 1]``.

    ``lam`` is the endpoint of the block preceding ``f_k``'s block (0 for
    the first block). Logs are used so that huge exponents cannot underflow
    the ratio.
    """
    if grid_size < 64:
        raise DomainError("grid_size must be at least 64")
    f = fk.poly
    if f.is_zero:
        raise UndefinedConstantError("the bound constant of the zero polynomial is undefined")
    # normalizing first makes the result invariant under coefficient scaling
    f = f * (1.0 / float(np.max(np.abs(f.coefs))))
    expo = (part.anchor_before(fk.block_index) + 1.0) / part.N
    sup = sup_norm(f)
    x = np.geomspace(x_min, 1.0, grid_size)
    u = -np.log(x)
    logf = np.empty(grid_size)
    logf[-1] = math.log(abs(f.value_at_one)) if f.value_at_one != 0 else -np.inf
    logf[:-1] = f.log_abs_at_u(u[:-1])
    return float(np.exp(np.max(logf - expo * np.log(x) - math.log(sup))))
