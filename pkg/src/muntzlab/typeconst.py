"""Restricted and global type constants, decoupling and Bernstein ratios.

Per-block suprema over coefficient vectors run on a fixed quadrature grid
(cheap to re-evaluate), then the maximizer is re-scored with the adaptive
norms of :mod:`muntzlab.measures`. Randomness is split deterministically
from ``(seed, k, restart)`` so results do not depend on execution order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg, optimize

from .errors import DomainError, NonConvergenceError, PreconditionError
from .exponents import BlockPartition
from .measures import (GEOMETRIC_RATIO, TREND_WINDOW, FixedGrid, Measure, SuperlevelEvaluator,
                       check_Mx_gamma, fixed_grid, geometric_tail, jacobi, lp_norm,
                       monomial_norm)
from .muntz_poly import MuntzPolynomial, sup_norm
from .special import log_beta

THETA_ATOL = 1e-14
RESTARTS = 16
SAMPLES = 10_000
FD_STEP = 1e-6
ASCENT_RTOL = 1e-8
SAMPLER_RTOL = 1e-6
WEAK_OCTAVES = 40
SUMMABLE_EXPONENT = 1.1
_SAMPLER_KEY = 1_000_003
_CHUNK = 1024


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream for ``(seed, keys...)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)))


# -- interpolation parameters --------------------------------------------------


def interpolation_theta(p: float, q: float, r: float) -> float:
    """``theta`` with ``1/r = (1-theta)/p + theta/q``."""
    if not (0 < p < r < q):
        raise DomainError(f"need 0 < p < r < q, got p={p}, r={r}, q={q}")
    theta = q * (r - p) / (r * (q - p))
    resid = abs(1.0 / r - ((1.0 - theta) / p + theta / q))
    assert resid <= THETA_ATOL * max(1.0, 1.0 / p), resid
    return theta


@dataclass(frozen=True)
class InterpolationConfig:
    p: float
    q: float
    r: float
    alpha: float
    beta: float
    mu: Measure
    part: BlockPartition
    theta: float = field(init=False)

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError("alpha and beta must be positive")
        object.__setattr__(self, "theta", interpolation_theta(self.p, self.q, self.r))

    @property
    def regime(self) -> str:
        return "subcritical" if self.beta >= 1 else "supercritical"

    def source_measure(self) -> Measure:
        return jacobi(self.alpha)

    def with_r(self, r: float) -> "InterpolationConfig":
        return InterpolationConfig(self.p, self.q, r, self.alpha, self.beta, self.mu, self.part)


# -- trend heuristic for epsilon sequences ----------------------------------------


def summable_trend(eps, ks=None, window: int = TREND_WINDOW, ratio: float = GEOMETRIC_RATIO,
                   min_exponent: float = SUMMABLE_EXPONENT) -> bool:
    """Heuristic: does the finite prefix ``eps`` look like a convergent series?

    True when all terms vanish, when the last ``window`` consecutive ratios
    are below ``ratio`` (geometric decay), or when a least-squares fit of
    ``ln eps`` against ``ln k`` over the second half of the prefix decays
    with exponent at least ``min_exponent``. ``1/k`` fails,
    ``1/(k ln^2 k)`` passes.
    """
    e = np.asarray(eps, dtype=float)
    if e.size == 0 or not np.all(np.isfinite(e)) or np.any(e < 0):
        return False
    if np.all(e == 0):
        return True
    if geometric_tail(e, window, ratio):
        return True
    k = np.arange(1, e.size + 1, dtype=float) if ks is None else np.asarray(ks, dtype=float)
    half = slice(e.size // 2, None)
    kt, et = k[half], e[half]
    if kt.size < 3 or np.any(et <= 0) or np.any(kt <= 0):
        return False
    slope = np.polyfit(np.log(kt), np.log(et), 1)[0]
    return bool(-slope >= min_exponent)


# -- per-block problems -----------------------------------------------------------


def _block_images(T, exps):
    return [T.monomial_image(float(l)) for l in exps]


def _combine(images, a) -> MuntzPolynomial:
    out = MuntzPolynomial.zero()
    for g, c in zip(images, a):
        if c != 0.0:
            out = out + g * float(c)
    return out


def _union_range(polys):
    lams = [g.exponents for g in polys if not g.is_zero]
    if not lams:
        return None
    allv = np.concatenate(lams)
    return float(allv.min()), float(allv.max())


def weak_sup(g: MuntzPolynomial, mu: Measure, r: float, octaves: int = WEAK_OCTAVES,
             refine_tol: float = 1e-10) -> float:
    """``sup_L L mu(|g| > L)^(1/r)`` over ``L`` in ``[sup|g| 2^-octaves, sup|g|]``.

    Dyadic scan, then golden-section refinement in ``ln L`` around the
    best level.
    """
    if g.is_zero or mu.is_zero:
        return 0.0
    S = sup_norm(g)
    if S == 0:
        return 0.0
    ev = SuperlevelEvaluator(g, mu, S * 2.0 ** -(octaves + 1))

    def phi(lnL):
        L = math.exp(lnL)
        return L * ev(L) ** (1.0 / r)

    lnS = math.log(S)
    grid = lnS - math.log(2.0) * np.arange(octaves + 1)
    vals = [phi(x) for x in grid]
    j = int(np.argmax(vals))
    best = vals[j]
    a = grid[min(j + 1, octaves)]
    b = grid[max(j - 1, 0)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = phi(c), phi(d)
    while b - a > refine_tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = phi(d)
    return float(max(best, fc, fd))


class _BlockProblem:
    """Norm ratios for ``f = sum_j a_j t^{lam_j}`` over one block, batched in ``a``."""

    def __init__(self, T, exps, s: float, cfg: InterpolationConfig, kind: str):
        self.T = T
        self.exps = np.asarray(exps, dtype=float)
        self.s = s
        self.cfg = cfg
        self.kind = kind
        self.src_p = s / cfg.beta
        self.src_mu = cfg.source_measure()
        self.images = _block_images(T, self.exps)
        rng_img = _union_range(self.images)
        self.zero = rng_img is None or cfg.mu.is_zero
        if self.zero:
            return
        gi = fixed_grid(cfg.mu, rng_img[0], rng_img[1], p_min=min(s, 1.0))
        self.num_w = gi.w
        self.G = np.stack([g.at_u(gi.u) for g in self.images])
        gd = fixed_grid(self.src_mu, self.exps.min(), self.exps.max(), p_min=min(self.src_p, 1.0))
        self.den_w = gd.w
        self.H = np.exp(-np.multiply.outer(self.exps, gd.u))

    def _den(self, A):
        return (np.abs(A @ self.H) ** self.src_p @ self.den_w) ** (1.0 / self.src_p)

    def _num(self, A):
        vals = np.abs(A @ self.G)
        if self.kind == "strong":
            return (vals ** self.s @ self.num_w) ** (1.0 / self.s)
        order = np.argsort(-vals, axis=1)
        v = np.take_along_axis(vals, order, axis=1)
        cum = np.cumsum(self.num_w[order], axis=1)
        return np.max(v * cum ** (1.0 / self.s), axis=1)

    def grid_ratio(self, A):
        A = np.atleast_2d(A)
        out = np.empty(A.shape[0])
        for i in range(0, A.shape[0], _CHUNK):
            blk = A[i:i + _CHUNK]
            out[i:i + _CHUNK] = self._num(blk) / self._den(blk)
        return out

    def exact_ratio(self, a) -> float:
        if self.zero:
            return 0.0
        f = MuntzPolynomial(self.exps, np.asarray(a, dtype=float))
        den = lp_norm(f, self.src_p, self.src_mu)
        g = _combine(self.images, a)
        num = lp_norm(g, self.s, self.cfg.mu) if self.kind == "strong" else weak_sup(g, self.cfg.mu, self.s)
        return num / den


@dataclass
class BlockConstant:
    k: int
    value: float
    argmax: list
    optimizer_value: float | None = None
    sampler_value: float | None = None
    restarts: int = 0
    samples: int = 0


def _ascent(prob: _BlockProblem, x0: np.ndarray) -> tuple[float, np.ndarray]:
    """Local ascent of the degree-0 homogeneous ratio; iterates are renormalized."""
    def neg_log(x):
        n = np.linalg.norm(x)
        if n == 0:
            return math.inf
        val = prob.grid_ratio(x / n)[0]
        return -math.log(val) if val > 0 else math.inf

    x = x0 / np.linalg.norm(x0)
    fx = neg_log(x)
    for _ in range(50):
        res = optimize.minimize(neg_log, x, method="BFGS",
                                options={"eps": FD_STEP, "gtol": 1e-10, "maxiter": 200})
        y = res.x / np.linalg.norm(res.x)
        fy = neg_log(y)
        if prob.kind != "strong":
            nm = optimize.minimize(neg_log, y, method="Nelder-Mead",
                                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000})
            if nm.fun < fy:
                y = nm.x / np.linalg.norm(nm.x)
                fy = neg_log(y)
        improved = fx - fy
        if fy < fx:
            x, fx = y, fy
        if improved <= ASCENT_RTOL:
            break
    return math.exp(-fx), x


def block_constant(T, k: int, s: float, cfg: InterpolationConfig, kind: str = "strong",
                   restarts: int = RESTARTS, samples: int = SAMPLES, seed: int = 0) -> BlockConstant:
    """Restricted constant of ``T`` on block ``k`` at exponent ``s``."""
    if kind not in ("strong", "weak"):
        raise DomainError("kind must be 'strong' or 'weak'")
    if not 0 <= k < cfg.part.n_blocks:
        raise DomainError(f"block {k} outside the partition")
    exps = cfg.part.block_exponents(k)
    if exps.size > max(cfg.part.N, 1):
        raise PreconditionError("block dimension exceeds N")
    prob = _BlockProblem(T, exps, s, cfg, kind)
    if prob.zero:
        return BlockConstant(k, 0.0, [1.0] + [0.0] * (exps.size - 1))
    d = exps.size
    if d == 1:
        return BlockConstant(k, prob.exact_ratio([1.0]), [1.0])
    best_v, best_x = -math.inf, None
    for i in range(restarts):
        x0 = rng_for(seed, k, i).standard_normal(d)
        v, x = _ascent(prob, x0)
        if v > best_v:
            best_v, best_x = v, x
    A = rng_for(seed, k, _SAMPLER_KEY).standard_normal((samples, d))
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    samp = float(prob.grid_ratio(A).max())
    if best_v < samp * (1.0 - SAMPLER_RTOL):
        raise NonConvergenceError(f"block {k}: optimizer {best_v} below sampler {samp}",
                                  optimizer_value=best_v, sampler_value=samp)
    value = prob.exact_ratio(best_x)
    if kind == "weak":
        # the grid distribution function is lumpy; polish on the exact one
        res = optimize.minimize(lambda x: -prob.exact_ratio(x / np.linalg.norm(x)), best_x,
                                method="Nelder-Mead",
                                options={"xatol": 1e-6, "fatol": 1e-10 * value, "maxfev": 60 * d})
        if -res.fun > value:
            value = float(-res.fun)
            best_x = res.x / np.linalg.norm(res.x)
    return BlockConstant(k, float(value), best_x.tolist(), float(best_v), samp, restarts, samples)


def restricted_strong_constant(T, k: int, r: float, cfg: InterpolationConfig,
                               restarts: int = RESTARTS, samples: int = SAMPLES,
                               seed: int = 0) -> float:
    """``sup ||T f||_{L^r(mu)} / ||f||_{L^{r/beta}(nu_{alpha-1})}`` over ``f`` in block ``k``."""
    return block_constant(T, k, r, cfg, "strong", restarts, samples, seed).value


def restricted_weak_constant(T, k: int, r: float, cfg: InterpolationConfig,
                             restarts: int = RESTARTS, samples: int = SAMPLES,
                             seed: int = 0) -> float:
    """``sup L mu(|T f| > L)^(1/r) / ||f||_{L^{r/beta}(nu_{alpha-1})}`` over block ``k`` and ``L``."""
    return block_constant(T, k, r, cfg, "weak", restarts, samples, seed).value


# -- global lower bounds ------------------------------------------------------------


def witness(part: BlockPartition, n: int, alpha: float, beta: float, r: float) -> MuntzPolynomial:
    """``sum_{k=1..n} lam_k^{alpha beta / r} t^{lam_k}`` over block endpoints."""
    ends = part.endpoints()[1:n + 1]
    return MuntzPolynomial(ends, ends ** (alpha * beta / r))


def witness_sizes(part: BlockPartition, max_n: int | None = None) -> list[int]:
    top = part.n_blocks - 1 if max_n is None else min(max_n, part.n_blocks - 1)
    out, n = [], 1
    while n <= top:
        out.append(n)
        n *= 2
    return out


def random_family(part: BlockPartition, r: float, alpha: float, beta: float, size: int,
                  seed: int = 0) -> list[MuntzPolynomial]:
    """Random multi-block polynomials with coefficients ``z_j / ||t^{lam_j}||``."""
    out = []
    nb = part.n_blocks
    for i in range(size):
        rng = rng_for(seed, 0xFA, i)
        m = int(rng.integers(1, nb + 1))
        blocks = np.sort(rng.choice(nb, size=m, replace=False))
        exps = np.concatenate([part.block_exponents(int(b)) for b in blocks])
        z = rng.standard_normal(exps.size)
        norms = np.array([monomial_norm(l, r / beta, alpha) for l in exps])
        out.append(MuntzPolynomial(exps, z / norms))
    return out


def default_family(part: BlockPartition, r: float, alpha: float, beta: float,
                   size: int = 200, seed: int = 0, max_witness: int | None = None):
    fam = [witness(part, n, alpha, beta, r) for n in witness_sizes(part, max_witness)]
    return fam + random_family(part, r, alpha, beta, size, seed)


def global_ratio(T, f: MuntzPolynomial, r: float, cfg: InterpolationConfig) -> float:
    den = lp_norm(f, r / cfg.beta, cfg.source_measure())
    if den == 0:
        raise DomainError("family member has zero norm")
    return lp_norm(T.apply(f), r, cfg.mu) / den


def strong_constant_lower_bound(T, r: float, cfg: InterpolationConfig, family=None,
                                family_size: int = 200, seed: int = 0) -> float:
    """Max of ``||T f||_{L^r(mu)} / ||f||_{L^{r/beta}(nu_{alpha-1})}`` over ``family``."""
    if family is None:
        family = default_family(cfg.part, r, cfg.alpha, cfg.beta, family_size, seed)
    if len(family) == 0:
        raise DomainError("family must be nonempty")
    return max(global_ratio(T, f, r, cfg) for f in family)


# -- decoupling --------------------------------------------------------------------


@dataclass
class DecouplingResult:
    c_low: float
    c_high: float
    by_blocks: dict
    gram: tuple | None = None
    samples: int = 0
    sample_low: float = math.nan
    sample_high: float = math.nan

    def to_dict(self):
        return {"c_low": self.c_low, "c_high": self.c_high, "samples": self.samples,
                "sample_low": self.sample_low, "sample_high": self.sample_high,
                "by_blocks": {str(m): list(v) for m, v in self.by_blocks.items()},
                "gram": None if self.gram is None else list(self.gram)}


def gram_bounds(part: BlockPartition, alpha: float, n_blocks: int) -> tuple[float, float]:
    """Extreme values of ``||sum f_k||_2 / (sum ||f_k||_2^2)^(1/2)`` under ``nu_{alpha-1}``."""
    exps = np.concatenate([part.block_exponents(k) for k in range(n_blocks)])
    owner = np.concatenate([[k] * part.block_exponents(k).size for k in range(n_blocks)])
    S = np.add.outer(exps, exps) + 1.0
    G = np.exp(np.vectorize(log_beta)(S, alpha))
    D = np.where(np.equal.outer(owner, owner), G, 0.0)
    scale = 1.0 / np.sqrt(np.diag(G))
    ev = linalg.eigh(G * np.outer(scale, scale), D * np.outer(scale, scale), eigvals_only=True)
    return float(math.sqrt(ev[0])), float(math.sqrt(ev[-1]))


def decoupling_ratio(part: BlockPartition, p: float, alpha: float, samples: int = 500,
                     seed: int = 0, n_blocks: int = 12, refine: int = 4) -> DecouplingResult:
    """Range of ``R = ||sum f_k||_p / (sum ||f_k||_p^p)^(1/p)`` over block tuples.

    Coefficients are standard normal. ``R`` is scale invariant, so the
    ``refine`` smallest and largest samples are pushed to their local
    extremes by a local search; ``c_low, c_high`` include those, while
    ``sample_low, sample_high`` and ``by_blocks[m]`` (first ``m`` blocks
    only) are raw sample ranges. Norms are under ``nu_{alpha-1}`` on one
    fixed quadrature grid.
    """
    if p < 1:
        raise DomainError("p must be at least 1")
    if samples < 100:
        raise DomainError("need at least 100 samples")
    nb = min(n_blocks, part.n_blocks)
    exps = np.concatenate([part.block_exponents(k) for k in range(nb)])
    owner = np.concatenate([[k] * part.block_exponents(k).size for k in range(nb)])
    grid = fixed_grid(jacobi(alpha), exps.min(), exps.max(), p_min=1.0)
    basis = np.exp(-np.multiply.outer(exps, grid.u))
    masks = [owner == k for k in range(nb)]
    mono_pow = basis ** p @ grid.w
    singletons = exps.size == nb

    def ratio(Z, m=nb):
        Z = np.atleast_2d(Z)
        sel = owner < m
        num = (np.abs(Z[:, sel] @ basis[sel]) ** p @ grid.w) ** (1.0 / p)
        if singletons:
            den = np.abs(Z[:, :m]) ** p @ mono_pow[:m]
        else:
            den = sum(np.abs(Z[:, mk] @ basis[mk]) ** p @ grid.w for mk in masks[:m])
        return num / den ** (1.0 / p)

    Z = rng_for(seed, 0xDC).standard_normal((samples, exps.size))
    by_blocks = {}
    for m in range(1, nb + 1):
        R = ratio(Z, m)
        by_blocks[m] = (float(R.min()), float(R.max()))
    lo, hi = by_blocks[nb]
    c_low, c_high = lo, hi
    if nb > 1 and refine > 0:
        # well-conditioned coordinates: coefficients times monomial norms
        scale = mono_pow ** (1.0 / p)
        order = np.argsort(R)
        for sign, rows in ((1.0, order[:refine]), (-1.0, order[-refine:])):
            for i in rows:
                def obj(y, sign=sign):
                    v = ratio(y / scale)[0]
                    return sign * math.log(v) if v > 0 else math.inf
                res = optimize.minimize(obj, Z[i] * scale, method="BFGS",
                                        options={"eps": FD_STEP})
                res = optimize.minimize(obj, res.x, method="Nelder-Mead",
                                        options={"maxfev": 4000, "xatol": 1e-8, "fatol": 1e-12})
                v = math.exp(sign * res.fun)
                c_low, c_high = min(c_low, v), max(c_high, v)
    gram = gram_bounds(part, alpha, nb) if p == 2 else None
    return DecouplingResult(float(c_low), float(c_high), by_blocks, gram, samples, lo, hi)


# -- Bernstein-type ratio ------------------------------------------------------------


def bernstein_delta(p: float, q: float, alpha_w: float, beta: float) -> float:
    return (1.0 + alpha_w) / q - beta / p


def bernstein_constant(k: int, p: float, q: float, alpha_w: float, beta: float, mu: Measure,
                       part: BlockPartition, samples: int = 200, seed: int = 0,
                       k0: int = 0) -> float:
    """Sup over sampled ``f`` in block ``k`` of
    ``||f||_{L^p(mu)} / (lam_{n_k}^delta ||f||_{L^q((1-x)^alpha_w dx)})``."""
    if not (p > 0 and q > 0 and alpha_w > -1 and beta > 0):
        raise DomainError("need p, q, beta > 0 and alpha_w > -1")
    if k < k0:
        raise PreconditionError(f"block {k} is below the configured k0 = {k0}")
    if not check_Mx_gamma(mu, beta).verdict:
        raise PreconditionError("measure fails the M_{x^beta} condition")
    exps = part.block_exponents(k)
    lam_end = float(part.endpoints()[k])
    delta = bernstein_delta(p, q, alpha_w, beta)
    w = jacobi(alpha_w + 1.0)
    scale = lam_end ** delta
    coefs = [np.ones(1)] if exps.size == 1 else rng_for(seed, k, 0xBE).standard_normal((samples, exps.size))
    best = 0.0
    for a in coefs:
        f = MuntzPolynomial(exps, a)
        best = max(best, lp_norm(f, p, mu) / (scale * lp_norm(f, q, w)))
    return best


# -- reports and epsilon profiles ----------------------------------------------------


def _block_worker(args):
    T, k, s, cfg, kind, restarts, samples, seed = args
    return block_constant(T, k, s, cfg, kind, restarts, samples, seed)


def block_constants(T, cfg: InterpolationConfig, s: float, ks, kind: str = "strong",
                    restarts: int = RESTARTS, samples: int = SAMPLES, seed: int = 0,
                    parallel: int = 1) -> list[BlockConstant]:
    jobs = [(T, int(k), s, cfg, kind, restarts, samples, seed) for k in ks]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(parallel) as ex:
            return list(ex.map(_block_worker, jobs))
    return [_block_worker(j) for j in jobs]


@dataclass
class EpsilonProfile:
    ks: list
    constants: list
    C_s: float
    eps: list
    partial_sums: list
    verdict: bool

    @property
    def C_eps(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0

    def to_dict(self):
        return {"rows": [{"k": k, "C": c, "eps": e, "partial_sum": s} for k, c, e, s
                         in zip(self.ks, self.constants, self.eps, self.partial_sums)],
                "C_s": self.C_s, "C_eps": self.C_eps, "verdict": self.verdict}


def epsilon_from_constants(constants, ks, s: float, beta: float) -> EpsilonProfile:
    c = np.asarray(constants, dtype=float)
    C_s = float(c.max()) if c.size else 0.0
    eps = np.zeros_like(c) if C_s == 0 else (c / C_s) ** (s / (1.0 - beta))
    sums = np.cumsum(eps)
    return EpsilonProfile([int(k) for k in ks], c.tolist(), C_s, eps.tolist(), sums.tolist(),
                          summable_trend(eps, [max(int(k), 1) for k in ks]))


def epsilon_profile(T, cfg: InterpolationConfig, s: float, k_range, kind: str = "strong",
                    seed: int = 0, restarts: int = RESTARTS, samples: int = SAMPLES,
                    parallel: int = 1) -> EpsilonProfile:
    """``eps_k = (C_s(k) / C_s)^{s/(1-beta)}`` with ``C_s = max_k C_s(k)``."""
    if not 0 < cfg.beta < 1:
        raise DomainError("epsilon profiles need 0 < beta < 1")
    ks = list(k_range)
    cons = block_constants(T, cfg, s, ks, kind, restarts, samples, seed, parallel)
    return epsilon_from_constants([b.value for b in cons], ks, s, cfg.beta)


_KINDS = {"restricted-strong": "strong", "restricted-weak": "weak"}


@dataclass
class TypeConstantReport:
    kind: str
    r: float
    alpha: float
    beta: float
    ks: list
    constants: list
    sup: float
    method: dict
    eps: list | None = None
    C_eps: float | None = None

    def to_dict(self):
        d = asdict(self)
        d["rows"] = [{"k": k, "C": c} for k, c in zip(self.ks, self.constants)]
        if self.eps is not None:
            for row, e in zip(d["rows"], self.eps):
                row["eps"] = e
        del d["ks"], d["constants"]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "C"] + (["eps"] if self.eps is not None else []))
        for i, (k, c) in enumerate(zip(self.ks, self.constants)):
            w.writerow([k, repr(float(c))] + ([repr(float(self.eps[i]))] if self.eps is not None else []))
        return buf.getvalue()


def type_constant_report(T, cfg: InterpolationConfig, kind: str, s: float, k_range,
                         restarts: int = RESTARTS, samples: int = SAMPLES, seed: int = 0,
                         parallel: int = 1, family_size: int = 200) -> TypeConstantReport:
    ks = list(k_range)
    method = {"restarts": restarts, "samples": samples, "seed": seed,
              "sampler_rtol": SAMPLER_RTOL, "ascent_rtol": ASCENT_RTOL}
    if kind == "global-strong-lower":
        val = strong_constant_lower_bound(T, s, cfg, family_size=family_size, seed=seed)
        method["family_size"] = family_size
        return TypeConstantReport(kind, s, cfg.alpha, cfg.beta, [], [], val, method)
    if kind not in _KINDS:
        raise DomainError(f"unknown report kind {kind!r}")
    cons = block_constants(T, cfg, s, ks, _KINDS[kind], restarts, samples, seed, parallel)
    vals = [float(b.value) for b in cons]
    eps = c_eps = None
    if 0 < cfg.beta < 1:
        prof = epsilon_from_constants(vals, ks, s, cfg.beta)
        eps, c_eps = prof.eps, prof.C_eps
    return TypeConstantReport(kind, s, cfg.alpha, cfg.beta, ks, vals,
                              float(max(vals)) if vals else 0.0, method, eps, c_eps)
