"""Linear operators on Müntz spaces given by their monomial images.

A :class:`KernelOperator` sends ``t^{lam_k}`` to ``sum_n c_n(k) t^{mu_n}``
(``lam`` the source sequence, ``mu`` the target sequence). A
:class:`DilationOperator` sends ``f`` to ``sum_n c_n f(t^{s_n})``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, TruncationError, UnknownExponentError
from .exponents import BlockPartition, ExponentSequence
from .muntz_poly import MuntzPolynomial
from .special import log_beta

TRUNCATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KernelOperator:
    source: ExponentSequence
    target: ExponentSequence
    rows: dict  # k -> (n indices array, coefficient array)
    name: str = "kernel"
    truncation_tol: float = TRUNCATION_TOL
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        rows = {}
        for k, row in self.rows.items():
            n, c = row if isinstance(row, tuple) and len(row) == 2 and np.ndim(row[0]) == 1 \
                else (np.array([x for x, _ in row], dtype=int), np.array([y for _, y in row], dtype=float))
            n = np.asarray(n, dtype=int)
            c = np.asarray(c, dtype=float)
            if n.size and (n.min() < 0 or n.max() >= len(self.target)):
                raise DomainError(f"row {k} refers to target indices outside the sequence")
            n.setflags(write=False)
            c.setflags(write=False)
            rows[int(k)] = (n, c)
        object.__setattr__(self, "rows", rows)

    @property
    def positive(self) -> bool:
        return all(np.all(c >= 0) for _, c in self.rows.values())

    def row(self, k: int):
        return self.rows.get(k, (np.zeros(0, dtype=int), np.zeros(0)))

    def image_index(self, k: int) -> MuntzPolynomial:
        n, c = self.row(k)
        return MuntzPolynomial(self.target.values[n], c)

    def monomial_image(self, lam: float) -> MuntzPolynomial:
        k = self.source.index_of(lam)
        if k < 0:
            raise UnknownExponentError(f"exponent {lam} is not in the source sequence")
        return self.image_index(k)

    def apply(self, f: MuntzPolynomial) -> MuntzPolynomial:
        lams, cs = [], []
        for lam, a in f.terms:
            g = self.monomial_image(lam)
            lams.append(g.exponents)
            cs.append(a * g.coefs)
        if not lams:
            return MuntzPolynomial.zero()
        return MuntzPolynomial(np.concatenate(lams), np.concatenate(cs))

    def rows_dict(self) -> dict:
        return {str(k): [[int(n), float(c)] for n, c in zip(*self.rows[k])]
                for k in sorted(self.rows)}

    def to_json(self) -> str:
        return json.dumps({"name": self.name, "source": self.source.values.tolist(),
                           "target": self.target.values.tolist(), "rows": self.rows_dict()})


@dataclass(frozen=True, eq=False)
class DilationOperator:
    scales: np.ndarray
    weights: np.ndarray
    name: str = "dilation"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.scales, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if s.shape != w.shape:
            raise DomainError("scales and weights differ in length")
        if np.any(s <= 0):
            raise DomainError("scales must be positive")
        s.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "scales", s)
        object.__setattr__(self, "weights", w)

    @property
    def positive(self) -> bool:
        return bool(np.all(self.weights >= 0))

    def monomial_image(self, lam: float) -> MuntzPolynomial:
        return MuntzPolynomial(lam * self.scales, self.weights.copy())

    def apply(self, f: MuntzPolynomial) -> MuntzPolynomial:
        if f.is_zero or self.scales.size == 0:
            return MuntzPolynomial.zero()
        lam = np.multiply.outer(f.exponents, self.scales).ravel()
        c = np.multiply.outer(f.coefs, self.weights).ravel()
        return MuntzPolynomial(lam, c)

    def constant(self, p: float, gamma: float) -> float:
        """``sum |c_n|^p / mu_n^gamma``."""
        return float(np.sum(np.abs(self.weights) ** p / self.scales ** gamma))


def apply(T, f: MuntzPolynomial) -> MuntzPolynomial:
    return T.apply(f)


# -- simple kernels ------------------------------------------------------------


def identity(seq: ExponentSequence) -> KernelOperator:
    idx = np.arange(len(seq))
    return KernelOperator(seq, seq, {k: (idx[k:k + 1], np.ones(1)) for k in idx}, name="identity")


def zero_operator(seq: ExponentSequence) -> KernelOperator:
    return KernelOperator(seq, seq, {}, name="zero")


def diagonal(seq: ExponentSequence, d: Sequence[float], name: str = "diagonal") -> KernelOperator:
    d = np.asarray(d, dtype=float)
    if d.shape != (len(seq),):
        raise DomainError("diagonal needs one entry per exponent")
    return KernelOperator(seq, seq, {k: (np.array([k]), d[k:k + 1]) for k in range(len(seq))},
                          name=name)


# -- counterexamples -----------------------------------------------------------


def _require_lacunary(part: BlockPartition):
    if part.N != 1:
        raise DomainError("construction needs a lacunary (N = 1) partition")


def subcritical_coefficient(lam_k, lam_n, k, n, r, alpha, beta, gamma, eps):
    """``lam_k^{-ab/r} lam_n^{g/r} / n^{(1+eps)/r}`` for ``1 <= n <= k``."""
    return math.exp(-beta * alpha / r * math.log(lam_k) + gamma / r * math.log(lam_n)
                    - (1.0 + eps) / r * math.log(n))


def make_counterexample_subcritical(part: BlockPartition, r: float, alpha: float,
                                    beta: float, gamma: float, eps: float) -> KernelOperator:
    """Restricted strong type ``r`` but not strong type ``r`` (``beta >= 1``)."""
    _require_lacunary(part)
    if not (beta >= 1 and r > beta and alpha > 0 and gamma > 0 and 0 < eps < 1):
        raise DomainError("need beta >= 1, r > beta, alpha, gamma > 0, 0 < eps < 1")
    lam = part.seq.values
    rows = {}
    for k in range(1, lam.size):
        n = np.arange(1, k + 1)
        c = np.array([subcritical_coefficient(lam[k], lam[j], k, j, r, alpha, beta, gamma, eps)
                      for j in n])
        rows[k] = (n, c)
    return KernelOperator(part.seq, part.seq, rows, name="counterexample_subcritical",
                          params=dict(r=r, alpha=alpha, beta=beta, gamma=gamma, eps=eps))


def supercritical_coefficient(lam_k, lam_n, k, n, r, alpha, beta, gamma, eps, eta):
    return math.exp(-alpha * beta / r * math.log(lam_k) + gamma / r * math.log(lam_n)
                    - (1.0 + eps) / r * math.log(n)
                    - (1.0 - beta) * (1.0 + eta) / r * math.log(k))


def make_counterexample_supercritical(part: BlockPartition, r: float, alpha: float,
                                      beta: float, gamma: float, eps: float,
                                      eta: float) -> KernelOperator:
    """Kernel with ``C_r(k) ~ eps_k^{(1-b)/r}``, summable ``eps_k``, yet not strong type ``r``."""
    _require_lacunary(part)
    if not (r > 1 and 0 < beta < 1 and eps > 0 and eta > 0 and alpha > 0 and gamma > 0):
        raise DomainError("need r > 1, 0 < beta < 1, eps, eta, alpha, gamma > 0")
    lam = part.seq.values
    rows = {}
    for k in range(1, lam.size):
        n = np.arange(1, k + 1)
        c = np.array([supercritical_coefficient(lam[k], lam[j], k, j, r, alpha, beta, gamma,
                                                eps, eta) for j in n])
        rows[k] = (n, c)
    return KernelOperator(part.seq, part.seq, rows, name="counterexample_supercritical",
                          params=dict(r=r, alpha=alpha, beta=beta, gamma=gamma, eps=eps, eta=eta))


# -- positive upper-triangular example ------------------------------------------


def default_eps(k: int) -> float:
    """``1 / (k ln^2 k)`` for ``k >= 2``; indices 0 and 1 reuse the ``k = 2`` value."""
    k = max(int(k), 2)
    return 1.0 / (k * math.log(k) ** 2)


EPS_SUM_CAP = 10.0


def make_example_supercritical(part: BlockPartition, p: float, beta: float,
                               eps_seq: Sequence[float] | Callable[[int], float] | None = None,
                               alpha: float = 1.0, gamma: float | None = None,
                               truncation_tol: float = TRUNCATION_TOL,
                               max_horizon: int = 2000) -> KernelOperator:
    """``T t^{lam_k} = sum_{n>=k} (eps_k eps_n)^{(1-b)/(2p)} t^{lam_n}``.

    The infinite rows are cut where the dropped tail changes the
    ``L^s(nu_{gamma-1})`` norm of every row by less than ``truncation_tol``
    relative, for all ``s >= 1``. The target sequence continues the source
    geometrically with its last ratio when rows need to reach beyond it.
    """
    _require_lacunary(part)
    if not (p > 0 and 0 < beta < 1):
        raise DomainError("need p > 0 and 0 < beta < 1")
    gamma = alpha * beta if gamma is None else gamma
    src = part.seq.values
    if eps_seq is None:
        eps_fn = default_eps
    elif callable(eps_seq):
        eps_fn = eps_seq
    else:
        arr = np.asarray(eps_seq, dtype=float)
        if np.any(arr <= 0):
            raise DomainError("eps_seq must be positive")

        def eps_fn(n, arr=arr):
            if n >= arr.size:
                raise TruncationError(f"eps_seq has {arr.size} terms, truncation needs index {n}")
            return float(arr[n])
    prefix = np.array([eps_fn(k) for k in range(src.size)])
    if prefix.sum() > EPS_SUM_CAP:
        from .typeconst import summable_trend
        if not summable_trend(prefix):
            raise DomainError("eps_seq does not look summable")
    ratio = src[-1] / src[-2] if src.size > 1 else 2.0
    expo = (1.0 - beta) / (2.0 * p)
    target = list(src)
    eps_t = list(prefix)

    def ensure(n):
        while len(target) <= n:
            if len(target) > max_horizon:
                raise TruncationError("truncation horizon exceeded", bound=None)
            target.append(target[-1] * ratio)
            eps_t.append(eps_fn(len(eps_t)))

    rows = {}
    horizon = []
    for k in range(src.size):
        n = k
        kept = 0.0
        while True:
            ensure(n + 2)
            c = (eps_t[k] * eps_t[n]) ** expo
            term = c * math.exp(log_beta(target[n] + 1.0, gamma))
            kept += term
            # s = 1 is the worst case for the relative norm change. Successive
            # Beta ratios decrease toward ratio^-gamma and eps is non-increasing,
            # so the next ratio bounds the whole geometric tail.
            b1 = log_beta(target[n + 1] + 1.0, gamma)
            rho = min(math.exp(log_beta(target[n + 2] + 1.0, gamma) - b1), 0.999)
            c_next = (eps_t[k] * eps_t[n + 1]) ** expo
            tail = c_next * math.exp(b1) / (1.0 - rho)
            if tail < truncation_tol * kept:
                break
            n += 1
        horizon.append(n)
        idx = np.arange(k, n + 1)
        rows[k] = (idx, np.array([(eps_t[k] * eps_t[j]) ** expo for j in idx]))
    tgt = ExponentSequence(np.array(target[:max(horizon) + 1]))
    return KernelOperator(part.seq, tgt, rows, name="example_supercritical",
                          truncation_tol=truncation_tol,
                          params=dict(p=p, beta=beta, alpha=alpha, gamma=gamma,
                                      eps=[eps_t[k] for k in range(len(tgt))],
                                      horizon=horizon))


def decoupled_row_norm(T: KernelOperator, k: int, s: float, gamma: float) -> float:
    """``(sum_n |c_n(k)|^s ||t^{mu_n}||_s^s)^{1/s}`` under ``nu_{gamma-1}``."""
    n, c = T.row(k)
    if n.size == 0:
        return 0.0
    mu = T.target.values[n]
    logs = np.array([log_beta(s * m + 1.0, gamma) for m in mu])
    return float(np.sum(np.abs(c) ** s * np.exp(logs)) ** (1.0 / s))


# -- dilation example ---------------------------------------------------------


def make_dilation_example(c: Sequence[float] | None = None,
                          mu_scales: Sequence[float] | None = None,
                          gamma: float = 1.0, p: float = 2.0,
                          tol: float = TRUNCATION_TOL) -> tuple[DilationOperator, float]:
    """Dilation operator and its constant ``C = sum |c_n|^p / mu_n^gamma``.

    Without explicit lists the weights are ``2^-n`` and scales ``2^n``,
    ``n = 1, 2, ...``, cut once the next term of ``C`` falls below
    ``tol`` times the partial sum.
    """
    if c is None and mu_scales is None:
        cs, ms = [], []
        n = 1
        total = 0.0
        while True:
            term = 2.0 ** (-n * p) / 2.0 ** (n * gamma)
            if total and term < tol * total:
                break
            cs.append(2.0 ** -n)
            ms.append(2.0 ** n)
            total += term
            n += 1
        c, mu_scales = cs, ms
    T = DilationOperator(scales=np.asarray(mu_scales, dtype=float),
                         weights=np.asarray(c, dtype=float),
                         params=dict(gamma=gamma, p=p))
    return T, T.constant(p, gamma)


def diagonal_for_profile(part: BlockPartition, eps: Sequence[float], r: float, alpha: float,
                         beta: float, gamma: float) -> KernelOperator:
    """Positive diagonal operator whose ratios
    ``||T t^{lam_k}||_{L^r(nu_{gamma-1})} / ||t^{lam_k}||_{L^{r/beta}(nu_{alpha-1})}``
    equal ``eps_k^{(1-beta)/r}`` exactly."""
    _require_lacunary(part)
    lam = part.seq.values
    eps = np.asarray(eps, dtype=float)
    if eps.shape != lam.shape or np.any(eps < 0):
        raise DomainError("need one nonnegative eps per exponent")
    if not (r > 0 and alpha > 0 and gamma > 0 and 0 < beta < 1):
        raise DomainError("need r, alpha, gamma > 0 and 0 < beta < 1")
    log_ratio = np.array([log_beta(r / beta * l + 1.0, alpha) * beta / r
                          - log_beta(r * l + 1.0, gamma) / r for l in lam])
    d = eps ** ((1.0 - beta) / r) * np.exp(log_ratio)
    op = diagonal(part.seq, d, name="diagonal_profile")
    return KernelOperator(op.source, op.target, op.rows, name="diagonal_profile",
                          params=dict(r=r, alpha=alpha, beta=beta, gamma=gamma,
                                      eps=eps.tolist()))
