"""Positive measures on [0, 1], moments, weighted L^p norms and moment conditions.

Continuous parts are handled in ``u = -ln t``; the Jacobi weight
``(1-t)^(gamma-1) dt`` becomes ``(1-e^-u)^(gamma-1) e^-u du`` and its
distribution function ``mu{t >= e^-u} = (1-e^-u)^gamma / gamma`` is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import AccuracyError, DomainError
from .exponents import BlockPartition
from .muntz_poly import MuntzPolynomial, sup_norm
from .quadrature import fixed_rule, integrate_v
from .special import beta as beta_fn, log_beta

# verdict heuristics for finite prefixes
TREND_WINDOW = 5
TREND_FACTOR = 1.5
GEOMETRIC_RATIO = 0.95
COMPACT_DROP = 1e-2
MX_STABILITY = 10.0

# below this u a density given in t is replaced by its declared power law
DENSITY_MODEL_U = 1e-7

QUAD_RTOL = 1e-11
NORM_RTOL = 1e-9
_U_LO_SCALE = 1e-10
_U_HI_DECAY = 70.0


@dataclass(frozen=True)
class Measure:
    """``c * (1-t)^(gamma-1) dt`` or ``w(t) dt``, plus point masses.

    ``density`` must be a pure vectorized callable of ``t``; it may blow up
    like ``(1-t)^density_exponent`` at ``t = 1`` (hint used for the
    boundary tail) and must stay bounded near ``t = 0``.
    """

    jacobi_gamma: float | None = None
    density: Callable | None = field(default=None, compare=False)
    density_exponent: float = 0.0
    atoms: tuple = ()

    def __post_init__(self):
        if self.jacobi_gamma is not None and self.density is not None:
            raise DomainError("set at most one of jacobi_gamma and density")
        if self.jacobi_gamma is not None and not self.jacobi_gamma > 0:
            raise DomainError("jacobi_gamma must be positive")
        if self.density_exponent <= -1:
            raise DomainError("density_exponent must exceed -1 for finite mass")
        atoms = tuple((float(x), float(m)) for x, m in self.atoms)
        for x, m in atoms:
            if not (0.0 <= x <= 1.0) or not m > 0:
                raise DomainError("atoms need locations in [0, 1] and positive masses")
        object.__setattr__(self, "atoms", atoms)

    @property
    def has_continuous(self) -> bool:
        return self.jacobi_gamma is not None or self.density is not None

    @property
    def is_zero(self) -> bool:
        return not self.has_continuous and not self.atoms

    @property
    def is_pure_jacobi(self) -> bool:
        return self.jacobi_gamma is not None and not self.atoms

    # -- continuous part in the u variable --------------------------------

    def weight_u(self, u):
        """Density of the continuous part with respect to ``du``."""
        u = np.asarray(u, dtype=float)
        if self.jacobi_gamma is not None:
            g = self.jacobi_gamma
            with np.errstate(divide="ignore"):
                return np.exp((g - 1.0) * np.log(-np.expm1(-u)) - u)
        if self.density is not None:
            w = self._raw_density_u(u)
            small = u < DENSITY_MODEL_U
            if np.any(small):
                w = np.where(small, self._model_coef() * np.where(small, u, 1.0)
                             ** self.density_exponent, w)
            return w
        return np.zeros(u.shape)

    def _raw_density_u(self, u):
        t = np.exp(-u)
        return np.asarray(self.density(t), dtype=float) * t * np.ones(np.shape(u))

    def _model_coef(self) -> float:
        u0 = DENSITY_MODEL_U
        return float(self._raw_density_u(np.array([u0]))[0]) / u0 ** self.density_exponent

    def mass_below_u(self, u):
        """Continuous mass of ``{t >= e^-u}``, i.e. of ``u' in [0, u]``."""
        u = np.asarray(u, dtype=float)
        if self.jacobi_gamma is not None:
            g = self.jacobi_gamma
            return np.where(u > 0, np.exp(g * np.log(np.maximum(-np.expm1(-u), 1e-320))) / g, 0.0)
        if self.density is not None:
            flat = u.ravel()
            out = np.array([self._density_mass(0.0, x) for x in flat])
            return out.reshape(u.shape)
        return np.zeros(u.shape)

    def _density_tail(self, u_lo):
        s = self.density_exponent
        return self._model_coef() * u_lo ** (s + 1.0) / (s + 1.0)

    def _density_mass(self, ua, ub):
        if ub <= ua:
            return 0.0
        u_lo = DENSITY_MODEL_U
        total = 0.0
        if ua < u_lo:
            total += self._density_tail(min(u_lo, ub)) - self._density_tail(ua)
            ua = u_lo
            if ub <= u_lo:
                return total
        val, _ = integrate_v(lambda v: self.weight_u(np.exp(v)) * np.exp(v),
                             math.log(ua), math.log(ub), rel_tol=QUAD_RTOL)
        return total + val

    def mass_interval_u(self, ua, ub):
        """Continuous mass of ``u in [ua, ub]``."""
        if self.density is not None:
            return self._density_mass(ua, ub)
        return float(self.mass_below_u(ub) - self.mass_below_u(ua))

    def total_mass(self) -> float:
        return moment(self, 0.0)

    def mass_near_one(self, eps: float) -> float:
        """``mu([1 - eps, 1])``."""
        u = -math.log1p(-eps)
        m = float(self.mass_below_u(np.array(u))) if self.has_continuous else 0.0
        return m + sum(mass for x, mass in self.atoms if x >= 1.0 - eps)

    def to_dict(self) -> dict:
        if self.density is not None:
            kind = "density"
        elif self.jacobi_gamma is not None:
            kind = "jacobi" if not self.atoms else "mixture"
        else:
            kind = "atom" if self.atoms else "zero"
        return {"kind": kind, "gamma": self.jacobi_gamma,
                "atoms": [list(a) for a in self.atoms]}


def jacobi(gamma: float) -> Measure:
    """``nu_{gamma-1} = (1-x)^(gamma-1) dx``."""
    return Measure(jacobi_gamma=float(gamma))


def lebesgue() -> Measure:
    return jacobi(1.0)


def atom(loc: float = 1.0, mass: float = 1.0) -> Measure:
    return Measure(atoms=((loc, mass),))


def mixture(gamma: float | None, atoms) -> Measure:
    return Measure(jacobi_gamma=gamma, atoms=tuple(atoms))


def zero_measure() -> Measure:
    return Measure()


def from_density(w: Callable, exponent_at_one: float = 0.0, atoms=()) -> Measure:
    return Measure(density=w, density_exponent=exponent_at_one, atoms=tuple(atoms))


# -- moments ---------------------------------------------------------------


def _continuous_integral(h, decay: float, lam_max: float, mu: Measure, rel_tol: float):
    """``int_0^inf h(u) dmu_c(u)`` where ``h`` is flat on ``u << 1/lam_max``
    and decays like ``exp(-decay u)``."""
    u_lo = _U_LO_SCALE / max(lam_max, 1.0)
    u_hi = _U_HI_DECAY / (decay + 1.0)
    tail = float(h(np.array([u_lo]))[0]) * float(mu.mass_interval_u(0.0, u_lo))
    if u_hi <= u_lo:
        return tail
    val, _ = integrate_v(lambda v: h(np.exp(v)) * mu.weight_u(np.exp(v)) * np.exp(v),
                         math.log(u_lo), math.log(u_hi), rel_tol=rel_tol)
    return tail + val


def moment(mu: Measure, s: float, method: str = "auto") -> float:
    """``int t^s dmu``; closed Beta form for Jacobi parts unless ``method='quadrature'``."""
    if s < 0:
        raise DomainError("moment order must be nonnegative")
    total = 0.0
    if mu.has_continuous:
        if mu.jacobi_gamma is not None and method != "quadrature":
            total += beta_fn(s + 1.0, mu.jacobi_gamma)
        else:
            total += _continuous_integral(lambda u: np.exp(-s * u), s, max(s, 1.0), mu, QUAD_RTOL)
    for x, m in mu.atoms:
        total += m * (1.0 if s == 0 else x ** s)
    return total


# -- norms -----------------------------------------------------------------


def _abs_pow_integral(f: MuntzPolynomial, p: float, mu: Measure, method: str,
                      rel_tol: float = QUAD_RTOL) -> float:
    """``int |f|^p dmu``."""
    total = 0.0
    if mu.has_continuous and not f.is_zero:
        if (method != "quadrature" and len(f) == 1 and mu.jacobi_gamma is not None):
            lam, a = f.exponents[0], f.coefs[0]
            total += abs(a) ** p * math.exp(log_beta(p * lam + 1.0, mu.jacobi_gamma))
        else:
            lam = f.exponents
            total += _continuous_integral(lambda u: np.abs(f.at_u(u)) ** p,
                                          p * lam[0], lam[-1], mu, rel_tol)
    for x, m in mu.atoms:
        if x > 0:
            total += m * abs(float(f(x))) ** p
    return total


def lp_norm(f: MuntzPolynomial, p: float, mu: Measure, method: str = "auto") -> float:
    """``(int |f|^p dmu)^(1/p)``.

    ``method='auto'`` uses the closed Beta form for a single monomial under a
    Jacobi weight; ``'quadrature'`` always integrates.
    """
    if not p > 0:
        raise DomainError("p must be positive")
    if f.is_zero or mu.is_zero:
        return 0.0
    return _abs_pow_integral(f, p, mu, method) ** (1.0 / p)


def monomial_norm(lam: float, p: float, gamma: float) -> float:
    """``||t^lam||_{L^p(nu_{gamma-1})}`` in closed form."""
    return math.exp(log_beta(p * lam + 1.0, gamma) / p)


# -- distribution function ---------------------------------------------------


def _superlevel_mass(f: MuntzPolynomial, mu: Measure, v, vals, level):
    above = vals > level
    idx = np.nonzero(above[1:] != above[:-1])[0]
    roots = kernels.bisect_crossings(f.exponents, f.coefs, v[idx], v[idx + 1], level, 60)
    bounds = np.exp(roots)
    if above[0]:
        bounds = np.concatenate([[0.0], bounds])
    if bounds.size % 2:
        bounds = np.concatenate([bounds, [np.exp(v[-1])]])
    total = 0.0
    if mu.has_continuous:
        for ua, ub in zip(bounds[0::2], bounds[1::2]):
            total += mu.mass_interval_u(float(ua), float(ub))
    return total


class SuperlevelEvaluator:
    """``L -> mu(|f| > L)`` for one polynomial, sharing a single crossing grid.

    Crossings of ``|f| = L`` are located on a log-spaced grid in ``u``
    (log-spaced in ``1 - t`` near ``t = 1``, dense toward ``t = 0``), then
    bisected in ``ln u``. ``min_level`` fixes how far toward ``t = 0`` the
    grid must reach.
    """

    def __init__(self, f: MuntzPolynomial, mu: Measure, min_level: float,
                 grid_size: int = 4096):
        self.f = f
        self.mu = mu
        self._atoms = [(m, abs(float(f(x)))) for x, m in mu.atoms] if not f.is_zero else []
        self._grid = None
        if mu.has_continuous and not f.is_zero:
            lam = f.exponents
            u_lo = 1e-12 / lam[-1]
            amp = float(np.abs(f.coefs).sum())
            u_hi = max(math.log(max(2.0 * amp / min_level, 2.0)) / lam[0], 100.0 * u_lo)
            v = np.linspace(math.log(u_lo), math.log(u_hi), grid_size)
            self._grid = (v, np.abs(f.at_u(np.exp(v))))

    def __call__(self, level: float) -> float:
        if level <= 0:
            raise DomainError("level must be positive")
        total = sum(m for m, fv in self._atoms if fv > level)
        if self._grid is not None:
            total += _superlevel_mass(self.f, self.mu, self._grid[0], self._grid[1], level)
        return total


def distribution_levels(f: MuntzPolynomial, mu: Measure, levels, grid_size: int = 4096):
    """``mu(|f| > L)`` for every ``L`` in ``levels``."""
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    if np.any(levels <= 0):
        raise DomainError("levels must be positive")
    if f.is_zero or mu.is_zero:
        return np.zeros(levels.shape)
    ev = SuperlevelEvaluator(f, mu, float(levels.min()), grid_size)
    return np.array([ev(L) for L in levels])


def distribution(f: MuntzPolynomial, mu: Measure, level: float, grid_size: int = 4096) -> float:
    """``mu({t : |f(t)| > level})``."""
    return float(distribution_levels(f, mu, [level], grid_size)[0])


# -- fixed quadrature grids for repeated evaluation ---------------------------


@dataclass(frozen=True)
class FixedGrid:
    """Nodes ``u_i`` and masses ``w_i`` with ``int h dmu ~ sum w_i h(u_i)``.

    Includes the boundary node ``u = 0`` and all atoms with positive
    location. Accurate for ``h`` built from exponents in ``[lam_min, lam_max]``.
    """

    u: np.ndarray
    w: np.ndarray


def fixed_grid(mu: Measure, lam_min: float, lam_max: float, p_min: float = 1.0,
               panel_width: float = 0.25) -> FixedGrid:
    us, ws = [], []
    if mu.has_continuous:
        u_lo = _U_LO_SCALE / max(lam_max, 1.0)
        u_hi = _U_HI_DECAY / (p_min * lam_min + 1.0)
        v, wv = fixed_rule(math.log(u_lo), math.log(u_hi), panel_width)
        u = np.exp(v)
        us += [np.array([0.0]), u]
        ws += [np.array([mu.mass_interval_u(0.0, u_lo)]), wv * mu.weight_u(u) * u]
    for x, m in mu.atoms:
        if x > 0:
            us.append(np.array([-math.log(x)]))
            ws.append(np.array([m]))
    if not us:
        return FixedGrid(np.zeros(0), np.zeros(0))
    return FixedGrid(np.concatenate(us), np.concatenate(ws))


# -- measure conditions ------------------------------------------------------


@dataclass
class MxReport:
    constant: float
    verdict: bool
    eps: np.ndarray
    ratios: np.ndarray

    def to_dict(self):
        return {"constant": self.constant, "verdict": self.verdict,
                "eps": self.eps.tolist(), "ratios": self.ratios.tolist()}


def check_Mx_gamma(mu: Measure, gamma: float, eps_grid=None) -> MxReport:
    """Sup of ``mu([1-eps, 1]) / eps^gamma`` over the grid (default ``2^-j``, j=1..30).

    Verdict: finite, and the ratio at the smallest eps is within a factor
    ``MX_STABILITY`` of the ratio at the middle of the grid.
    """
    eps = np.asarray(eps_grid if eps_grid is not None else 2.0 ** -np.arange(1, 31), dtype=float)
    if eps.size == 0 or np.any((eps <= 0) | (eps >= 1)):
        raise DomainError("eps grid must be nonempty with values in (0, 1)")
    eps = np.sort(eps)[::-1]
    ratios = np.array([mu.mass_near_one(e) / e ** gamma for e in eps])
    const = float(ratios.max())
    mid = ratios[ratios.size // 2]
    last = ratios[-1]
    stable = bool(np.isfinite(const) and (last <= MX_STABILITY * mid or last == 0.0))
    return MxReport(const, stable, eps, ratios)


def bounded_trend(values, window: int = TREND_WINDOW, factor: float = TREND_FACTOR) -> bool:
    """False iff values are non-finite or the last ``window`` grow monotonically by > ``factor``."""
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        return False
    if v.size < window:
        return True
    tail = v[-window:]
    growing = np.all(np.diff(tail) > 0)
    return not (growing and tail[-1] > factor * tail[0])


def geometric_tail(terms, window: int = TREND_WINDOW, ratio: float = GEOMETRIC_RATIO) -> bool:
    """Consecutive ratios of the last ``window`` terms all below ``ratio`` (all-zero passes)."""
    t = np.asarray(terms, dtype=float)
    if not np.all(np.isfinite(t)):
        return False
    if np.all(t == 0):
        return True
    tail = t[-(window + 1):]
    if np.any(tail[:-1] == 0):
        return bool(np.all(tail == 0) or np.all(tail[np.argmax(tail == 0):] == 0))
    return bool(np.all(tail[1:] / tail[:-1] < ratio))


@dataclass
class MomentReport:
    kind: str
    k: list
    lambda_nk: list
    values: list
    aggregate: float
    verdict: bool
    tail_verdict: bool
    compact: bool | None = None
    partial_sums: list | None = None

    def to_dict(self):
        d = {"kind": self.kind, "verdict": self.verdict, "tail_verdict": self.tail_verdict,
             "aggregate": self.aggregate,
             "rows": [{"k": k, "lambda_nk": l, "value": v}
                      for k, l, v in zip(self.k, self.lambda_nk, self.values)]}
        if self.compact is not None:
            d["compact"] = self.compact
        if self.partial_sums is not None:
            d["partial_sums"] = self.partial_sums
        return d


def _log_moment(mu: Measure, s: float) -> float:
    """``ln int t^s dmu`` without underflow for Jacobi parts."""
    if mu.is_zero:
        return -math.inf
    if mu.is_pure_jacobi:
        return log_beta(s + 1.0, mu.jacobi_gamma)
    m = moment(mu, s)
    return math.log(m) if m > 0 else -math.inf


def check_B_condition(mu: Measure, p: float, part: BlockPartition, alpha: float,
                      beta: float) -> MomentReport:
    """``lam_{n_k}^{alpha beta} int t^{p lam_{n_k}} dmu`` over the stored block endpoints."""
    if not (p > 0 and alpha > 0 and beta >= 1):
        raise DomainError("need p > 0, alpha > 0, beta >= 1")
    ends = part.endpoints()
    vals = [math.exp(alpha * beta * math.log(l) + _log_moment(mu, p * l)) for l in ends]
    v = np.array(vals)
    verdict = bounded_trend(v)
    tail = bounded_trend(v[v.size // 2:])
    top = float(v.max()) if v.size else 0.0
    compact = bool(v.size >= TREND_WINDOW and v[-1] <= COMPACT_DROP * top
                   and np.all(np.diff(v[-TREND_WINDOW:]) <= 0))
    return MomentReport("B", list(range(len(ends))), ends.tolist(), vals, top, verdict, tail,
                        compact=compact)


def check_A_condition(mu: Measure, p: float, part: BlockPartition, alpha: float,
                      beta: float) -> MomentReport:
    """Partial sums of ``lam^{ab/(1-b)} (int t^{p lam} dmu)^{1/(1-b)}`` over block endpoints."""
    if not (p > 0 and alpha > 0 and 0 < beta < 1):
        raise DomainError("need p > 0, alpha > 0, 0 < beta < 1")
    ends = part.endpoints()
    e = 1.0 / (1.0 - beta)
    terms = []
    for l in ends:
        lm = _log_moment(mu, p * l)
        terms.append(0.0 if lm == -math.inf else math.exp(e * (alpha * beta * math.log(l) + lm)))
    sums = np.cumsum(terms).tolist()
    verdict = geometric_tail(terms)
    tail = geometric_tail(terms[len(terms) // 2:])
    return MomentReport("A", list(range(len(ends))), ends.tolist(), terms,
                        float(sums[-1]) if sums else 0.0, verdict, tail, partial_sums=sums)
