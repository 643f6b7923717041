"""Exponent sequences, block partitions and lacunary sum estimates."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (DomainError, EmptySequenceError, InvalidLacunarityError,
                     NotQuasiLacunaryError)

# Open ratio conditions are compared with this relative slack.
RATIO_RTOL = 1e-12


def _frozen(arr):
    a = np.array(arr, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ExponentSequence:
    """Strictly increasing positive exponents ``lam_0 < lam_1 < ...``."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1 or v.size == 0:
            raise EmptySequenceError("exponent sequence must be a nonempty 1-d list")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise DomainError("exponents must be finite and positive")
        if np.any(np.diff(v) <= 0):
            raise DomainError("exponents must be strictly increasing")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __getitem__(self, i):
        return float(self.values[i])

    def __eq__(self, other):
        return isinstance(other, ExponentSequence) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    @property
    def reciprocal_sum(self) -> float:
        """Partial sum of ``1/lam_k`` over the stored prefix."""
        return float(np.sum(1.0 / self.values))

    def index_of(self, lam: float) -> int:
        j = int(np.searchsorted(self.values, lam))
        if j < self.values.size and self.values[j] == lam:
            return j
        return -1


@dataclass(frozen=True, eq=False)
class BlockPartition:
    """Contiguous blocks ``E_k`` of a sequence with a quasi-lacunarity witness.

    ``blocks[k] = (lo, hi)`` are inclusive index ranges. The block endpoint
    ``lam_{n_k}`` of the theory is ``seq[hi]``; :meth:`endpoints` lists them.
    """

    seq: ExponentSequence
    blocks: tuple
    N: int
    q: float
    q_prime: float | None = None
    onset_index: int = 0
    _endpoints: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        blocks = tuple((int(lo), int(hi)) for lo, hi in self.blocks)
        expect = 0
        for lo, hi in blocks:
            if lo != expect or hi < lo:
                raise DomainError("blocks must be contiguous and cover the sequence")
            expect = hi + 1
        if expect != len(self.seq):
            raise DomainError("blocks must cover every index of the sequence")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_endpoints", _frozen([self.seq[hi] for _, hi in blocks]))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> list[int]:
        return [hi - lo + 1 for lo, hi in self.blocks]

    def endpoints(self) -> np.ndarray:
        return self._endpoints

    def block_exponents(self, k: int) -> np.ndarray:
        lo, hi = self.blocks[k]
        return self.seq.values[lo:hi + 1]

    def anchor_before(self, k: int) -> float:
        """Endpoint of the previous block, 0 for the first block."""
        return 0.0 if k == 0 else float(self._endpoints[k - 1])

    def block_of_exponent(self, lam: float) -> int:
        j = self.seq.index_of(lam)
        if j < 0:
            return -1
        for k, (lo, hi) in enumerate(self.blocks):
            if lo <= j <= hi:
                return k
        return -1  # pragma: no cover

    def endpoint_ratios(self) -> np.ndarray:
        e = self._endpoints
        return e[1:] / e[:-1]

    def to_dict(self) -> dict:
        return {
            "values": self.seq.values.tolist(),
            "blocks": [list(b) for b in self.blocks],
            "N": self.N,
            "q": self.q,
            "q_prime": self.q_prime,
            "onset_index": self.onset_index,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "BlockPartition":
        return cls(ExponentSequence(d["values"]), tuple(tuple(b) for b in d["blocks"]),
                   int(d["N"]), float(d["q"]),
                   None if d.get("q_prime") is None else float(d["q_prime"]),
                   int(d.get("onset_index", 0)))

    @classmethod
    def from_json(cls, s: str) -> "BlockPartition":
        return cls.from_dict(json.loads(s))


def make_geometric(lambda0: float, ratio: float, count: int) -> ExponentSequence:
    if count < 1:
        raise EmptySequenceError("count must be at least 1")
    if not ratio > 1:
        raise InvalidLacunarityError(f"ratio must exceed 1, got {ratio}")
    if not lambda0 > 0:
        raise DomainError("lambda0 must be positive")
    return ExponentSequence(lambda0 * float(ratio) ** np.arange(count))


def validate_quasi_lacunary(seq: ExponentSequence, block_sizes: Sequence[int],
                            q: float) -> BlockPartition:
    """Check ``lam_{n_{k+1}} / lam_{n_k} > q`` on consecutive block endpoints.

    The onset is the smallest block index from which every endpoint ratio
    passes. A failing final ratio leaves no admissible onset.
    """
    if not q > 1:
        raise InvalidLacunarityError(f"q must exceed 1, got {q}")
    sizes = [int(s) for s in block_sizes]
    if any(s < 1 for s in sizes):
        raise DomainError("block sizes must be positive")
    if sum(sizes) != len(seq):
        raise DomainError(f"block sizes sum to {sum(sizes)}, sequence has {len(seq)} terms")
    bounds = np.cumsum([0] + sizes)
    blocks = tuple((int(bounds[i]), int(bounds[i + 1] - 1)) for i in range(len(sizes)))
    ends = np.array([seq[hi] for _, hi in blocks])
    ok = ends[1:] / ends[:-1] > q * (1.0 - RATIO_RTOL)
    if ok.size and not ok[-1]:
        raise NotQuasiLacunaryError(
            f"endpoint ratio {ends[-1] / ends[-2]:.6g} does not exceed q={q}")
    bad = np.nonzero(~ok)[0]
    onset = int(bad[-1] + 1) if bad.size else 0
    return BlockPartition(seq, blocks, max(sizes), float(q), None, onset)


def lacunary_partition(seq: ExponentSequence, q: float | None = None) -> BlockPartition:
    """Singleton blocks (``N = 1``); ``q`` defaults to the smallest ratio."""
    if q is None:
        r = seq.values[1:] / seq.values[:-1]
        q = float(r.min()) if r.size else 2.0
    return validate_quasi_lacunary(seq, [1] * len(seq), q)


class SubgeometricCheck(NamedTuple):
    ok: bool
    first_violation: int | None


def check_subgeometric(part: BlockPartition, q_prime: float) -> SubgeometricCheck:
    ratios = part.endpoint_ratios()
    for k in range(part.onset_index, ratios.size):
        if ratios[k] > q_prime * (1.0 + RATIO_RTOL):
            return SubgeometricCheck(False, k)
    return SubgeometricCheck(True, None)


def with_subgeometric(part: BlockPartition, q_prime: float) -> BlockPartition:
    """Copy of ``part`` carrying ``q_prime`` after checking it holds."""
    res = check_subgeometric(part, q_prime)
    if not res.ok:
        raise DomainError(f"subgeometric bound {q_prime} fails at block {res.first_violation}")
    return BlockPartition(part.seq, part.blocks, part.N, part.q, float(q_prime), part.onset_index)


class LacunarySum(NamedTuple):
    value: float
    empty_tail: bool


def lacunary_sum_ratio(seq: ExponentSequence, kappa: float, i: int,
                       direction: str) -> LacunarySum:
    """``sum_{j<=i} lam_j^k / lam_i^k`` (below) or ``sum_{j>i} lam_j^-k / lam_i^-k`` (above)."""
    if not 0 <= i < len(seq):
        raise DomainError(f"index {i} out of range for a sequence of length {len(seq)}")
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    lam = seq.values
    if direction == "below":
        return LacunarySum(float(np.sum((lam[:i + 1] / lam[i]) ** kappa)), False)
    if direction == "above":
        if i == len(seq) - 1:
            return LacunarySum(0.0, True)
        return LacunarySum(float(np.sum((lam[i] / lam[i + 1:]) ** kappa)), False)
    raise DomainError(f"direction must be 'below' or 'above', got {direction!r}")


class DeltaCheck(NamedTuple):
    lhs: float
    rhs: float
    ratio: float


def delta_lemma_check(lam: ExponentSequence, eps: Sequence[float], n: int, kappa: float,
                      tau: float, beta: float, A: int, i: int,
                      direction: str = "+") -> DeltaCheck:
    """Both sides of the lacunary Hölder splitting, by finite summation.

    The right side is an ``(n-1)``-fold sum of products over independent
    indices, so it equals the ``(n-1)``-th power of a single sum; that
    identity is used here and checked by enumeration in the tests.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    if not (0 < tau < 1 and 0 < beta < 1):
        raise DomainError("tau and beta must lie in (0, 1)")
    if A < 1:
        raise DomainError("A must be a positive integer")
    lv = lam.values
    e = np.asarray(eps, dtype=float)
    if e.shape != lv.shape or np.any(e <= 0):
        raise DomainError("eps must be positive and match the sequence length")
    K = lv.size
    if not 0 <= i < K:
        raise DomainError("index out of range")
    expo = (1.0 - tau) * (1.0 - beta) / (n - 1)
    if direction == "+":
        j = np.arange(i + 1, K)
        inner = float(np.sum(lv[j] ** -kappa * e[j] ** expo))
        rhs_inner = 0.0
        k = 0
        while i + k * A < K:
            lo, hi = i + k * A, min(i + (k + 1) * A, K)
            rhs_inner += float(np.sum(e[lo:hi])) ** expo * lv[i + k * A] ** -kappa
            k += 1
    elif direction == "-":
        j = np.arange(1, i + 1)
        inner = float(np.sum(lv[j] ** kappa * e[j] ** expo))
        rhs_inner = 0.0
        for k in range(i // A + 1):
            lo, hi = max(i - (k + 1) * A, 0), i - k * A
            block = float(np.sum(e[lo:hi])) if hi > lo else 0.0
            rhs_inner += block ** expo * lv[i - k * A] ** kappa
    else:
        raise DomainError("direction must be '+' or '-'")
    lhs = inner ** (n - 1)
    rhs = rhs_inner ** (n - 1)
    if lhs == 0.0 and rhs == 0.0:
        ratio = 1.0
    elif rhs == 0.0:
        ratio = float("inf")
    else:
        ratio = lhs / rhs
    return DeltaCheck(lhs, rhs, ratio)
