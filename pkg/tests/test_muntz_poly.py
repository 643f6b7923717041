import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from muntzlab.errors import DomainError, UndefinedConstantError, UnknownExponentError
from muntzlab.exponents import ExponentSequence, lacunary_partition, make_geometric, \
    validate_quasi_lacunary
from muntzlab.muntz_poly import (BlockPolynomial, MuntzPolynomial, block_decompose, evaluate,
                                 pointwise_bound_constant, sup_argmax, sup_norm)

P = MuntzPolynomial.from_terms


def test_huge_exponent_near_one():
    t = 1 - 1e-6
    want = float(mpmath.exp(10 ** 6 * mpmath.log(1 - mpmath.mpf("1e-6"))))
    got = evaluate(P([(1e6, 1.0)]), t)
    assert got == pytest.approx(want, rel=1e-9)
    assert got == pytest.approx(math.exp(-1), rel=1e-5)


def test_endpoints():
    f = P([(2, 3), (5, -1)])
    assert evaluate(f, 1.0) == 2.0
    assert evaluate(f, 0.0) == 0.0
    with pytest.raises(DomainError):
        evaluate(f, 1.5)
    with pytest.raises(DomainError):
        evaluate(f, -0.1)


def test_no_overflow_for_astronomic_exponents():
    f = P([(2.0 ** 60, 1.0), (2.0 ** 61, -2.0)])
    vals = evaluate(f, np.array([0.5, 1 - 1e-17, 1.0]))
    assert np.all(np.isfinite(vals))
    assert vals[-1] == -1.0


def test_single_term_relative_accuracy():
    rng = np.random.default_rng(1)
    for _ in range(20):
        lam = float(10 ** rng.uniform(-1, 8))
        t = float(rng.uniform(0.01, 1))
        want = mpmath.mpf(t) ** lam
        got = evaluate(P([(lam, 1.0)]), t)
        if want > 1e-300:
            assert abs(got - float(want)) <= 1e-13 * float(want) * max(1, lam * 1e-16 * 8)


def test_invariants_and_json():
    f = P([(3, 0.0), (1, 2.0), (2, -1.0)])
    assert f.exponents.tolist() == [1, 2] and len(f) == 2
    assert P([(1, 1), (1, 2)]) == P([(1, 3)])
    assert P([(1, 1), (1, -1)]).is_zero
    with pytest.raises(DomainError):
        P([(-1, 1)])
    assert MuntzPolynomial.from_json(f.to_json()) == f
    assert json.loads(f.to_json()) == [[1.0, 2.0], [2.0, -1.0]]


def test_block_decompose_examples():
    part = lacunary_partition(ExponentSequence([1, 4]))
    fs = block_decompose(P([(1, 1), (4, 1)]), part)
    assert [(b.block_index, b.poly) for b in fs] == [(0, P([(1, 1)])), (1, P([(4, 1)]))]
    part2 = validate_quasi_lacunary(ExponentSequence([1, 1.1, 4]), [2, 1], 2)
    fs = block_decompose(P([(1, 2), (1.1, -1), (4, 1)]), part2)
    assert fs[0].poly == P([(1, 2), (1.1, -1)]) and fs[1].poly == P([(4, 1)])
    with pytest.raises(UnknownExponentError):
        block_decompose(P([(3, 1)]), lacunary_partition(ExponentSequence([1, 2, 4])))


def test_sup_norm_examples():
    assert sup_norm(P([(7.5, 1)])) == 1.0
    assert sup_norm(P([(7, -5)])) == 5.0
    assert sup_norm(MuntzPolynomial.zero()) == 0.0
    val, u = sup_argmax(P([(2, 1), (3, -1)]))
    assert val == pytest.approx(4 / 27, abs=1e-12)
    assert math.exp(-u) == pytest.approx(2 / 3, abs=1e-5)


def test_sup_norm_boundary_layer():
    # peak of t^a - t^b sits at (a/b)^(1/(b-a)), very close to 1 for huge a
    a, b = 1e9, 2e9
    want = 0.25
    assert sup_norm(P([(a, 1), (b, -1)])) == pytest.approx(want, abs=1e-12)


coef = st.floats(-10, 10, allow_nan=False).filter(lambda c: abs(c) > 1e-3)
poly = st.lists(st.tuples(st.floats(0.1, 1e4), coef), min_size=1, max_size=6,
                unique_by=lambda x: round(x[0], 6)).map(P)


@settings(max_examples=100, deadline=None)
@given(poly, poly, st.floats(0, 1))
def test_linearity(f, g, t):
    lhs = evaluate(f + g, t)
    rhs = evaluate(f, t) + evaluate(g, t)
    scale = sum(abs(a) for _, a in f.terms + g.terms)
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=50, deadline=None)
@given(poly, st.floats(-100, 100).filter(lambda c: abs(c) > 1e-3))
def test_sup_homogeneity(f, c):
    assert sup_norm(f * c) == pytest.approx(abs(c) * sup_norm(f), rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(poly)
def test_sup_dominates_samples(f):
    s = sup_norm(f)
    ts = np.concatenate([np.linspace(0, 1, 200), 1 - np.geomspace(1e-9, 0.5, 200)])
    assert np.all(np.abs(evaluate(f, ts)) <= s * (1 + 1e-9) + 1e-15)


def test_pointwise_constant_examples():
    part = lacunary_partition(make_geometric(1, 2, 6))
    mono = BlockPolynomial(3, P([(8, 1.0)]))
    c = pointwise_bound_constant(mono, part)
    # for a monomial the ratio is x^(lam - anchor - 1) with lam = 8, anchor = 4
    assert c == pytest.approx(1.0)
    part2 = validate_quasi_lacunary(ExponentSequence([1, 1.1, 2, 2.2, 8]), [2, 2, 1], 1.5)
    fk = BlockPolynomial(1, P([(2, 1), (2.2, -1)]))
    c2 = pointwise_bound_constant(fk, part2)
    assert math.isfinite(c2) and c2 > 0
    assert pointwise_bound_constant(BlockPolynomial(1, P([(2, 10), (2.2, -10)])), part2) == c2
    with pytest.raises(UndefinedConstantError):
        pointwise_bound_constant(BlockPolynomial(1, MuntzPolynomial.zero()), part2)
    with pytest.raises(DomainError):
        pointwise_bound_constant(fk, part2, grid_size=10)


def test_pointwise_constant_bounded_in_k():
    seq = ExponentSequence(sorted({x for k in range(12) for x in (4.0 ** k, 1.3 * 4.0 ** k)}))
    part = validate_quasi_lacunary(seq, [2] * 12, 3)
    rng = np.random.default_rng(3)
    consts = []
    for k in range(12):
        lo, hi = part.blocks[k]
        terms = [(float(l), float(rng.standard_normal())) for l in seq.values[lo:hi]]
        consts.append(pointwise_bound_constant(BlockPolynomial(k, P(terms)), part))
    assert max(consts) < 1e3
    assert max(consts[6:]) <= 10 * max(consts[:6])
