import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from muntzlab.errors import DomainError, TruncationError, UnknownExponentError
from muntzlab.exponents import ExponentSequence, lacunary_partition, make_geometric
from muntzlab.measures import jacobi, lp_norm, monomial_norm
from muntzlab.muntz_poly import MuntzPolynomial
from muntzlab.operators import (DilationOperator, KernelOperator, apply, decoupled_row_norm,
                                default_eps, diagonal, diagonal_for_profile, identity,
                                make_counterexample_subcritical,
                                make_counterexample_supercritical, make_dilation_example,
                                make_example_supercritical, zero_operator)

P = MuntzPolynomial.from_terms
PART = lacunary_partition(make_geometric(1, 2, 16))
LAM = PART.seq.values


def test_identity_and_zero():
    f = P([(1, 2.0), (8, -1.0), (1024, 0.5)])
    assert apply(identity(PART.seq), f) == f
    assert apply(zero_operator(PART.seq), f).is_zero
    assert identity(PART.seq).positive


def test_dilation_single_scale():
    T = DilationOperator(scales=np.array([2.0]), weights=np.array([3.0]))
    assert apply(T, P([(5, 1)])) == P([(10, 3)])
    with pytest.raises(DomainError):
        DilationOperator(scales=np.array([0.0]), weights=np.array([1.0]))


def test_two_band_kernel():
    rows = {k: (np.array([k, k + 1]), np.array([0.5, 0.5])) for k in range(15)}
    T = KernelOperator(PART.seq, PART.seq, rows)
    assert apply(T, P([(2, 1)])) == P([(2, 0.5), (4, 0.5)])
    with pytest.raises(UnknownExponentError):
        apply(T, P([(3, 1)]))
    with pytest.raises(DomainError):
        KernelOperator(PART.seq, PART.seq, {0: (np.array([16]), np.array([1.0]))})


def test_subcritical_formula():
    r, a, b, g, e = 2.0, 1.0, 1.0, 1.5, 0.1
    T = make_counterexample_subcritical(PART, r, a, b, g, e)
    n, c = T.row(1)
    assert n.tolist() == [1] and c[0] == pytest.approx(LAM[1] ** ((g - a * b) / r), rel=1e-14)
    n, c = T.row(3)
    want = [LAM[3] ** (-b * a / r) * LAM[j] ** (g / r) / j ** ((1 + e) / r) for j in (1, 2, 3)]
    assert n.tolist() == [1, 2, 3]
    assert c == pytest.approx(want, rel=1e-13)
    assert 0 not in T.rows and all(np.all(T.row(k)[0] <= k) for k in T.rows)
    with pytest.raises(DomainError):
        make_counterexample_subcritical(PART, 1.0, a, 1.0, g, e)


def test_supercritical_formula():
    r, a, b, g, e, h = 2.0, 1.0, 0.5, 0.5, 0.1, 0.2
    T = make_counterexample_supercritical(PART, r, a, b, g, e, h)
    n, c = T.row(1)
    assert c[0] == pytest.approx(LAM[1] ** ((g - a * b) / r), rel=1e-14)
    k = 5
    n, c = T.row(k)
    want = [LAM[k] ** (-a * b / r) * LAM[j] ** (g / r)
            / (j ** ((1 + e) / r) * k ** ((1 - b) * (1 + h) / r)) for j in range(1, k + 1)]
    assert c == pytest.approx(want, rel=1e-13)
    assert np.all(n <= k)
    with pytest.raises(DomainError):
        make_counterexample_supercritical(PART, r, a, 1.0, g, e, h)


def test_constructors_need_lacunary():
    from muntzlab.exponents import validate_quasi_lacunary
    part2 = validate_quasi_lacunary(ExponentSequence([1, 1.1, 4, 4.4]), [2, 2], 2)
    with pytest.raises(DomainError):
        make_counterexample_subcritical(part2, 2, 1, 1, 1, 0.1)


def test_example_supercritical_rows():
    p, b = 1.5, 0.5
    T = make_example_supercritical(PART, p, b)
    e = (1 - b) / (2 * p)
    n, c = T.row(2)
    eps = T.params["eps"]
    assert n[0] == 2
    assert c[:3] == pytest.approx([(default_eps(2) * default_eps(j)) ** e for j in (2, 3, 4)],
                                  rel=1e-14)
    for k in range(10):
        n, c = T.row(k)
        assert n[0] == k and np.all(np.diff(n) == 1)
        assert c[0] == pytest.approx(eps[k] ** ((1 - b) / p), rel=1e-14)
    assert T.positive
    assert default_eps(0) == default_eps(1) == default_eps(2)


def test_example_truncation_certificate():
    p, b = 1.5, 0.5
    gamma = 1.0 * b
    T = make_example_supercritical(PART, p, b)
    horizon = T.params["horizon"]
    # an explicit row with twice the horizon changes the norm by less than the tolerance
    for k in (0, 5, 15):
        n, c = T.row(k)
        long_n = np.arange(k, k + 2 * (n[-1] - k) + 2)
        lam_long = LAM[0] * 2.0 ** long_n
        eps = [default_eps(j) for j in long_n]
        c_long = (default_eps(k) * np.array(eps)) ** ((1 - b) / (2 * p))
        for s in (1.0, 2.0):
            short = decoupled_row_norm(T, k, s, gamma)
            full = sum(cc ** s * monomial_norm(l, s, gamma) ** s
                       for cc, l in zip(c_long, lam_long)) ** (1 / s)
            assert abs(full - short) <= T.truncation_tol * short * 1.01
        assert horizon[k] == n[-1]


def test_example_rejects_bad_eps():
    with pytest.raises(DomainError):
        make_example_supercritical(PART, 1.5, 0.5, eps_seq=[1.0] * 16)
    with pytest.raises(TruncationError):
        make_example_supercritical(PART, 1.5, 0.5, eps_seq=[2.0 ** -k for k in range(16)])


def test_dilation_example_constant():
    T, C = make_dilation_example()
    assert C == pytest.approx(1 / 7, rel=1e-11)
    T1, C1 = make_dilation_example([3.0], [1.0], gamma=1.0, p=2.0)
    assert C1 == 9.0
    assert apply(T1, P([(2, 1)])) == P([(2, 3)])
    T0, C0 = make_dilation_example([], [], gamma=1.0, p=2.0)
    assert C0 == 0.0 and apply(T0, P([(2, 1)])).is_zero


def test_diagonal_profile_ratio():
    eps = [1.0] + [1.0 / k for k in range(1, 16)]
    r, a, b, g = 2.0, 1.0, 0.5, 0.5
    T = diagonal_for_profile(PART, eps, r, a, b, g)
    for k in (0, 3, 15):
        f = P([(LAM[k], 1.0)])
        ratio = lp_norm(T.apply(f), r, jacobi(g)) / lp_norm(f, r / b, jacobi(a))
        assert ratio == pytest.approx(eps[k] ** ((1 - b) / r), rel=1e-12)
    with pytest.raises(DomainError):
        diagonal(PART.seq, [1.0])


def test_json_rows():
    T = make_counterexample_subcritical(PART, 2.0, 1.0, 1.0, 1.0, 0.1)
    d = json.loads(T.to_json())
    assert d["rows"]["2"][1][0] == 2
    assert d["source"] == LAM.tolist()


coefs = st.lists(st.floats(-3, 3, allow_nan=False), min_size=16, max_size=16)


@settings(max_examples=100, deadline=None)
@given(coefs, coefs, st.floats(-5, 5), st.floats(-5, 5),
       st.sampled_from(["sub", "super", "example", "dilation"]))
def test_linearity(ca, cb, a, b, which):
    ops = {"sub": lambda: make_counterexample_subcritical(PART, 2, 1, 1, 1.5, 0.1),
           "super": lambda: make_counterexample_supercritical(PART, 2, 1, 0.5, 0.5, 0.1, 0.1),
           "example": lambda: _EXAMPLE,
           "dilation": lambda: make_dilation_example()[0]}
    T = ops[which]()
    f = P(zip(LAM, ca))
    g = P(zip(LAM, cb))
    lhs = T.apply(f * a + g * b)
    rhs = T.apply(f) * a + T.apply(g) * b
    # compare term by term; cancellation can leave tiny residues on either side
    diff = lhs - rhs
    scale = max(1.0, float(np.abs(T.apply(f).coefs).sum() + np.abs(T.apply(g).coefs).sum())) \
        * (abs(a) + abs(b) + 1)
    assert diff.is_zero or np.abs(diff.coefs).max() <= 1e-14 * scale


_EXAMPLE = make_example_supercritical(PART, 1.5, 0.5)
