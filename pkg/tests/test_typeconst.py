import csv
import io
import json
import math

import numpy as np
import pytest
from scipy import linalg

from muntzlab.errors import DomainError, PreconditionError
from muntzlab.exponents import ExponentSequence, lacunary_partition, make_geometric, \
    validate_quasi_lacunary
from muntzlab.measures import atom, jacobi, lebesgue, lp_norm, monomial_norm
from muntzlab.muntz_poly import MuntzPolynomial
from muntzlab.operators import (default_eps, diagonal_for_profile, identity,
                                make_counterexample_subcritical, make_example_supercritical,
                                zero_operator)
from muntzlab.special import log_beta
from muntzlab.typeconst import (InterpolationConfig, bernstein_constant, bernstein_delta,
                                block_constant, decoupling_ratio, epsilon_profile, global_ratio,
                                gram_bounds, interpolation_theta, random_family,
                                restricted_strong_constant, restricted_weak_constant, rng_for,
                                strong_constant_lower_bound, summable_trend,
                                type_constant_report, weak_sup, witness)

LAC = lacunary_partition(make_geometric(1, 2, 24))
PAIRS = validate_quasi_lacunary(
    ExponentSequence(sorted([4.0 ** k for k in range(10)] + [1.5 * 4.0 ** k for k in range(10)])),
    [2] * 10, 2)


def B(x, y):
    return math.exp(log_beta(x, y))


def test_theta_examples():
    assert interpolation_theta(2, 6, 3) == pytest.approx(0.5, abs=1e-15)
    assert interpolation_theta(2, 6, 2 + 1e-9) == pytest.approx(0.0, abs=1e-8)
    assert interpolation_theta(2, 6, 6 - 1e-9) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        interpolation_theta(3, 6, 2)


def test_config_invariant():
    cfg = InterpolationConfig(1.5, 4, 2, 1, 1, jacobi(1), LAC)
    assert abs(1 / cfg.r - ((1 - cfg.theta) / cfg.p + cfg.theta / cfg.q)) <= 1e-12
    assert cfg.regime == "subcritical" and cfg.with_r(3).regime == "subcritical"
    assert InterpolationConfig(1.5, 4, 2, 1, 0.5, jacobi(1), LAC).regime == "supercritical"


@pytest.mark.parametrize("lam,r,beta,gamma,alpha", [(1, 1, 1, 1, 1), (8, 2, 1, 0.5, 1.5),
                                                     (1024, 3, 0.5, 2, 1)])
def test_identity_singleton_closed_form(lam, r, beta, gamma, alpha):
    seq = ExponentSequence([lam, 4 * lam])
    part = lacunary_partition(seq)
    cfg = InterpolationConfig(r / 2, 2 * r, r, alpha, beta, jacobi(gamma), part)
    want = B(r * lam + 1, gamma) ** (1 / r) / B(r / beta * lam + 1, alpha) ** (beta / r)
    assert restricted_strong_constant(identity(seq), 0, r, cfg) == pytest.approx(want, rel=1e-10)
    if (lam, r) == (1, 1):
        assert want == pytest.approx(1.0)


@pytest.mark.parametrize("k", [0, 3, 7])
@pytest.mark.parametrize("gamma,alpha", [(0.5, 1.0), (2.0, 0.75)])
def test_gram_oracle(k, gamma, alpha):
    cfg = InterpolationConfig(1.5, 4, 2, alpha, 1.0, jacobi(gamma), PAIRS)
    lam = PAIRS.block_exponents(k)
    S = np.add.outer(lam, lam) + 1
    G = np.vectorize(B)(S, gamma)
    H = np.vectorize(B)(S, alpha)
    want = math.sqrt(linalg.eigh(G, H, eigvals_only=True)[-1])
    got = restricted_strong_constant(identity(PAIRS.seq), k, 2.0, cfg)
    assert got == pytest.approx(want, rel=1e-6)


def test_zero_operator_and_zero_measure():
    cfg = InterpolationConfig(1.5, 4, 2, 1, 1, jacobi(1), PAIRS)
    assert restricted_strong_constant(zero_operator(PAIRS.seq), 2, 2, cfg) == 0.0
    assert restricted_weak_constant(zero_operator(PAIRS.seq), 2, 2, cfg) == 0.0
    cfg0 = InterpolationConfig(1.5, 4, 2, 1, 1, jacobi(1), PAIRS)
    assert weak_sup(MuntzPolynomial.zero(), lebesgue(), 2) == 0.0
    assert strong_constant_lower_bound(zero_operator(PAIRS.seq), 2, cfg0, family_size=5) == 0.0


def test_block_dimension_precondition():
    part = validate_quasi_lacunary(PAIRS.seq, [3, 1] + [2] * 8, 2)
    cfg = InterpolationConfig(1.5, 4, 2, 1, 1, jacobi(1), part)
    # the first block holds 3 exponents while the second endpoint ratio still passes
    assert part.N == 3
    assert block_constant(identity(part.seq), 0, 2, cfg).value > 0
    with pytest.raises(DomainError):
        block_constant(identity(part.seq), 99, 2, cfg)


def test_weak_dense_scan_oracle():
    for lam, r, alpha, beta in [(1.0, 2.0, 1.0, 1.0), (40.0, 3.0, 0.5, 0.5), (2.0 ** 20, 1.5, 2, 1)]:
        seq = ExponentSequence([lam, 4 * lam])
        cfg = InterpolationConfig(r / 2, 2 * r, r, alpha, beta, lebesgue(), lacunary_partition(seq))
        got = restricted_weak_constant(identity(seq), 0, r, cfg)
        L = np.linspace(1e-5, 1 - 1e-12, 100_000)
        # t^lam > L on (L^(1/lam), 1]
        scan = np.max(L * (-np.expm1(np.log(L) / lam)) ** (1 / r))
        want = scan / monomial_norm(lam, r / beta, alpha)
        assert got == pytest.approx(want, rel=1e-7)


OPERATORS = {
    "identity": lambda: identity(PAIRS.seq),
    "dilation-free diagonal": lambda: _diag(),
}


def _diag():
    from muntzlab.operators import diagonal
    return diagonal(PAIRS.seq, 1.0 / np.arange(1, 21))


@pytest.mark.parametrize("name", list(OPERATORS))
@pytest.mark.parametrize("k", [1, 5])
def test_markov_weak_below_strong(name, k):
    T = OPERATORS[name]()
    for mu in (jacobi(0.5), jacobi(2.0)):
        cfg = InterpolationConfig(1.5, 4, 2, 1.0, 1.0, mu, PAIRS)
        w = restricted_weak_constant(T, k, 2.0, cfg, restarts=6, samples=2000)
        s = restricted_strong_constant(T, k, 2.0, cfg, restarts=6, samples=2000)
        assert w <= s * (1 + 1e-6)


def test_markov_on_lacunary_counterexample():
    T = make_counterexample_subcritical(LAC, 2.0, 1.0, 1.0, 1.0, 0.1)
    cfg = InterpolationConfig(1.5, 4, 2, 1.0, 1.0, jacobi(1.0), LAC)
    for k in (1, 6, 12):
        assert restricted_weak_constant(T, k, 2, cfg) <= restricted_strong_constant(T, k, 2, cfg) \
            * (1 + 1e-6)


def test_optimizer_dominates_sampler_and_is_seeded():
    cfg = InterpolationConfig(1.5, 4, 2, 1.0, 1.0, jacobi(0.5), PAIRS)
    a = block_constant(identity(PAIRS.seq), 4, 2.0, cfg, seed=3)
    b = block_constant(identity(PAIRS.seq), 4, 2.0, cfg, seed=3)
    assert a.value == b.value and a.argmax == b.argmax
    assert a.optimizer_value >= a.sampler_value * (1 - 1e-6)
    assert a.restarts == 16 and a.samples == 10_000


def test_scaling_invariance():
    cfg = InterpolationConfig(1.5, 4, 2, 1.0, 0.5, jacobi(0.5), LAC)
    T = make_example_supercritical(LAC, 1.5, 0.5)
    for f in random_family(LAC, 2.0, 1.0, 0.5, 5, seed=1):
        base = global_ratio(T, f, 2.0, cfg)
        for c in (1e-6, -3.0, 1e5):
            assert global_ratio(T, f * c, 2.0, cfg) == pytest.approx(base, rel=1e-10)
    prob_cfg = InterpolationConfig(1.5, 4, 2, 1.0, 1.0, jacobi(0.5), PAIRS)
    from muntzlab.typeconst import _BlockProblem
    prob = _BlockProblem(identity(PAIRS.seq), PAIRS.block_exponents(2), 2.0, prob_cfg, "weak")
    a = np.array([0.3, -1.2])
    assert prob.exact_ratio(a * 7.0) == pytest.approx(prob.exact_ratio(a), rel=1e-10)


def test_lower_bound_consistency():
    cfg = InterpolationConfig(1.5, 4, 2, 1.0, 1.0, jacobi(1.0), LAC)
    T = identity(LAC.seq)
    mono = MuntzPolynomial.monomial(LAC.seq.values[5], 1.0)
    lb = strong_constant_lower_bound(T, 2.0, cfg, family=[mono])
    assert lb == pytest.approx(restricted_strong_constant(T, 5, 2.0, cfg), rel=1e-9)
    with pytest.raises(DomainError):
        strong_constant_lower_bound(T, 2.0, cfg, family=[])
    f = witness(LAC, 4, 1.0, 1.0, 2.0)
    assert f.exponents.tolist() == [2, 4, 8, 16]
    assert f.coefs == pytest.approx(np.array([2, 4, 8, 16]) ** 0.5)


def test_identity_lower_bound_below_interpolated_bound():
    # identity into nu_{ab-1}: the global constant is finite and the sampled bound stays below
    # the restricted sup times the decoupling constants
    cfg = InterpolationConfig(1.5, 4, 2, 1.0, 1.0, jacobi(1.0), LAC)
    lb = strong_constant_lower_bound(identity(LAC.seq), 2.0, cfg, family_size=50)
    assert math.isfinite(lb) and lb == pytest.approx(1.0, rel=1e-12)


def test_decoupling_examples():
    one = decoupling_ratio(LAC, 2, 1.0, n_blocks=1)
    assert one.c_low == pytest.approx(1.0, rel=1e-12) and one.c_high == pytest.approx(1.0, rel=1e-12)
    far = decoupling_ratio(lacunary_partition(ExponentSequence([1.0, 2.0 ** 30])), 2, 1.0)
    assert 0.99 <= far.c_low <= far.c_high <= 1.01
    with pytest.raises(DomainError):
        decoupling_ratio(LAC, 0.5, 1.0)
    with pytest.raises(DomainError):
        decoupling_ratio(LAC, 2, 1.0, samples=10)


def test_decoupling_golden_and_gram():
    part = lacunary_partition(make_geometric(1, 2, 12))
    res = decoupling_ratio(part, 2, 1.0, samples=500, seed=0)
    # first run of this configuration, pinned
    assert res.c_low == pytest.approx(0.0060375789640, rel=1e-6)
    assert res.c_high == pytest.approx(2.626740317943, rel=1e-6)
    g_lo, g_hi = gram_bounds(part, 1.0, 12)
    assert res.c_low == pytest.approx(g_lo, rel=1e-6)
    assert res.c_high == pytest.approx(g_hi, rel=1e-6)
    assert g_lo <= res.sample_low and res.sample_high <= g_hi
    for m, (lo, hi) in res.by_blocks.items():
        assert g_lo * (1 - 1e-9) <= lo <= hi <= g_hi * (1 + 1e-9)
    json.dumps(res.to_dict())


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_decoupling_stable_under_doubling(p):
    part = lacunary_partition(make_geometric(1, 2, 12))
    a = decoupling_ratio(part, p, 1.0, samples=500, seed=0)
    b = decoupling_ratio(part, p, 1.0, samples=1000, seed=0)
    assert abs(b.c_low / a.c_low - 1) < 0.05
    assert abs(b.c_high / a.c_high - 1) < 0.05


def test_bernstein_examples():
    p, q, aw, beta = 2.0, 3.0, 0.5, 1.5
    delta = bernstein_delta(p, q, aw, beta)
    lim = math.gamma(beta) ** (1 / p) / math.gamma(1 + aw) ** (1 / q) * p ** (-beta / p) \
        * q ** ((1 + aw) / q)
    part = lacunary_partition(make_geometric(1, 2, 41))
    got = bernstein_constant(40, p, q, aw, beta, jacobi(beta), part)
    assert got == pytest.approx(lim, rel=1e-6)
    lam = 2.0 ** 5
    want = B(p * lam + 1, beta) ** (1 / p) / (lam ** delta * B(q * lam + 1, aw + 1) ** (1 / q))
    assert bernstein_constant(5, p, q, aw, beta, jacobi(beta), part) == pytest.approx(want, rel=1e-10)
    with pytest.raises(PreconditionError):
        bernstein_constant(5, p, q, aw, beta, atom(), part)
    with pytest.raises(PreconditionError):
        bernstein_constant(5, p, q, aw, beta, jacobi(beta), part, k0=6)


def test_bernstein_identical_norms():
    aw = 0.5
    beta = 1 + aw
    assert bernstein_delta(2, 2, aw, beta) == 0
    vals = [bernstein_constant(k, 2.0, 2.0, aw, beta, jacobi(beta), PAIRS, samples=50)
            for k in (0, 4, 9)]
    assert vals == pytest.approx([1.0] * 3, rel=1e-10)


def test_bernstein_homogeneity():
    part = PAIRS
    mu = jacobi(1.5)
    f = MuntzPolynomial(part.block_exponents(3), np.array([1.0, -0.4]))
    w = jacobi(1.5)
    r1 = lp_norm(f, 2, mu) / lp_norm(f, 3, w)
    r10 = lp_norm(f * 10, 2, mu) / lp_norm(f * 10, 3, w)
    assert r10 == pytest.approx(r1, rel=1e-12)


def test_epsilon_profile_example_operator():
    p, b = 1.5, 0.5
    T = make_example_supercritical(LAC, p, b)
    cfg = InterpolationConfig(p, 2.5, 2.0, 1.0, b, jacobi(b), LAC)
    prof = epsilon_profile(T, cfg, p, range(0, 21))
    assert prof.verdict
    ratio = np.array(prof.eps[2:]) / np.array([default_eps(k) for k in range(2, 21)])
    assert ratio.max() / ratio.min() < 10
    assert prof.C_eps == pytest.approx(prof.partial_sums[-1])


def test_epsilon_profile_identity_and_zero():
    b = 0.5
    cfg = InterpolationConfig(1.5, 2.5, 2.0, 1.0, b, jacobi(b), LAC)
    prof = epsilon_profile(identity(LAC.seq), cfg, 2.0, range(0, 21))
    assert not prof.verdict
    assert min(prof.eps[5:]) > 0.5
    z = epsilon_profile(zero_operator(LAC.seq), cfg, 2.0, range(0, 10))
    assert z.eps == [0.0] * 10 and z.verdict
    with pytest.raises(DomainError):
        epsilon_profile(identity(LAC.seq), InterpolationConfig(1.5, 2.5, 2, 1, 1, jacobi(1), LAC),
                        2.0, range(3))


def test_diagonal_profile_recovers_eps():
    b, r = 0.5, 2.0
    eps = [1.0] + [1.0 / k ** 2 for k in range(1, 24)]
    T = diagonal_for_profile(LAC, eps, r, 1.0, b, b)
    cfg = InterpolationConfig(1.5, 2.5, r, 1.0, b, jacobi(b), LAC)
    prof = epsilon_profile(T, cfg, r, range(24))
    assert prof.eps == pytest.approx(eps, rel=1e-9)
    assert prof.verdict


def test_summable_trend():
    k = np.arange(2, 200)
    assert summable_trend(1 / (k * np.log(k) ** 2), k)
    assert not summable_trend(1.0 / k, k)
    assert summable_trend(2.0 ** -k)
    assert summable_trend(np.zeros(5))
    assert not summable_trend([1.0, np.inf])


def test_report_json_csv():
    cfg = InterpolationConfig(1.5, 2.5, 2.0, 1.0, 0.5, jacobi(0.5), LAC)
    T = make_example_supercritical(LAC, 1.5, 0.5)
    rep = type_constant_report(T, cfg, "restricted-strong", 2.0, range(5))
    d = json.loads(rep.to_json())
    assert [row["k"] for row in d["rows"]] == list(range(5))
    assert d["sup"] == max(rep.constants) and d["C_eps"] == pytest.approx(sum(rep.eps))
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert float(rows[3]["C"]) == rep.constants[3]
    lower = type_constant_report(T, cfg, "global-strong-lower", 2.0, [], family_size=10)
    assert lower.sup > 0 and lower.method["family_size"] == 10
    with pytest.raises(DomainError):
        type_constant_report(T, cfg, "nonsense", 2.0, [])


def test_rng_streams_independent():
    a = rng_for(0, 1).standard_normal(3)
    b = rng_for(0, 2).standard_normal(3)
    c = rng_for(0, 1).standard_normal(3)
    assert not np.allclose(a, b) and np.array_equal(a, c)
