import math
import os
import subprocess
import sys

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from muntzlab import kernels
from muntzlab._accel import BACKEND, HAVE_NUMBA
from muntzlab.quadrature import fixed_rule, integrate_v
from muntzlab.special import beta, log_beta, log_gamma_ratio, log_monomial_norm

mpmath.mp.dps = 40


def _random_poly(rng, n):
    lams = np.sort(10 ** rng.uniform(-1, 9, n))
    return lams, rng.standard_normal(n)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend not active")
def test_numba_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(10):
        lams, coefs = _random_poly(rng, 7)
        u = np.geomspace(1e-12, 50, 2000)
        ref = kernels.eval_u_np(lams, coefs, u)
        got = kernels._eval_u_dispatch(lams, coefs, u)
        assert np.allclose(got, ref, rtol=1e-12, atol=1e-14 * np.abs(coefs).sum())
        lref = kernels.log_abs_eval_u_np(lams, coefs, u)
        lgot = kernels._log_abs_dispatch(lams, coefs, u)
        ok = np.isfinite(lref)
        assert np.allclose(lgot[ok], lref[ok], rtol=1e-10, atol=1e-10)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend not active")
def test_bisection_backends_agree():
    lams, coefs = np.array([1.0, 3.0]), np.array([1.0, -1.0])
    lo = np.array([-6.0])
    hi = np.array([3.0])
    a = kernels.bisect_crossings_np(lams, coefs, lo, hi, 0.1, 60)
    b = kernels._bisect_dispatch(lams, coefs, lo, hi, 0.1, 60)
    assert a == pytest.approx(b, abs=1e-12)


def test_log_abs_survives_underflow():
    lams, coefs = np.array([1e6, 2e6]), np.array([1.0, -0.5])
    lv = kernels.log_abs_eval_u(lams, coefs, np.array([1.0]))
    # exp(-1e6) underflows but its logarithm does not
    assert lv[0] == pytest.approx(-1e6, rel=1e-12)


def test_backend_env_switch():
    code = "from muntzlab._accel import BACKEND; print(BACKEND)"
    env = dict(os.environ, MUNTZLAB_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
    env["MUNTZLAB_BACKEND"] = "fortran"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.returncode != 0
    assert BACKEND in ("numba", "numpy")


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 1e40), st.floats(-0.009, 50))
def test_log_gamma_ratio_vs_mpmath(x, a):
    # the two log-gammas are ~x ln x, so the oracle needs digits beyond log10 of that
    with mpmath.workdps(80):
        want = mpmath.loggamma(mpmath.mpf(x) + a) - mpmath.loggamma(x)
    got = log_gamma_ratio(x, a)
    assert abs(got - float(want)) <= 2e-15 * max(1.0, abs(float(want)))


def test_log_beta_examples():
    assert beta(1, 1) == pytest.approx(1.0, rel=1e-15)
    assert beta(2, 3) == pytest.approx(1 / 12, rel=1e-14)
    want = float(mpmath.log(mpmath.beta(1e12 + 1, 0.5)))
    assert log_beta(1e12 + 1, 0.5) == pytest.approx(want, rel=1e-14)
    assert math.exp(log_monomial_norm(3.0, 2.0, 1.0)) == pytest.approx(1 / math.sqrt(7))
    with pytest.raises(ValueError):
        log_beta(0, 1)


def test_quadrature_smooth_and_layer():
    # in v = ln u: integral of exp(-lam u) du over [a/lam, b/lam] is (e^-a - e^-b)/lam
    for lam in (1e-3, 1.0, 1e8):
        val, err = integrate_v(lambda v: np.exp(-lam * np.exp(v)) * np.exp(v),
                               math.log(1e-6 / lam), math.log(60 / lam))
        assert val == pytest.approx((math.exp(-1e-6) - math.exp(-60)) / lam, rel=1e-10)
    x, w = fixed_rule(0.0, 1.0)
    assert w.sum() == pytest.approx(1.0, rel=1e-14)
    assert (w * x ** 5).sum() == pytest.approx(1 / 6, rel=1e-14)
    assert integrate_v(np.exp, 1.0, 1.0) == (0.0, 0.0)


def test_log_gamma_ratio_underflowing_shift():
    # a/x so small that the series terms underflow to zero
    assert log_gamma_ratio(1e20, 1e-200) == pytest.approx(1e-200 * math.log(1e20), rel=1e-12)
